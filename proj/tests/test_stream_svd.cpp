#include <doctest.h>

#include <Eigen/SVD>
#include <cmath>

#include "srom/errors.hpp"
#include "srom/incremental_svd.hpp"
#include "srom/metrics.hpp"
#include "srom/rng.hpp"
#include "srom/sketchy_svd.hpp"
#include "srom/sparse_sign.hpp"

using namespace srom;

namespace {

Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  CounterRng rng(seed, 7);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = 2.0 * rng.next_unit() - 1.0;
  return m;
}

Vector random_vector(Index n, std::uint64_t seed) {
  return random_matrix(n, 1, seed).col(0);
}

/// Independent oracle: dense thin SVD.
TruncatedSvd dense_svd(const Matrix& x) {
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  TruncatedSvd out;
  out.left = svd.matrixU();
  out.singular_values = svd.singularValues();
  out.right = svd.matrixV();
  return out;
}

double orthogonality_defect(const Matrix& v) {
  return (v.transpose() * v - Matrix::Identity(v.cols(), v.cols())).norm();
}

/// Matrix with prescribed singular values (n x k, seed-controlled factors).
Matrix matrix_with_spectrum(Index n, Index k, const Vector& sigmas, std::uint64_t seed) {
  Eigen::HouseholderQR<Matrix> qu(random_matrix(n, n, seed));
  Eigen::HouseholderQR<Matrix> qv(random_matrix(k, k, seed + 1));
  const Matrix u = qu.householderQ() * Matrix::Identity(n, sigmas.size());
  const Matrix v = qv.householderQ() * Matrix::Identity(k, sigmas.size());
  return u * sigmas.asDiagonal() * v.transpose();
}

}  // namespace

TEST_CASE("incremental svd initialization") {
  Vector x(4);
  x << 3, 4, 0, 0;
  IncrementalSvd svd(4, 2);
  svd.init(x);
  CHECK(svd.rank() == 1);
  CHECK(svd.singular_values()[0] == doctest::Approx(5.0).epsilon(1e-14));
  Vector expected(4);
  expected << 0.6, 0.8, 0, 0;
  CHECK((svd.left().col(0) - expected).norm() < 1e-14);
  CHECK(svd.right()(0, 0) == doctest::Approx(1.0));

  IncrementalSvd unit(3, 2);
  Vector e1 = Vector::Zero(3);
  e1[0] = 1.0;
  unit.init(e1);
  CHECK((unit.left().col(0) - e1).norm() == 0.0);
  CHECK(unit.singular_values()[0] == doctest::Approx(1.0));

  const Vector random8 = random_vector(8, 11);
  IncrementalSvd rnd(8, 3);
  rnd.init(random8);
  const TruncatedSvd oracle = dense_svd(random8);
  CHECK(std::abs(rnd.singular_values()[0] - oracle.singular_values[0]) < 1e-12);
}

TEST_CASE("incremental svd rejects a zero first snapshot") {
  IncrementalSvd svd(5, 2);
  CHECK_THROWS_AS(svd.init(Vector::Zero(5)), ZeroSnapshot);
  // push() defers initialization instead, keeping zero rows in the right factor.
  svd.push(Vector::Zero(5));
  svd.push(Vector::Zero(5));
  Vector x = Vector::Zero(5);
  x[2] = 2.0;
  svd.push(x);
  CHECK(svd.snapshot_count() == 3);
  const Matrix w = svd.right();
  CHECK(w.rows() == 3);
  CHECK(w(0, 0) == 0.0);
  CHECK(w(1, 0) == 0.0);
  CHECK(std::abs(w(2, 0)) == doctest::Approx(1.0));
}

TEST_CASE("incremental svd update on orthogonal and collinear snapshots") {
  Vector e1 = Vector::Zero(4), e2 = Vector::Zero(4);
  e1[0] = 1.0;
  e2[1] = 1.0;

  IncrementalSvd svd(4, 4);
  svd.init(e1);
  svd.update(e2);
  CHECK(svd.rank() == 2);
  CHECK(svd.singular_values()[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(svd.singular_values()[1] == doctest::Approx(1.0).epsilon(1e-12));
  // span(V) == span(e1, e2)
  Matrix span(4, 2);
  span.col(0) = e1;
  span.col(1) = e2;
  CHECK(subspace_angle_error(span, svd.left()) < 1e-12);

  IncrementalSvd collinear(4, 4);
  collinear.init(e1);
  collinear.update(2.0 * e1);
  CHECK(collinear.singular_values()[0] == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
  CHECK(collinear.singular_values()[1] <= 1e-12);
  CHECK(orthogonality_defect(collinear.left()) < 1e-10);
}

TEST_CASE("incremental svd matches the dense oracle on a small stream") {
  const Matrix x = random_matrix(8, 10, 3);
  IncrementalSvd svd(8, 8);
  for (Index j = 0; j < x.cols(); ++j) {
    svd.push(x.col(j));
    CHECK(orthogonality_defect(svd.left()) < 1e-10);
    if (svd.tracks_right()) CHECK(orthogonality_defect(svd.right()) < 1e-10);
    for (Index t = 1; t < svd.rank(); ++t)
      CHECK(svd.singular_values()[t] <= svd.singular_values()[t - 1] + 1e-14);
  }
  const TruncatedSvd oracle = dense_svd(x);
  for (Index t = 0; t < 8; ++t)
    CHECK(std::abs(svd.singular_values()[t] - oracle.singular_values[t]) < 1e-10);
}

TEST_CASE("incremental svd reproduces the batch factorization at full rank") {
  for (const auto& [n, k, seed] : {std::tuple<Index, Index, int>{24, 40, 5},
                                   {64, 30, 6},
                                   {40, 64, 7}}) {
    const Matrix x = random_matrix(n, k, static_cast<std::uint64_t>(seed));
    const Index r = std::min(n, k);
    IncrementalSvd svd(n, r);
    for (Index j = 0; j < k; ++j) svd.push(x.col(j));
    const TruncatedSvd oracle = dense_svd(x);
    for (Index t = 0; t < r; ++t)
      CHECK(std::abs(svd.singular_values()[t] - oracle.singular_values[t]) < 1e-10);
    CHECK(subspace_angle_error(oracle.left.leftCols(r), svd.left()) < 1e-8);
    // Factorization reproduces the data.
    const Matrix recon =
        svd.left() * svd.singular_values().asDiagonal() * svd.right().transpose();
    CHECK((recon - x).norm() / x.norm() < 1e-10);
  }
}

TEST_CASE("sparse sign maps have fixed column sparsity and match their dense form") {
  const SparseSignMatrix map(9, 40, 8, 123, 1);
  const Matrix dense = map.dense();
  for (Index j = 0; j < 40; ++j) {
    Index nnz = 0;
    for (Index i = 0; i < 9; ++i)
      if (dense(i, j) != 0.0) {
        ++nnz;
        CHECK(std::abs(std::abs(dense(i, j)) - 1.0 / std::sqrt(8.0)) < 1e-15);
      }
    CHECK(nnz == 8);
  }
  const Vector x = random_vector(40, 77);
  CHECK((map.apply(x) - dense * x).norm() < 1e-14);

  // Same key, same map; different stream tag, different map.
  const SparseSignMatrix again(9, 40, 8, 123, 1);
  CHECK((again.dense() - dense).norm() == 0.0);
  const SparseSignMatrix other(9, 40, 8, 123, 2);
  CHECK((other.dense() - dense).norm() != 0.0);
}

TEST_CASE("sketch sizes follow the recommended rules") {
  SketchySvd two(64, 64, 2, 1);
  CHECK(two.range_size() == 9);
  CHECK(two.core_size() == 19);
  CHECK(two.sparsity() == 8);

  SketchySvd one(64, 64, 1, 1);
  CHECK(one.range_size() == 5);
  CHECK(one.core_size() == 11);
  CHECK(one.sparsity() == 5);

  SketchySvd a(64, 64, 2, 9), b(64, 64, 2, 9);
  CHECK((a.range_map().dense() - b.range_map().dense()).norm() == 0.0);
  CHECK((a.corange_map().dense() - b.corange_map().dense()).norm() == 0.0);

  SketchySvd big(8, 8, 2, 1);  // s = 19 > min(n, K) = 8
  CHECK(big.oversized());
}

TEST_CASE("sketch updates accumulate the exact map products") {
  const Index n = 30, k = 12, r = 2;
  const Matrix x = random_matrix(n, k, 9);
  SketchySvd sketch(n, k, r, 42);

  SUBCASE("zero snapshots change nothing") {
    sketch.update(Vector::Zero(n), 1);
    CHECK(sketch.range_sketch().norm() == 0.0);
    CHECK(sketch.corange_sketch().norm() == 0.0);
    CHECK(sketch.core_sketch().norm() == 0.0);
  }

  SUBCASE("streaming the full matrix matches dense products") {
    for (Index j = 0; j < k; ++j) sketch.update(x.col(j), j + 1);
    const Matrix omega = sketch.range_map().dense();
    const Matrix upsilon = sketch.corange_map().dense();
    const Matrix xi = sketch.core_left_map().dense();
    const Matrix psi = sketch.core_right_map().dense();
    CHECK((sketch.range_sketch() - x * omega.transpose()).norm() < 1e-12);
    CHECK((sketch.corange_sketch() - upsilon * x).norm() < 1e-12);
    CHECK((sketch.core_sketch() - xi * x * psi.transpose()).norm() < 1e-12);
  }

  SUBCASE("a single snapshot leaves later corange columns zero") {
    sketch.update(x.col(0), 1);
    CHECK(sketch.corange_sketch().rightCols(k - 1).norm() == 0.0);
  }

  SUBCASE("index misuse is rejected") {
    sketch.update(x.col(0), 1);
    CHECK_THROWS_AS(sketch.update(x.col(1), 1), DuplicateIndex);
    CHECK_THROWS_AS(sketch.update(x.col(1), 3), IndexOutOfRange);
    CHECK_THROWS_AS(sketch.update(x.col(1), 0), IndexOutOfRange);
    CHECK_THROWS_AS(sketch.update(x.col(1), k + 1), IndexOutOfRange);
  }
}

TEST_CASE("sketchy svd recovers an exactly low-rank matrix") {
  const Index n = 50, k = 40;
  const Vector u = random_vector(n, 21);
  const Vector v = random_vector(k, 22);
  const Matrix x = u * v.transpose();

  SketchySvd sketch(n, k, 1, 5);
  for (Index j = 0; j < k; ++j) sketch.push(x.col(j));
  const TruncatedSvd f = sketch.finalize(1);
  const Matrix recon = f.left * f.singular_values.asDiagonal() * f.right.transpose();
  CHECK((x - recon).norm() / x.norm() <= 1e-10);

  // Asking for more rank than the data carries is an error.
  CHECK_THROWS_AS(sketch.finalize(2), RankDeficientSketch);
}

TEST_CASE("sketchy svd of zero data returns a zero spectrum") {
  SketchySvd sketch(20, 15, 2, 3);
  for (Index j = 0; j < 15; ++j) sketch.push(Vector::Zero(20));
  const TruncatedSvd f = sketch.finalize(2);
  CHECK(f.singular_values.norm() == 0.0);
  CHECK(f.left.cols() == 2);
}

TEST_CASE("sketchy svd mean squared error satisfies the expected-error bound") {
  const Index n = 60, k = 50, r = 2;
  Vector sigmas = Vector::Zero(std::min(n, k));
  sigmas[0] = 10.0;
  sigmas[1] = 1.0;
  for (Index j = 2; j < sigmas.size(); ++j) sigmas[j] = 1e-8 * std::pow(0.5, j - 2);
  const Matrix x = matrix_with_spectrum(n, k, sigmas, 33);

  KahanSum err2;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    SketchySvd sketch(n, k, r, 1000 + s);
    for (Index j = 0; j < k; ++j) sketch.push(x.col(j));
    const TruncatedSvd f = sketch.finalize(r);
    const Matrix recon = f.left * f.singular_values.asDiagonal() * f.right.transpose();
    err2.add((x - recon).squaredNorm());
  }
  const double mean_err2 = err2.value() / seeds;
  const double bound = sketchy_error_bound_at(sigmas, 4 * r + 1, 2 * (4 * r + 1) + 1, 1);
  CHECK(mean_err2 <= 1.1 * bound);
}

TEST_CASE("streaming svd storage stays in its contracted class") {
  const Index n = 200, k = 500, r = 6;
  // Left-basis-only incremental path: O(n r) floats, independent of K.
  IncrementalSvd lean(n, r, /*track_right=*/false);
  for (Index j = 0; j < k; ++j) lean.push(random_vector(n, 100 + j));
  CHECK(lean.storage_floats() <= 4 * n * r);

  SketchySvd sketch(n, k, r, 9);
  for (Index j = 0; j < k; ++j) sketch.push(random_vector(n, 100 + j));
  const Index q = 4 * r + 1, s = 2 * q + 1;
  const Index zeta = std::min<Index>(q, 8);
  const Index formula = n * (q + zeta) + q * k + s * s;
  CHECK(sketch.storage_floats() <= 2 * formula);
}
