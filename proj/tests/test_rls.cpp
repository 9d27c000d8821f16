#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>

#include "srom/errors.hpp"
#include "srom/rls.hpp"
#include "srom/rng.hpp"

using namespace srom;

namespace {

Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  CounterRng rng(seed, 13);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = 2.0 * rng.next_unit() - 1.0;
  return m;
}

/// Oracle: explicit normal equations (D^T D + Gamma)^{-1} D^T R.
Matrix normal_equation_solve(const Matrix& d, const Matrix& r, const Vector& gamma) {
  const Matrix lhs = d.transpose() * d + Matrix(gamma.asDiagonal());
  return lhs.ldlt().solve(d.transpose() * r);
}

Matrix augment_data(const Matrix& d, const Vector& gamma) {
  Matrix dbar(d.rows() + d.cols(), d.cols());
  dbar.topRows(d.rows()) = d;
  dbar.bottomRows(d.cols()).setZero();
  dbar.bottomRows(d.cols()).diagonal() = gamma.cwiseSqrt();
  return dbar;
}

Matrix augment_rhs(const Matrix& r, Index d) {
  Matrix rbar(r.rows() + d, r.cols());
  rbar.topRows(r.rows()) = r;
  rbar.bottomRows(d).setZero();
  return rbar;
}

}  // namespace

TEST_CASE("rls initialization inverts the penalty diagonal") {
  const Rls tiny(Regularizer::uniform(1e-9, 3), 3, 1);
  CHECK((tiny.inverse_correlation() - 1e9 * Matrix::Identity(3, 3)).norm() < 1e-3);

  const Rls unit(Regularizer::uniform(1.0, 4), 4, 2);
  CHECK((unit.inverse_correlation() - Matrix::Identity(4, 4)).norm() == 0.0);

  const Rls blocks(Regularizer{2.0, 8.0, 2, 1}, 3, 1);
  Vector expected(3);
  expected << 0.5, 0.5, 0.125;
  CHECK((blocks.inverse_correlation() - Matrix(expected.asDiagonal())).norm() == 0.0);

  CHECK_THROWS_AS(Regularizer(0.0, 1.0, 2, 1), NonpositiveGamma);
  CHECK_THROWS_AS(Regularizer(1.0, -2.0, 2, 1), NonpositiveGamma);
}

TEST_CASE("a single rls update matches the closed-form ridge solution") {
  Rls rls(Regularizer::uniform(1e-9, 2), 2, 1);
  RowVector d(2), r(1);
  d << 1, 0;
  r << 2;
  rls.update(d, r);
  CHECK(rls.estimate()(0, 0) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(std::abs(rls.estimate()(1, 0)) < 1e-12);
}

TEST_CASE("zero regressor rows leave the state unchanged") {
  Rls rls(Regularizer::uniform(0.5, 3), 3, 2);
  const Matrix p0 = rls.inverse_correlation();
  RowVector d = RowVector::Zero(3), r(2);
  r << 1, -1;
  rls.update(d, r);
  CHECK(rls.rows_processed() == 1);
  CHECK((rls.inverse_correlation() - p0).norm() == 0.0);
  CHECK(rls.estimate().norm() == 0.0);

  InverseQrRls iqr(Regularizer::uniform(0.5, 3), 3, 2);
  const Matrix pt0 = iqr.sqrt_factor_transposed();
  iqr.update(d, r);
  CHECK((iqr.sqrt_factor_transposed() - pt0).norm() == 0.0);
  CHECK(iqr.estimate().norm() == 0.0);
}

TEST_CASE("recursive estimates converge to the batch solution") {
  const Index d = 6, r = 2, k = 50;
  const Matrix data = random_matrix(k, d, 17);
  const Matrix rhs = random_matrix(k, r, 18);
  // Moderate penalty: at 1e-9 the plain recursion visibly loses digits to
  // cancellation (the square-root variant exists for exactly that reason).
  const Regularizer reg = Regularizer::uniform(1e-6, d);
  const Vector gamma = reg.diagonal();

  Rls rls(reg, d, r);
  InverseQrRls iqr(reg, d, r);
  for (Index i = 0; i < k; ++i) {
    rls.update(data.row(i), rhs.row(i));
    iqr.update(data.row(i), rhs.row(i));
  }
  const Matrix oracle = normal_equation_solve(data, rhs, gamma);
  const Matrix batch = batch_ls(augment_data(data, gamma), augment_rhs(rhs, d));

  CHECK((rls.estimate() - oracle).norm() / oracle.norm() < 1e-8);
  CHECK((iqr.estimate() - oracle).norm() / oracle.norm() < 1e-8);
  CHECK((iqr.estimate() - rls.estimate()).norm() / rls.estimate().norm() < 1e-9);
  CHECK((batch - oracle).norm() / oracle.norm() < 1e-10);
}

TEST_CASE("batch equivalence holds across sizes for both recursive variants") {
  for (const auto& [d, k, seed] : {std::tuple<Index, Index, int>{5, 40, 1},
                                   {17, 200, 2},
                                   {40, 500, 3}}) {
    const Matrix data = random_matrix(k, d, static_cast<std::uint64_t>(100 + seed));
    const Matrix rhs = random_matrix(k, 3, static_cast<std::uint64_t>(200 + seed));
    const Regularizer reg = Regularizer::uniform(1e-6, d);

    Rls rls(reg, d, 3);
    InverseQrRls iqr(reg, d, 3, InverseQrRls::Storage::kPacked);
    for (Index i = 0; i < k; ++i) {
      rls.update(data.row(i), rhs.row(i));
      iqr.update(data.row(i), rhs.row(i));
    }
    const Matrix batch =
        batch_ls(augment_data(data, reg.diagonal()), augment_rhs(rhs, d));
    CHECK((rls.estimate() - batch).norm() / batch.norm() < 1e-8);
    CHECK((iqr.estimate() - batch).norm() / batch.norm() < 1e-8);

    // The inverse correlation matrix stays positive definite along the way.
    Eigen::SelfAdjointEigenSolver<Matrix> eig(rls.inverse_correlation());
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("square-root initialization reconstructs the inverse penalty") {
  InverseQrRls four(Regularizer::uniform(4.0, 3), 3, 1);
  CHECK((four.sqrt_factor_transposed() - 0.5 * Matrix::Identity(3, 3)).norm() == 0.0);

  InverseQrRls tiny(Regularizer::uniform(1e-9, 2), 2, 1);
  CHECK(tiny.sqrt_factor_transposed()(0, 0) == doctest::Approx(31622.776601683792).epsilon(1e-12));

  InverseQrRls blocks(Regularizer{2.0, 8.0, 2, 2}, 4, 1);
  const Matrix pt = blocks.sqrt_factor_transposed();
  const Matrix expected = Regularizer{2.0, 8.0, 2, 2}.inverse_diagonal().asDiagonal();
  CHECK((pt.transpose() * pt - expected).norm() < 1e-12);
}

TEST_CASE("square-root factor keeps an exactly zero strict lower triangle") {
  const Index d = 7;
  InverseQrRls iqr(Regularizer::uniform(0.1, d), d, 2);
  for (Index i = 0; i < 25; ++i)
    iqr.update(random_matrix(1, d, 300 + i), random_matrix(1, 2, 400 + i));
  const Matrix pt = iqr.sqrt_factor_transposed();
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < i; ++j) CHECK(pt(i, j) == 0.0);
}

TEST_CASE("packed and dense square-root storage produce identical streams") {
  const Index d = 9, k = 40;
  const Matrix data = random_matrix(k, d, 55);
  const Matrix rhs = random_matrix(k, 2, 56);
  InverseQrRls dense(Regularizer::uniform(1e-6, d), d, 2, InverseQrRls::Storage::kDense);
  InverseQrRls packed(Regularizer::uniform(1e-6, d), d, 2, InverseQrRls::Storage::kPacked);
  for (Index i = 0; i < k; ++i) {
    dense.update(data.row(i), rhs.row(i));
    packed.update(data.row(i), rhs.row(i));
  }
  CHECK((dense.estimate() - packed.estimate()).norm() == 0.0);
  CHECK((dense.sqrt_factor_transposed() - packed.sqrt_factor_transposed()).norm() == 0.0);
  // Packed mode stores about half the triangle.
  CHECK(packed.storage_floats() < dense.storage_floats());
}

TEST_CASE("square-root updates stay better conditioned than plain updates") {
  // Nearly collinear regressors with a huge dynamic range: condition >= 1e8.
  const Index d = 8, k = 120;
  const Vector base = random_matrix(d, 1, 71).col(0).normalized();
  Matrix data(k, d);
  for (Index i = 0; i < k; ++i)
    data.row(i) = (1e4 * base + 1e-4 * random_matrix(d, 1, 900 + i).col(0)).transpose();
  Eigen::JacobiSVD<Matrix> svd(data);
  CHECK(svd.singularValues()(0) / svd.singularValues()(d - 1) >= 1e8);
  const Matrix rhs = random_matrix(k, 1, 72);
  const Regularizer reg = Regularizer::uniform(1e-6, d);

  Rls rls(reg, d, 1);
  InverseQrRls iqr(reg, d, 1);
  for (Index i = 0; i < k; ++i) {
    rls.update(data.row(i), rhs.row(i));
    iqr.update(data.row(i), rhs.row(i));
  }
  const Matrix oracle =
      batch_ls(augment_data(data, reg.diagonal()), augment_rhs(rhs, d));
  const double err_rls = (rls.estimate() - oracle).norm();
  const double err_iqr = (iqr.estimate() - oracle).norm();
  CHECK(err_iqr <= err_rls);
}

TEST_CASE("square-root update work scales quadratically in the feature count") {
  std::vector<std::uint64_t> ops;
  for (const Index d : {8, 16, 32, 64}) {
    InverseQrRls iqr(Regularizer::uniform(1.0, d), d, 1);
    std::uint64_t total = 0;
    for (Index i = 0; i < 10; ++i) {
      iqr.update(random_matrix(1, d, 600 + i), random_matrix(1, 1, 700 + i));
      total += iqr.last_update_ops();
    }
    ops.push_back(total);
  }
  for (std::size_t t = 1; t < ops.size(); ++t) {
    const double ratio = static_cast<double>(ops[t]) / static_cast<double>(ops[t - 1]);
    CHECK(ratio < 6.0);  // quadratic doubles to ~4x; cubic would be ~8x
    CHECK(ratio > 2.5);
  }
}

TEST_CASE("batch solver basics") {
  const Matrix eye = Matrix::Identity(5, 5);
  const Matrix rhs = random_matrix(5, 2, 81);
  CHECK((batch_ls(eye, rhs) - rhs).norm() < 1e-14);

  // Ridge limit: growing penalties shrink the solution monotonically.
  const Matrix data = random_matrix(30, 5, 82);
  const Matrix r = random_matrix(30, 2, 83);
  double last_norm = std::numeric_limits<double>::infinity();
  for (const double g : {1e-6, 1e-2, 1.0, 1e2, 1e6}) {
    const Vector gamma = Vector::Constant(5, g);
    const Matrix sol = batch_ls(augment_data(data, gamma), augment_rhs(r, 5));
    CHECK(sol.norm() < last_norm);
    last_norm = sol.norm();
  }

  const Vector gamma = Vector::Constant(5, 0.37);
  const Matrix sol = batch_ls(augment_data(data, gamma), augment_rhs(r, 5));
  CHECK((sol - normal_equation_solve(data, r, gamma)).norm() < 1e-10);

  // Rank deficiency without the penalty rows is detected.
  Matrix deficient = data;
  deficient.col(4) = deficient.col(3);
  CHECK_THROWS_AS(batch_ls(deficient, r), RankDeficient);
}

TEST_CASE("streaming operator error and its recursive identity") {
  const Index d = 5, k = 60;
  const Matrix data = random_matrix(k, d, 91);
  const Matrix rhs = random_matrix(k, 2, 92);
  const Regularizer reg = Regularizer::uniform(1e-6, d);
  const Matrix batch = batch_ls(augment_data(data, reg.diagonal()), augment_rhs(rhs, d));

  CHECK(streaming_operator_error(batch, batch).norm() == 0.0);
  CHECK_THROWS_AS(streaming_operator_error(batch, Matrix::Zero(2, 2)), DimensionMismatch);

  Rls rls(reg, d, 2);
  Matrix previous_error = batch;  // SOE(0) = batch - 0
  for (Index i = 0; i < k; ++i) {
    rls.update(data.row(i), rhs.row(i));
    const Matrix soe = streaming_operator_error(batch, rls.estimate());
    const Matrix predicted = previous_error - rls.last_gain() * rls.last_apriori_error();
    CHECK((soe - predicted).norm() < 1e-10);
    previous_error = soe;
  }
  // Noise-free stream: the final estimate reproduces the batch solution.
  CHECK(streaming_operator_error(batch, rls.estimate()).norm() <= 1e-8 * batch.norm());
}
