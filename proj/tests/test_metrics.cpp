#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>

#include "srom/errors.hpp"
#include "srom/lyapunov.hpp"
#include "srom/metrics.hpp"
#include "srom/models.hpp"
#include "srom/rng.hpp"

using namespace srom;

namespace {

Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  CounterRng rng(seed, 53);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = 2.0 * rng.next_unit() - 1.0;
  return m;
}

Matrix random_orthonormal(Index rows, Index cols, std::uint64_t seed) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(rows, rows, seed));
  return qr.householderQ() * Matrix::Identity(rows, cols);
}

}  // namespace

TEST_CASE("subspace angle error on canonical configurations") {
  const Index n = 12, r = 3;
  const Matrix v = random_orthonormal(n, r, 1);
  CHECK(subspace_angle_error(v, v) == doctest::Approx(0.0).epsilon(1e-12));

  // Orthogonal rotations of the same columns leave the subspace unchanged.
  const Matrix q = random_orthonormal(r, r, 2);
  CHECK(subspace_angle_error(v, v * q) < 1e-12);

  Matrix ea = Matrix::Zero(n, r), eb = Matrix::Zero(n, r);
  for (Index j = 0; j < r; ++j) {
    ea(j, j) = 1.0;
    eb(r + j, j) = 1.0;
  }
  CHECK(subspace_angle_error(ea, eb) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));

  // Matches the projector-difference definition on random pairs.
  const Matrix w = random_orthonormal(n, r, 3);
  const double via_projectors =
      (v * v.transpose() - w * w.transpose()).norm() / std::sqrt(2.0);
  CHECK(subspace_angle_error(v, w) == doctest::Approx(via_projectors).epsilon(1e-10));

  CHECK_THROWS(subspace_angle_error(random_matrix(n, r, 4), w));
}

TEST_CASE("subspace angle error behaves like a metric") {
  const Index n = 10, r = 2;
  const Matrix a = random_orthonormal(n, r, 11);
  const Matrix b = random_orthonormal(n, r, 12);
  const Matrix c = random_orthonormal(n, r, 13);
  const double ab = subspace_angle_error(a, b);
  const double ba = subspace_angle_error(b, a);
  CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
  CHECK(subspace_angle_error(a, c) <= ab + subspace_angle_error(b, c) + 1e-12);
  CHECK(ab > 0.0);
}

TEST_CASE("relative projection error") {
  const Index n = 20, k = 30, r = 4;
  const Matrix basis = random_orthonormal(n, r, 21);

  // Data inside the span projects exactly.
  const Matrix inside = basis * random_matrix(r, k, 22);
  CHECK(relative_projection_error(inside, basis) < 1e-12);

  // Data orthogonal to the span is entirely residual.
  Matrix complement = random_matrix(n, k, 23);
  complement -= basis * (basis.transpose() * complement);
  CHECK(relative_projection_error(complement, basis) == doctest::Approx(1.0).epsilon(1e-10));

  // Streaming accumulation agrees with the dense projector.
  const Matrix x = random_matrix(n, k, 24);
  const Matrix dense_resid = x - basis * (basis.transpose() * x);
  CHECK(relative_projection_error(x, basis) ==
        doctest::Approx(dense_resid.norm() / x.norm()).epsilon(1e-12));
}

TEST_CASE("mean relative streaming operator error") {
  const Matrix a = random_matrix(6, 3, 31);
  const Matrix b = random_matrix(6, 3, 32);
  CHECK(mr_soe({a, b}, {a, b}) == 0.0);

  // M = 1 reduces to the single-parameter error scaled by 1/(d r).
  const double expected = (a - b).norm() / (6.0 * 3.0 * a.norm());
  CHECK(mr_soe({a}, {b}) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("mean relative streaming state error") {
  const Index n = 14, r = 3, k = 9;
  const Matrix basis = random_orthonormal(n, r, 41);
  const Matrix full = random_matrix(n, k, 42);

  // A rom trajectory equal to the projection of the truth scores exactly the
  // relative projection error.
  const Matrix projected = basis.transpose() * full;
  CHECK(mr_sse({full}, {projected}, basis) ==
        doctest::Approx(relative_projection_error(full, basis)).epsilon(1e-12));

  // Identical (representable) trajectories score zero.
  const Matrix representable = basis * projected;
  CHECK(mr_sse({representable}, {projected}, basis) < 1e-12);

  // Truncated trajectories (blow-up) contribute +inf.
  CHECK(std::isinf(mr_sse({full}, {Matrix::Zero(r, k - 1)}, basis)));
}

TEST_CASE("kaplan-yorke dimension") {
  Vector a(2);
  a << 1.0, -2.0;
  CHECK(kaplan_yorke(a) == doctest::Approx(1.5));

  Vector stable(2);
  stable << -1.0, -2.0;
  CHECK(kaplan_yorke(stable) == 0.0);

  Vector three(3);
  three << 2.0, 1.0, -6.0;
  CHECK(kaplan_yorke(three) == doctest::Approx(2.5));

  Vector undefined(2);
  undefined << 1.0, -0.5;
  CHECK_THROWS_AS(kaplan_yorke(undefined), UndefinedDimension);

  // Raising lambda_{j+1} toward zero increases the dimension.
  double last = 0.0;
  for (const double tail : {-6.0, -4.5, -3.8, -3.2}) {
    Vector lam(3);
    lam << 2.0, 1.0, tail;
    const double ky = kaplan_yorke(lam);
    CHECK(ky > last);
    last = ky;
  }
}

TEST_CASE("lyapunov exponents of a stable diagonal system") {
  ReducedModel model;
  Vector rates(2);
  rates << -1.0, -2.0;
  model.A1 = rates.asDiagonal();
  model.A2 = Matrix::Zero(2, 4);
  model.B = Matrix(2, 0);

  LyapunovOptions opts;
  opts.exponent_count = 2;
  opts.t_total = 100.0;
  opts.t_transient = 10.0;
  opts.dt = 0.01;
  opts.renorm_interval = 10;
  const Vector lam =
      lyapunov_spectrum(model, Vector::Constant(2, 0.5), opts, TimeScheme::kRk4);
  CHECK(lam[0] == doctest::Approx(-1.0).epsilon(1e-3));
  CHECK(lam[1] == doctest::Approx(-2.0).epsilon(1e-3));
}

TEST_CASE("the leading exponent at a fixed point is the dominant eigenvalue") {
  // Nonnormal upper-triangular Jacobian; the state starts at the fixed point
  // x = 0 so the tangent dynamics are exactly linear.
  ReducedModel model;
  model.A1.resize(2, 2);
  model.A1 << -1.0, 5.0, 0.0, -2.0;
  model.A2 = Matrix::Zero(2, 4);
  model.B = Matrix(2, 0);

  LyapunovOptions opts;
  opts.exponent_count = 1;
  opts.t_total = 200.0;
  opts.t_transient = 20.0;
  opts.dt = 0.01;
  opts.renorm_interval = 10;
  const Vector lam = lyapunov_spectrum(model, Vector::Zero(2), opts, TimeScheme::kRk4);
  CHECK(lam[0] == doctest::Approx(-1.0).epsilon(2e-2));
}

TEST_CASE("kse exponents flag chaos and dissipation") {
  // Desk-size grid: n = 64 resolves the L = 22 dynamics well enough for the
  // sign structure of the spectrum.
  const Index n = 64;
  const FullModel model = kse_model(n, 22.0);
  LyapunovOptions opts;
  opts.exponent_count = 10;
  opts.t_total = 260.0;
  opts.t_transient = 60.0;
  opts.dt = 1e-3;
  opts.renorm_interval = 10;
  const Vector lam =
      lyapunov_spectrum(model, kse_initial_condition(n, 22.0, 0.7, 0.5), opts);
  CHECK(lam[0] > 0.0);
  CHECK(lam.sum() < 0.0);
  for (Index i = 1; i < lam.size(); ++i) CHECK(lam[i] <= lam[i - 1] + 1e-12);
}

TEST_CASE("bound evaluators vanish with their perturbations") {
  CHECK(bound_rhs_projection(3.0, 2.0, 1e-6, 0.0, std::sqrt(2.0), 10.0) == 0.0);
  CHECK(bound_rhs_reformulation(3.0, 2.0, 1e-6, 0.0, 0.0, std::sqrt(2.0), 10.0, 4) == 0.0);
  CHECK(bound_beta1(2.0, 1.0, 100, 50) ==
        doctest::Approx(2.0 * std::sqrt(16.0 + 4.0 + 1.0 + 100.0) * std::sqrt(50.0)));
  const double b2 = bound_beta2(2.0, 0.1, 4);
  CHECK(b2 == doctest::Approx(2.0 * 2.1 * std::sqrt(1.0 + 4.1 * 4.1)));
}

TEST_CASE("memory accounting reproduces the published burgers figures") {
  MemoryBudget budget;
  budget.paradigm = Paradigm::kRls;
  budget.svd_method = SvdMethod::kSketchy;
  budget.n = 128;
  budget.K = 100010;
  budget.r = 14;
  budget.m = 1;
  budget.derive_sketch_sizes();
  CHECK(budget.q == 57);
  CHECK(budget.zeta == 8);
  budget.d = operator_dimension(14, 1, false, true);
  CHECK(budget.d == 120);

  const MemoryCost batch = batch_memory_cost(budget);
  CHECK(batch.svd_floats == doctest::Approx(1.28e7).epsilon(5e-3));

  MemoryBudget ls_budget = budget;
  ls_budget.K = 10001;  // regression per parameter value
  const MemoryCost stream{streaming_memory_cost(budget).svd_floats,
                          streaming_memory_cost(ls_budget).ls_floats};
  CHECK(stream.svd_floats == doctest::Approx(8.32e3).epsilon(5e-3));
  CHECK(stream.ls_floats == doctest::Approx(1.44e4).epsilon(5e-3));

  const MemoryCost batch_total{batch.svd_floats, batch_memory_cost(ls_budget).ls_floats};
  CHECK(batch_total.ls_floats == doctest::Approx(1.21e6).epsilon(5e-3));
  const double reduction = memory_reduction(stream, batch_total);
  CHECK(reduction >= 0.998);
  CHECK(reduction == doctest::Approx(0.9984).epsilon(1e-3));
}

TEST_CASE("memory accounting stays positive with no retained modes") {
  MemoryBudget budget;
  budget.paradigm = Paradigm::kRls;
  budget.svd_method = SvdMethod::kIncremental;
  budget.n = 100;
  budget.K = 1000;
  budget.r = 0;
  budget.m = 3;
  budget.q = 1;
  budget.zeta = 1;
  budget.d = operator_dimension(0, 3, true, false);
  CHECK(budget.d == 4);
  CHECK(streaming_memory_cost(budget).ls_floats > 0.0);
  CHECK(batch_memory_cost(budget).total() > 0.0);
}
