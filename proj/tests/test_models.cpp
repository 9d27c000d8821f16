#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <unsupported/Eigen/MatrixFunctions>

#include "srom/errors.hpp"
#include "srom/metrics.hpp"
#include "srom/models.hpp"
#include "srom/opinf.hpp"
#include "srom/rng.hpp"

using namespace srom;

namespace {

constexpr double kPi = std::numbers::pi;

Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  CounterRng rng(seed, 37);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = 2.0 * rng.next_unit() - 1.0;
  return m;
}

Matrix random_orthonormal(Index rows, Index cols, std::uint64_t seed) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(rows, rows, seed));
  return qr.householderQ() * Matrix::Identity(rows, cols);
}

InputSignal zero_input() {
  return [](double, Index) { return Vector::Zero(1); };
}

}  // namespace

TEST_CASE("burgers operators have the advertised shapes") {
  const FullModel model = burgers_model(128, 0.1);
  CHECK(model.A1.rows() == 128);
  CHECK(model.A1.cols() == 128);
  CHECK(model.A2.rows() == 128);
  CHECK(model.A2.cols() == 128 * 128);
  CHECK(model.B.rows() == 128);
  CHECK(model.B.cols() == 1);

  // Diffusion block is symmetric negative definite.
  const Matrix a1 = Matrix(model.A1);
  CHECK((a1 - a1.transpose()).norm() == 0.0);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a1);
  CHECK(eig.eigenvalues().maxCoeff() < 0.0);

  // Advection of a constant profile vanishes away from the boundary rows.
  const Vector constant = Vector::Constant(128, 0.8);
  const Vector adv = model.apply_quadratic(constant);
  CHECK(adv.segment(1, 126).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(std::abs(adv[0]) > 0.0);
}

TEST_CASE("the linear sub-problem reproduces the heat-equation series solution") {
  const Index n = 128;
  const double mu = 0.5;
  FullModel model = burgers_model(n, mu);
  model.quad.clear();  // advection off: pure diffusion with zero boundary input
  const double h = 1.0 / static_cast<double>(n + 1);

  Vector x0(n), exact(n);
  const double t_final = 0.1;
  for (Index i = 0; i < n; ++i) {
    const double w = h * static_cast<double>(i + 1);
    x0[i] = std::sin(kPi * w) + 0.3 * std::sin(3.0 * kPi * w);
    exact[i] = std::exp(-mu * kPi * kPi * t_final) * std::sin(kPi * w) +
               0.3 * std::exp(-mu * 9.0 * kPi * kPi * t_final) * std::sin(3.0 * kPi * w);
  }
  const Trajectory traj = simulate_burgers(model, x0, zero_input(), 1e-5, t_final);
  CHECK((traj.states.rightCols(1).col(0) - exact).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("burgers trajectories dissipate energy without forcing") {
  const Index n = 64;
  const FullModel model = burgers_model(n, 1.0);
  const Trajectory traj =
      simulate_burgers(model, burgers_initial_condition(n), zero_input(), 1e-4, 0.2);
  CHECK(traj.states.col(0).norm() > 0.0);
  for (Index k = 1; k < traj.states.cols(); ++k)
    CHECK(traj.states.col(k).norm() <= traj.states.col(k - 1).norm() + 1e-14);

  SUBCASE("zero initial condition and input stay zero") {
    const Trajectory rest =
        simulate_burgers(model, Vector::Zero(n), zero_input(), 1e-3, 0.05);
    CHECK(rest.states.norm() == 0.0);
  }
}

TEST_CASE("the published setup yields 10001 snapshots per parameter value") {
  const Index n = 128;
  const FullModel model = burgers_model(n, 0.3);
  const InputSignal input = [](double, Index step) {
    CounterRng rng(7, static_cast<std::uint64_t>(step));
    Vector u(1);
    u[0] = rng.next_unit();
    return u;
  };
  const Trajectory traj =
      simulate_burgers(model, burgers_initial_condition(n), input, 1e-4, 1.0);
  CHECK(traj.states.cols() == 10001);
  CHECK(traj.finite);
}

TEST_CASE("kse operators are circulant and conservative") {
  const Index n = 64;
  const FullModel model = kse_model(n, 22.0);
  const Matrix a1 = Matrix(model.A1);
  // Circulant structure: every row is a rotation of the first.
  for (Index i = 1; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      CHECK(a1(i, j) == doctest::Approx(a1(0, ((j - i) % n + n) % n)).epsilon(1e-15));

  SUBCASE("zero stays zero") {
    const Trajectory rest = simulate_kse(model, Vector::Zero(n), 1e-3, 0.05);
    CHECK(rest.states.norm() == 0.0);
  }

  SUBCASE("the spatial mean is conserved") {
    const Vector x0 = kse_initial_condition(n, 22.0, 0.7, 0.5);
    const double t_final = 2.0;
    const Trajectory traj = simulate_kse(model, x0, 1e-3, t_final);
    const double mean0 = traj.states.col(0).mean();
    const double drift =
        std::abs(traj.states.rightCols(1).col(0).mean() - mean0) / t_final;
    CHECK(drift < 1e-10);
  }
}

TEST_CASE("kse downsampling keeps every stored snapshot paired with a derivative") {
  const Index n = 32;
  const FullModel model = kse_model(n, 22.0);
  const Vector x0 = kse_initial_condition(n, 22.0, 0.2, 0.1);
  const Trajectory traj = simulate_kse(model, x0, 1e-3, 1.0, 100);
  CHECK(traj.states.cols() == 11);  // fine steps 0, 100, ..., 1000
  CHECK(traj.derivatives.cols() == 11);
  CHECK(traj.times[1] == doctest::Approx(0.1));
  // Stored derivatives are fine-step forward differences, not zero.
  CHECK(traj.derivatives.col(0).norm() > 0.0);
}

TEST_CASE("galerkin projection identities") {
  const Index n = 24;
  const FullModel model = burgers_model(n, 0.4);

  SUBCASE("identity basis returns the full operators") {
    const ReducedModel rom = intrusive_galerkin(Matrix::Identity(n, n), model);
    CHECK((rom.A1 - Matrix(model.A1)).norm() < 1e-12);
    CHECK((rom.B - Matrix(model.B)).norm() < 1e-12);
    const Vector x = random_matrix(n, 1, 3).col(0);
    CHECK((rom.quadratic(x) - model.apply_quadratic(x)).norm() < 1e-12);
  }

  SUBCASE("a single canonical mode extracts the matching entry") {
    Matrix e1 = Matrix::Zero(n, 1);
    e1(0, 0) = 1.0;
    const ReducedModel rom = intrusive_galerkin(e1, model);
    CHECK(rom.A1(0, 0) == doctest::Approx(Matrix(model.A1)(0, 0)));
  }

  SUBCASE("reduced rhs equals the projected full rhs") {
    const Matrix basis = random_orthonormal(n, 5, 9);
    const ReducedModel rom = intrusive_galerkin(basis, model);
    for (int trial = 0; trial < 4; ++trial) {
      const Vector xhat = random_matrix(5, 1, 20 + trial).col(0);
      const Vector u = random_matrix(1, 1, 30 + trial).col(0);
      const Vector full_rhs = model.rhs(basis * xhat, u);
      CHECK((rom.rhs(xhat, u) - basis.transpose() * full_rhs).norm() < 1e-12);
    }
  }
}

TEST_CASE("reduced-model integration basics") {
  SUBCASE("a zero model holds the state constant") {
    ReducedModel zero;
    zero.A1 = Matrix::Zero(3, 3);
    zero.A2 = Matrix::Zero(3, 9);
    zero.B = Matrix(3, 0);
    const Vector x0 = random_matrix(3, 1, 40).col(0);
    const Trajectory traj = integrate_rom(zero, x0, InputSignal(), 0.1, 1.0,
                                          TimeScheme::kRk4);
    for (Index k = 0; k < traj.states.cols(); ++k)
      CHECK((traj.states.col(k) - x0).norm() == 0.0);
  }

  SUBCASE("scalar decay matches the exponential") {
    ReducedModel decay;
    decay.A1 = Matrix::Constant(1, 1, -1.0);
    decay.A2 = Matrix::Zero(1, 1);
    decay.B = Matrix(1, 0);
    const Vector x0 = Vector::Constant(1, 0.8);
    const Trajectory traj =
        integrate_rom(decay, x0, InputSignal(), 0.01, 1.0, TimeScheme::kRk4);
    CHECK(traj.states.rightCols(1)(0, 0) ==
          doctest::Approx(0.8 * std::exp(-1.0)).epsilon(1e-8));
  }

  SUBCASE("blow-up is reported through the trajectory, not thrown") {
    ReducedModel unstable;
    unstable.A1 = Matrix::Constant(1, 1, 100.0);
    unstable.A2 = Matrix::Constant(1, 1, 50.0);
    unstable.B = Matrix(1, 0);
    const Trajectory traj = integrate_rom(unstable, Vector::Constant(1, 1.0),
                                          InputSignal(), 0.5, 400.0, TimeScheme::kRk4);
    CHECK_FALSE(traj.finite);
    CHECK(traj.first_nonfinite > 0);
    CHECK(traj.states.cols() < 801);
  }
}

TEST_CASE("time integrators converge at their nominal orders") {
  // Manufactured linear problem with a known flow map.
  const Index r = 4;
  Matrix a = random_matrix(r, r, 50);
  a = -(a * a.transpose()) / r - 0.5 * Matrix::Identity(r, r);
  ReducedModel model;
  model.A1 = a;
  model.A2 = Matrix::Zero(r, r * r);
  model.B = Matrix(r, 0);
  const Vector x0 = random_matrix(r, 1, 51).col(0);
  const double t_final = 1.0;
  const Vector exact = (a * t_final).exp() * x0;

  const auto final_error = [&](TimeScheme scheme, double dt) {
    const Trajectory traj = integrate_rom(model, x0, InputSignal(), dt, t_final, scheme);
    return (traj.states.rightCols(1).col(0) - exact).norm();
  };
  const auto observed_order = [&](TimeScheme scheme, double dt) {
    return std::log2(final_error(scheme, dt) / final_error(scheme, dt / 2.0));
  };

  CHECK(observed_order(TimeScheme::kSemiImplicitEuler, 1e-2) ==
        doctest::Approx(1.0).epsilon(0.3));
  CHECK(observed_order(TimeScheme::kCnab2, 1e-2) == doctest::Approx(2.0).epsilon(0.15));
  CHECK(observed_order(TimeScheme::kRk4, 5e-2) == doctest::Approx(4.0).epsilon(0.075));

  // The full-order schemes inherit the same orders; check the semi-implicit
  // pair on the diffusion sub-problem against a tighter reference.
  const Index n = 48;
  FullModel heat = burgers_model(n, 0.7);
  heat.quad.clear();
  const Vector h0 = burgers_initial_condition(n);
  const Trajectory fine = simulate_burgers(heat, h0, zero_input(), 1e-5, 0.1);
  const Vector ref = fine.states.rightCols(1).col(0);
  const auto burgers_err = [&](double dt) {
    const Trajectory traj = simulate_burgers(heat, h0, zero_input(), dt, 0.1);
    return (traj.states.rightCols(1).col(0) - ref).norm();
  };
  const double slope = std::log2(burgers_err(2e-3) / burgers_err(1e-3));
  CHECK(slope == doctest::Approx(1.0).epsilon(0.3));
}

TEST_CASE("galerkin rom tracks the projected full trajectory on short horizons") {
  const Index n = 64;
  const FullModel model = burgers_model(n, 0.6);
  const InputSignal one = [](double, Index) { return Vector::Constant(1, 1.0); };
  const Trajectory full = simulate_burgers(model, burgers_initial_condition(n), one,
                                           1e-4, 0.2);

  // POD basis of the trajectory itself.
  Eigen::JacobiSVD<Matrix> svd(full.states, Eigen::ComputeThinU);
  const Matrix basis = svd.matrixU().leftCols(10);
  const ReducedModel rom = intrusive_galerkin(basis, model);
  const Trajectory reduced =
      integrate_rom(rom, basis.transpose() * full.states.col(0), one, 1e-4, 0.2,
                    TimeScheme::kSemiImplicitEuler);
  REQUIRE(reduced.finite);
  const double err = (full.states - basis * reduced.states).norm() / full.states.norm();
  CHECK(err < 5e-3);
}

TEST_CASE("intrusive rom at the published scale beats one percent state error") {
  const Index n = 128;
  const FullModel model = burgers_model(n, 0.1);
  const InputSignal train = [](double, Index step) {
    CounterRng rng(99, static_cast<std::uint64_t>(step));
    Vector u(1);
    u[0] = rng.next_unit();
    return u;
  };
  const Trajectory data =
      simulate_burgers(model, burgers_initial_condition(n), train, 1e-4, 1.0);

  Eigen::JacobiSVD<Matrix> svd(data.states, Eigen::ComputeThinU);
  const Matrix basis = svd.matrixU().leftCols(14);
  const ReducedModel rom = intrusive_galerkin(basis, model);

  const InputSignal one = [](double, Index) { return Vector::Constant(1, 1.0); };
  const Trajectory reference =
      simulate_burgers(model, burgers_initial_condition(n), one, 1e-4, 1.0);
  const Trajectory reduced =
      integrate_rom(rom, basis.transpose() * reference.states.col(0), one, 1e-4, 1.0,
                    TimeScheme::kSemiImplicitEuler);
  REQUIRE(reduced.finite);
  CHECK(final_rse(reference.states, reduced.states, basis) < 1e-2);
}
