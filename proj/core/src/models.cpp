#include "srom/models.hpp"

#include <Eigen/LU>
#include <cmath>
#include <numbers>
#include <vector>

#include "srom/banded.hpp"
#include "srom/errors.hpp"

namespace srom {

namespace {

constexpr double kPi = std::numbers::pi;

bool all_finite(ConstVectorRef x) { return x.allFinite(); }

Index step_count(double dt, double t_final) {
  if (!(dt > 0.0) || !(t_final > 0.0))
    throw DimensionMismatch("time integration: dt and horizon must be positive");
  return static_cast<Index>(std::llround(t_final / dt));
}

// Accumulates symmetrized Kronecker-pair entries for A2.
struct QuadBuilder {
  Index n;
  std::vector<Eigen::Triplet<double>> triplets;

  void add(Index row, Index a, Index b, double value) {
    if (a == b) {
      triplets.emplace_back(row, a * n + b, value);
    } else {
      triplets.emplace_back(row, a * n + b, 0.5 * value);
      triplets.emplace_back(row, b * n + a, 0.5 * value);
    }
  }

  Eigen::SparseMatrix<double> build(Index rows) {
    Eigen::SparseMatrix<double> a2(rows, rows * rows);
    a2.setFromTriplets(triplets.begin(), triplets.end());
    return a2;
  }
};

}  // namespace

Vector FullModel::apply_quadratic(ConstVectorRef x) const {
  Vector y = Vector::Zero(n);
  for (const QuadTerm& t : quad) y[t.row] += t.value * x[t.a] * x[t.b];
  return y;
}

Vector FullModel::apply_quadratic_bilinear(ConstVectorRef x, ConstVectorRef v) const {
  Vector y = Vector::Zero(n);
  for (const QuadTerm& t : quad)
    y[t.row] += t.value * (x[t.a] * v[t.b] + v[t.a] * x[t.b]);
  return y;
}

Vector FullModel::rhs(ConstVectorRef x, ConstVectorRef u) const {
  Vector y = A1 * x + apply_quadratic(x);
  if (m > 0) {
    if (u.size() != m) throw DimensionMismatch("full model: input length mismatch");
    y += B * u;
  }
  return y;
}

Vector FullModel::rhs(ConstVectorRef x) const {
  if (m > 0) throw MissingDerivatives("full model: input signal required");
  return rhs(x, Vector());
}

void FullModel::refresh_quadratic_terms() {
  quad.clear();
  for (Index outer = 0; outer < A2.outerSize(); ++outer)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A2, outer); it; ++it)
      quad.push_back({it.row(), it.col() / n, it.col() % n, it.value()});
}

FullModel burgers_model(Index n, double mu) {
  if (n < 3) throw DimensionMismatch("burgers model: need at least 3 grid points");
  if (!(mu > 0.0)) throw DimensionMismatch("burgers model: viscosity must be positive");

  FullModel model;
  model.n = n;
  model.m = 1;
  model.boundary = FullModel::Boundary::kDirichletInput;
  const double h = 1.0 / static_cast<double>(n + 1);
  model.spacing = h;

  const double diff = mu / (h * h);
  std::vector<Eigen::Triplet<double>> a1;
  a1.reserve(static_cast<std::size_t>(3 * n));
  for (Index i = 0; i < n; ++i) {
    a1.emplace_back(i, i, -2.0 * diff);
    if (i > 0) a1.emplace_back(i, i - 1, diff);
    if (i + 1 < n) a1.emplace_back(i, i + 1, diff);
  }
  model.A1.resize(n, n);
  model.A1.setFromTriplets(a1.begin(), a1.end());

  // Ghost values from x(0) = u and x(1) = -u enter through the second-order
  // diffusion stencil only.
  std::vector<Eigen::Triplet<double>> b;
  b.emplace_back(0, 0, diff);
  b.emplace_back(n - 1, 0, -diff);
  model.B.resize(n, 1);
  model.B.setFromTriplets(b.begin(), b.end());

  // -x x_w with centered differencing; boundary rows drop the ghost terms.
  const double adv = 1.0 / (2.0 * h);
  QuadBuilder quad{n, {}};
  for (Index i = 0; i < n; ++i) {
    if (i + 1 < n) quad.add(i, i, i + 1, -adv);
    if (i > 0) quad.add(i, i, i - 1, adv);
  }
  model.A2 = quad.build(n);
  model.refresh_quadratic_terms();
  return model;
}

Vector burgers_initial_condition(Index n) {
  const double h = 1.0 / static_cast<double>(n + 1);
  Vector x0(n);
  for (Index i = 0; i < n; ++i) x0[i] = 0.1 * std::sin(2.0 * kPi * h * static_cast<double>(i + 1));
  return x0;
}

Trajectory simulate_burgers(const FullModel& model, ConstVectorRef x0,
                            const InputSignal& input, double dt, double t_final) {
  const Index n = model.n;
  if (x0.size() != n) throw DimensionMismatch("burgers: initial condition length mismatch");
  const Index steps = step_count(dt, t_final);

  const Matrix a1_dense = Matrix(model.A1);
  BandedLU lu(n, 1, 1, [&](Index i, Index j) {
    return (i == j ? 1.0 : 0.0) - dt * a1_dense(i, j);
  });

  Trajectory traj;
  traj.times.resize(steps + 1);
  traj.states.resize(n, steps + 1);
  traj.inputs.resize(1, steps + 1);

  Vector x = x0;
  traj.times[0] = 0.0;
  traj.states.col(0) = x;
  for (Index k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const Vector u = input(t, k);
    traj.inputs(0, k) = u[0];
    Vector rhs = x + dt * (model.apply_quadratic(x) + model.B * u);
    lu.solve_inplace(rhs);
    x = rhs;
    if (!all_finite(x)) throw NonfiniteState("burgers: state blew up");
    traj.times[k + 1] = static_cast<double>(k + 1) * dt;
    traj.states.col(k + 1) = x;
  }
  traj.inputs(0, steps) = input(static_cast<double>(steps) * dt, steps)[0];
  return traj;
}

FullModel kse_model(Index n, double length, double mu) {
  if (n < 5) throw DimensionMismatch("kse model: need at least 5 grid points");
  if (!(length > 0.0) || !(mu > 0.0))
    throw DimensionMismatch("kse model: length and viscosity must be positive");

  FullModel model;
  model.n = n;
  model.m = 0;
  model.boundary = FullModel::Boundary::kPeriodic;
  const double h = length / static_cast<double>(n);
  model.spacing = h;

  const double d2 = 1.0 / (h * h);
  const double d4 = 1.0 / (h * h * h * h);
  // A1 = -D2 - mu D4, both periodic central stencils.
  const auto wrap = [n](Index i) { return (i % n + n) % n; };
  std::vector<Eigen::Triplet<double>> a1;
  a1.reserve(static_cast<std::size_t>(5 * n));
  for (Index i = 0; i < n; ++i) {
    a1.emplace_back(i, i, 2.0 * d2 - mu * 6.0 * d4);
    a1.emplace_back(i, wrap(i - 1), -d2 + mu * 4.0 * d4);
    a1.emplace_back(i, wrap(i + 1), -d2 + mu * 4.0 * d4);
    a1.emplace_back(i, wrap(i - 2), -mu * d4);
    a1.emplace_back(i, wrap(i + 2), -mu * d4);
  }
  model.A1.resize(n, n);
  model.A1.setFromTriplets(a1.begin(), a1.end());
  model.B.resize(n, 0);

  const double adv = 1.0 / (2.0 * h);
  QuadBuilder quad{n, {}};
  for (Index i = 0; i < n; ++i) {
    quad.add(i, i, wrap(i + 1), -adv);
    quad.add(i, i, wrap(i - 1), adv);
  }
  model.A2 = quad.build(n);
  model.refresh_quadratic_terms();
  return model;
}

Vector kse_initial_condition(Index n, double length, double a, double b) {
  Vector x0(n);
  for (Index j = 0; j < n; ++j) {
    const double w = length * static_cast<double>(j) / static_cast<double>(n);
    x0[j] = a * std::cos(2.0 * kPi * w / length) + b * std::cos(4.0 * kPi * w / length);
  }
  return x0;
}

Trajectory simulate_kse(const FullModel& model, ConstVectorRef x0, double dt,
                        double t_final, Index store_every) {
  const Index n = model.n;
  if (x0.size() != n) throw DimensionMismatch("kse: initial condition length mismatch");
  if (store_every < 1) throw DimensionMismatch("kse: store_every must be positive");
  const Index steps = step_count(dt, t_final);

  const Matrix a1_dense = Matrix(model.A1);
  const auto entry = [&](Index i, Index j) {
    return (i == j ? 1.0 : 0.0) - 0.5 * dt * a1_dense(i, j);
  };
  CyclicBandedLU lu(n, 2, entry);

  // Snapshots at fine steps 0, store_every, 2*store_every, ... including the
  // final step when it lands on the stride. Derivatives are fine-step forward
  // differences; only a stored final state falls back to the backward one.
  const Index stored = steps / store_every + 1;
  Trajectory traj;
  traj.times.resize(stored);
  traj.states.resize(n, stored);
  traj.derivatives.resize(n, stored);

  Vector x = x0;
  Vector x_prev = x0;
  Vector nl_prev = model.apply_quadratic(x);
  Index out = 0;
  Index pending = -1;
  for (Index k = 0; k < steps; ++k) {
    if (k % store_every == 0) {
      traj.times[out] = static_cast<double>(k) * dt;
      traj.states.col(out) = x;
      pending = out;
      ++out;
    }
    const Vector nl = model.apply_quadratic(x);
    Vector rhs = x + 0.5 * dt * (model.A1 * x);
    if (k == 0)
      rhs += dt * nl;  // explicit Euler bootstrap for the convection term
    else
      rhs += dt * (1.5 * nl - 0.5 * nl_prev);
    nl_prev = nl;
    Vector x_next = lu.solve(rhs);
    if (!all_finite(x_next)) throw NonfiniteState("kse: state blew up");
    if (pending >= 0) {
      traj.derivatives.col(pending) = (x_next - x) / dt;
      pending = -1;
    }
    x_prev = x;
    x = x_next;
  }
  if (steps % store_every == 0) {
    traj.times[out] = static_cast<double>(steps) * dt;
    traj.states.col(out) = x;
    traj.derivatives.col(out) = (x - x_prev) / dt;
    ++out;
  }
  if (out != stored) {
    traj.times.conservativeResize(out);
    traj.states.conservativeResize(n, out);
    traj.derivatives.conservativeResize(n, out);
  }
  return traj;
}

ReducedModel intrusive_galerkin(const Matrix& basis, const FullModel& model) {
  const Index n = model.n;
  const Index r = basis.cols();
  if (basis.rows() != n) throw DimensionMismatch("galerkin: basis row mismatch");

  ReducedModel rom;
  rom.A1 = basis.transpose() * (model.A1 * basis);
  rom.B = model.m > 0 ? Matrix(basis.transpose() * Matrix(model.B)) : Matrix(r, 0);
  rom.c = Vector();

  Matrix mixed = Matrix::Zero(n, r * r);
  for (const QuadTerm& t : model.quad) {
    // Column i*r+j of basis (x) basis evaluated on this nonzero.
    for (Index i = 0; i < r; ++i) {
      const double va = basis(t.a, i) * t.value;
      if (va == 0.0) continue;
      mixed.row(t.row).segment(i * r, r).noalias() += va * basis.row(t.b);
    }
  }
  rom.A2 = basis.transpose() * mixed;
  return rom;
}

Trajectory integrate_rom(const ReducedModel& model, ConstVectorRef xhat0,
                         const InputSignal& input, double dt, double t_final,
                         TimeScheme scheme) {
  const Index r = model.order();
  if (xhat0.size() != r) throw DimensionMismatch("rom: initial condition length mismatch");
  const Index steps = step_count(dt, t_final);
  const Index m = model.input_dim();

  const auto input_at = [&](double t, Index k) -> Vector {
    if (m == 0) return Vector();
    return input(t, k);
  };

  // Explicit part shared by the semi-implicit schemes.
  const auto explicit_terms = [&](const Vector& x, const Vector& u) {
    Vector e = model.quadratic(x);
    if (m > 0) e.noalias() += model.B * u;
    if (model.has_constant()) e += model.c;
    return e;
  };

  Trajectory traj;
  traj.times.resize(steps + 1);
  traj.states.resize(r, steps + 1);
  if (m > 0) traj.inputs.resize(m, steps + 1);

  Eigen::PartialPivLU<Matrix> lu;
  if (scheme == TimeScheme::kSemiImplicitEuler)
    lu.compute(Matrix::Identity(r, r) - dt * model.A1);
  else if (scheme == TimeScheme::kCnab2)
    lu.compute(Matrix::Identity(r, r) - 0.5 * dt * model.A1);

  Vector x = xhat0;
  traj.times[0] = 0.0;
  traj.states.col(0) = x;
  Vector nl_prev;

  Index k = 0;
  for (; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const Vector u = input_at(t, k);
    if (m > 0) traj.inputs.col(k) = u;

    Vector x_next;
    switch (scheme) {
      case TimeScheme::kSemiImplicitEuler: {
        x_next = lu.solve(x + dt * explicit_terms(x, u));
        break;
      }
      case TimeScheme::kCnab2: {
        const Vector nl = explicit_terms(x, u);
        Vector rhs = x + 0.5 * dt * (model.A1 * x);
        if (k == 0)
          rhs += dt * nl;
        else
          rhs += dt * (1.5 * nl - 0.5 * nl_prev);
        nl_prev = nl;
        x_next = lu.solve(rhs);
        break;
      }
      case TimeScheme::kRk4: {
        const Vector u_mid = input_at(t + 0.5 * dt, k);
        const Vector u_end = input_at(t + dt, k + 1);
        const Vector k1 = model.rhs(x, u);
        const Vector k2 = model.rhs(x + 0.5 * dt * k1, u_mid);
        const Vector k3 = model.rhs(x + 0.5 * dt * k2, u_mid);
        const Vector k4 = model.rhs(x + dt * k3, u_end);
        x_next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        break;
      }
    }

    if (!all_finite(x_next)) {
      traj.finite = false;
      traj.first_nonfinite = k + 1;
      traj.times.conservativeResize(k + 1);
      traj.states.conservativeResize(r, k + 1);
      if (m > 0) traj.inputs.conservativeResize(m, k + 1);
      return traj;
    }
    x = x_next;
    traj.times[k + 1] = static_cast<double>(k + 1) * dt;
    traj.states.col(k + 1) = x;
  }
  if (m > 0) traj.inputs.col(steps) = input_at(static_cast<double>(steps) * dt, steps);
  return traj;
}

TimeScheme time_scheme_from_string(const std::string& name) {
  if (name == "semi-implicit-euler") return TimeScheme::kSemiImplicitEuler;
  if (name == "cnab2") return TimeScheme::kCnab2;
  if (name == "rk4") return TimeScheme::kRk4;
  throw ConfigError("unknown time scheme: " + name);
}

std::string to_string(TimeScheme scheme) {
  switch (scheme) {
    case TimeScheme::kSemiImplicitEuler: return "semi-implicit-euler";
    case TimeScheme::kCnab2: return "cnab2";
    default: return "rk4";
  }
}

}  // namespace srom
