#pragma once

#include <Eigen/SparseCore>
#include <functional>
#include <vector>

#include "srom/reduced_model.hpp"
#include "srom/types.hpp"

namespace srom {

/// Snapshot sequence with optional derivative and input channels.
struct Trajectory {
  Vector times;
  Matrix states;       // n x K
  Matrix derivatives;  // n x K or empty
  Matrix inputs;       // m x K or empty
  bool finite = true;
  Index first_nonfinite = -1;
};

/// Sparse quadratic-term entry: `value * x[a] * x[b]` feeds state `row`.
struct QuadTerm {
  Index row, a, b;
  double value;
};

/// Spatially discretized quadratic full-order model
/// dx/dt = A1 x + A2 (x (x) x) + B u.
struct FullModel {
  enum class Boundary { kDirichletInput, kPeriodic };

  Index n = 0;
  Index m = 0;
  double spacing = 0.0;
  Boundary boundary = Boundary::kDirichletInput;
  Eigen::SparseMatrix<double> A1;  // n x n
  Eigen::SparseMatrix<double> A2;  // n x n^2, Kronecker column order, symmetrized
  Eigen::SparseMatrix<double> B;   // n x m
  std::vector<QuadTerm> quad;      // A2 nonzeros flattened for O(nnz) applies

  Vector apply_quadratic(ConstVectorRef x) const;
  /// A2 (x (x) v + v (x) x): quadratic Jacobian action.
  Vector apply_quadratic_bilinear(ConstVectorRef x, ConstVectorRef v) const;
  Vector rhs(ConstVectorRef x, ConstVectorRef u) const;
  Vector rhs(ConstVectorRef x) const;

  /// Rebuilds the flattened nonzero list from A2 (call after editing A2).
  void refresh_quadratic_terms();
};

using InputSignal = std::function<Vector(double t, Index step)>;

/// Viscous Burgers operators on `n` interior points of [0, 1] with boundary
/// values u(t) and -u(t) folded into B; centered differencing for both
/// diffusion and the advection stencil.
FullModel burgers_model(Index n, double mu);

Vector burgers_initial_condition(Index n);

/// Semi-implicit Euler: implicit diffusion, explicit advection and input.
/// Throws NonfiniteState on blow-up.
Trajectory simulate_burgers(const FullModel& model, ConstVectorRef x0,
                            const InputSignal& input, double dt, double t_final);

/// Kuramoto-Sivashinsky operators on `n` periodic points of [0, L]:
/// A1 = -D2 - mu D4 (circulant bands), quadratic convection -x x_w.
FullModel kse_model(Index n, double length, double mu = 1.0);

Vector kse_initial_condition(Index n, double length, double a, double b);

/// Crank-Nicolson on the linear part, second-order Adams-Bashforth on the
/// convection term (first step bootstrapped with one explicit Euler substep).
/// Stores every `store_every`-th fine step starting at t = 0 and records the
/// forward-difference derivative at each stored snapshot.
Trajectory simulate_kse(const FullModel& model, ConstVectorRef x0, double dt,
                        double t_final, Index store_every = 1);

/// Galerkin projection of full operators onto an orthonormal basis.
ReducedModel intrusive_galerkin(const Matrix& basis, const FullModel& model);

enum class TimeScheme { kSemiImplicitEuler, kCnab2, kRk4 };

/// Reduced-model time integration. Blow-up is reported through the returned
/// trajectory (finite flag + truncation), never thrown, so model selection can
/// rank unstable candidates.
Trajectory integrate_rom(const ReducedModel& model, ConstVectorRef xhat0,
                         const InputSignal& input, double dt, double t_final,
                         TimeScheme scheme);

TimeScheme time_scheme_from_string(const std::string& name);
std::string to_string(TimeScheme scheme);

}  // namespace srom
