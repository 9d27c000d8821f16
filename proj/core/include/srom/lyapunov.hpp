#pragma once

#include <memory>

#include "srom/models.hpp"
#include "srom/types.hpp"

namespace srom {

/// Couples a state integrator with its tangent-space linearization so a QR
/// renormalization loop can drive either a full-order or reduced model.
class TangentIntegrator {
 public:
  virtual ~TangentIntegrator() = default;
  virtual Index dim() const = 0;
  virtual void set_state(ConstVectorRef x) = 0;
  /// Installs a fresh tangent frame (clears tangent multistep history).
  virtual void set_frame(const Matrix& q) = 0;
  virtual const Vector& state() const = 0;
  virtual const Matrix& frame() const = 0;
  /// Advance state (and tangents when requested) by one dt.
  virtual void step(bool with_tangents) = 0;
  /// Replace the frame by Q from frame = Q * R; multistep tangent history
  /// follows the same column transformation and stays valid.
  virtual void renormalize(const Matrix& q, const Matrix& r_factor) = 0;
};

struct LyapunovOptions {
  Index exponent_count = 10;
  double t_total = 0.0;
  double t_transient = -1.0;  // negative: 20% of t_total
  double dt = 0.0;
  Index renorm_interval = 10;
};

/// Leading Lyapunov exponents by tangent-frame integration with periodic QR
/// renormalization; the transient window is discarded from the averages.
Vector lyapunov_spectrum(TangentIntegrator& system, ConstVectorRef x0,
                         const LyapunovOptions& opts);

/// Quadratic reduced model with analytic Jacobian A1 + A2 (I (x) x + x (x) I).
std::unique_ptr<TangentIntegrator> make_tangent_integrator(const ReducedModel& model,
                                                           TimeScheme scheme, double dt);

/// Full-order model stepped with Crank-Nicolson/Adams-Bashforth; the banded
/// linear solve honors the model's boundary type.
std::unique_ptr<TangentIntegrator> make_tangent_integrator(const FullModel& model,
                                                           double dt);

Vector lyapunov_spectrum(const ReducedModel& model, ConstVectorRef x0,
                         const LyapunovOptions& opts, TimeScheme scheme);
Vector lyapunov_spectrum(const FullModel& model, ConstVectorRef x0,
                         const LyapunovOptions& opts);

}  // namespace srom
