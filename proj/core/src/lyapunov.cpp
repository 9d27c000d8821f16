#include "srom/lyapunov.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <cmath>
#include <vector>

#include "srom/banded.hpp"
#include "srom/errors.hpp"
#include "srom/metrics.hpp"

namespace srom {

namespace {

Matrix right_apply_rinv(const Matrix& h, const Matrix& r_factor) {
  // H <- H * R^{-1} via the lower-triangular solve R^T Y = H^T.
  return r_factor.transpose()
      .triangularView<Eigen::Lower>()
      .solve(h.transpose())
      .transpose();
}

class RomTangentIntegrator final : public TangentIntegrator {
 public:
  RomTangentIntegrator(const ReducedModel& model, TimeScheme scheme, double dt)
      : model_(model), scheme_(scheme), dt_(dt) {
    const Index r = model.order();
    if (model.input_dim() > 0)
      throw MissingDerivatives("lyapunov: models with inputs are not autonomous");
    if (scheme_ != TimeScheme::kRk4)
      lu_.compute(Matrix::Identity(r, r) -
                  (scheme_ == TimeScheme::kSemiImplicitEuler ? dt_ : 0.5 * dt_) * model.A1);
  }

  Index dim() const override { return model_.order(); }
  void set_state(ConstVectorRef x) override {
    x_ = x;
    state_history_ = false;
    tangent_history_ = false;
  }
  void set_frame(const Matrix& q) override {
    frame_ = q;
    tangent_history_ = false;
  }
  const Vector& state() const override { return x_; }
  const Matrix& frame() const override { return frame_; }

  void step(bool with_tangents) override {
    switch (scheme_) {
      case TimeScheme::kRk4: step_rk4(with_tangents); break;
      case TimeScheme::kCnab2: step_cnab2(with_tangents); break;
      case TimeScheme::kSemiImplicitEuler: step_sie(with_tangents); break;
    }
  }

  void renormalize(const Matrix& q, const Matrix& r_factor) override {
    frame_ = q;
    if (tangent_history_) nl_frame_prev_ = right_apply_rinv(nl_frame_prev_, r_factor);
  }

 private:
  Vector explicit_state_terms(const Vector& x) const {
    Vector e = model_.quadratic(x);
    if (model_.has_constant()) e += model_.c;
    return e;
  }

  void step_rk4(bool with_tangents) {
    const Vector k1 = model_.rhs(x_);
    const Vector x2 = x_ + 0.5 * dt_ * k1;
    const Vector k2 = model_.rhs(x2);
    const Vector x3 = x_ + 0.5 * dt_ * k2;
    const Vector k3 = model_.rhs(x3);
    const Vector x4 = x_ + dt_ * k3;
    const Vector k4 = model_.rhs(x4);
    if (with_tangents) {
      const Matrix f1 = model_.jacobian(x_) * frame_;
      const Matrix f2 = model_.jacobian(x2) * (frame_ + 0.5 * dt_ * f1);
      const Matrix f3 = model_.jacobian(x3) * (frame_ + 0.5 * dt_ * f2);
      const Matrix f4 = model_.jacobian(x4) * (frame_ + dt_ * f3);
      frame_ += (dt_ / 6.0) * (f1 + 2.0 * f2 + 2.0 * f3 + f4);
    }
    x_ += (dt_ / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  void step_cnab2(bool with_tangents) {
    const Vector nl = explicit_state_terms(x_);
    Vector rhs = x_ + 0.5 * dt_ * (model_.A1 * x_);
    rhs += state_history_ ? Vector(dt_ * (1.5 * nl - 0.5 * nl_prev_)) : Vector(dt_ * nl);
    nl_prev_ = nl;
    if (with_tangents) {
      const Matrix jq = model_.jacobian(x_) - model_.A1;  // quadratic part only
      const Matrix nl_frame = jq * frame_;
      Matrix frame_rhs = frame_ + 0.5 * dt_ * (model_.A1 * frame_);
      frame_rhs += tangent_history_ ? Matrix(dt_ * (1.5 * nl_frame - 0.5 * nl_frame_prev_))
                                    : Matrix(dt_ * nl_frame);
      nl_frame_prev_ = nl_frame;
      frame_ = lu_.solve(frame_rhs);
      tangent_history_ = true;
    }
    x_ = lu_.solve(rhs);
    state_history_ = true;
  }

  void step_sie(bool with_tangents) {
    if (with_tangents) {
      const Matrix jq = model_.jacobian(x_) - model_.A1;
      frame_ = lu_.solve((frame_ + dt_ * (jq * frame_)).eval());
    }
    x_ = lu_.solve((x_ + dt_ * explicit_state_terms(x_)).eval());
  }

  ReducedModel model_;
  TimeScheme scheme_;
  double dt_;
  Eigen::PartialPivLU<Matrix> lu_;
  Vector x_;
  Matrix frame_;
  Vector nl_prev_;
  Matrix nl_frame_prev_;
  bool state_history_ = false;
  bool tangent_history_ = false;
};

class FullTangentIntegrator final : public TangentIntegrator {
 public:
  FullTangentIntegrator(const FullModel& model, double dt) : model_(model), dt_(dt) {
    if (model.m > 0)
      throw MissingDerivatives("lyapunov: models with inputs are not autonomous");
    const Matrix a1 = Matrix(model.A1);
    const auto entry = [&](Index i, Index j) {
      return (i == j ? 1.0 : 0.0) - 0.5 * dt * a1(i, j);
    };
    if (model.boundary == FullModel::Boundary::kPeriodic) {
      Index bw = 0;
      for (Index outer = 0; outer < model.A1.outerSize(); ++outer)
        for (Eigen::SparseMatrix<double>::InnerIterator it(model.A1, outer); it; ++it) {
          const Index gap = std::abs(it.row() - it.col());
          bw = std::max(bw, std::min(gap, model.n - gap));
        }
      cyclic_ = CyclicBandedLU(model.n, bw, entry);
      periodic_ = true;
    } else {
      Index bw = 0;
      for (Index outer = 0; outer < model.A1.outerSize(); ++outer)
        for (Eigen::SparseMatrix<double>::InnerIterator it(model.A1, outer); it; ++it)
          bw = std::max(bw, std::abs(it.row() - it.col()));
      banded_ = BandedLU(model.n, bw, bw, entry);
    }
  }

  Index dim() const override { return model_.n; }
  void set_state(ConstVectorRef x) override {
    x_ = x;
    state_history_ = false;
    tangent_history_ = false;
  }
  void set_frame(const Matrix& q) override {
    frame_ = q;
    tangent_history_ = false;
  }
  const Vector& state() const override { return x_; }
  const Matrix& frame() const override { return frame_; }

  void step(bool with_tangents) override {
    const Vector nl = model_.apply_quadratic(x_);
    Vector rhs = x_ + 0.5 * dt_ * (model_.A1 * x_);
    rhs += state_history_ ? Vector(dt_ * (1.5 * nl - 0.5 * nl_prev_)) : Vector(dt_ * nl);
    nl_prev_ = nl;
    if (with_tangents) {
      Matrix nl_frame(model_.n, frame_.cols());
      for (Index c = 0; c < frame_.cols(); ++c)
        nl_frame.col(c) = model_.apply_quadratic_bilinear(x_, frame_.col(c));
      Matrix frame_rhs = frame_ + 0.5 * dt_ * (model_.A1 * frame_);
      frame_rhs += tangent_history_ ? Matrix(dt_ * (1.5 * nl_frame - 0.5 * nl_frame_prev_))
                                    : Matrix(dt_ * nl_frame);
      nl_frame_prev_ = nl_frame;
      frame_ = solve(frame_rhs);
      tangent_history_ = true;
    }
    x_ = solve(rhs);
    state_history_ = true;
  }

  void renormalize(const Matrix& q, const Matrix& r_factor) override {
    frame_ = q;
    if (tangent_history_) nl_frame_prev_ = right_apply_rinv(nl_frame_prev_, r_factor);
  }

 private:
  Vector solve(const Vector& b) const {
    return periodic_ ? cyclic_.solve(b) : banded_.solve(b);
  }
  Matrix solve(const Matrix& b) const {
    return periodic_ ? cyclic_.solve_matrix(b) : banded_.solve_matrix(b);
  }

  const FullModel& model_;
  double dt_;
  bool periodic_ = false;
  CyclicBandedLU cyclic_;
  BandedLU banded_;
  Vector x_;
  Matrix frame_;
  Vector nl_prev_;
  Matrix nl_frame_prev_;
  bool state_history_ = false;
  bool tangent_history_ = false;
};

}  // namespace

Vector lyapunov_spectrum(TangentIntegrator& system, ConstVectorRef x0,
                         const LyapunovOptions& opts) {
  const Index n = system.dim();
  const Index p = opts.exponent_count;
  if (p < 1 || p > n) throw DimensionMismatch("lyapunov: exponent count out of range");
  if (!(opts.dt > 0.0) || !(opts.t_total > 0.0))
    throw DimensionMismatch("lyapunov: dt and t_total must be positive");
  const double t_transient =
      opts.t_transient >= 0.0 ? opts.t_transient : 0.2 * opts.t_total;
  if (!(t_transient < opts.t_total))
    throw DimensionMismatch("lyapunov: transient must leave averaging time");

  system.set_state(x0);
  system.set_frame(Matrix::Identity(n, p));

  const Index interval = std::max<Index>(1, opts.renorm_interval);
  const Index total_steps = static_cast<Index>(std::llround(opts.t_total / opts.dt));
  const Index transient_steps = static_cast<Index>(std::llround(t_transient / opts.dt));

  std::vector<KahanSum> sums(static_cast<std::size_t>(p));
  double accumulated_time = 0.0;
  Index since_renorm = 0;
  Index last_accum_step = transient_steps;

  for (Index step = 0; step < total_steps; ++step) {
    const bool with_tangents = step >= transient_steps;
    system.step(with_tangents);
    if (!with_tangents) continue;
    ++since_renorm;
    const bool last = step == total_steps - 1;
    if (since_renorm < interval && !last) continue;

    const Matrix& frame = system.frame();
    if (!frame.allFinite()) throw NonfiniteState("lyapunov: tangent frame blew up");
    Eigen::HouseholderQR<Matrix> qr(frame);
    Matrix q = qr.householderQ() * Matrix::Identity(n, p);
    Matrix r_factor = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
    for (Index j = 0; j < p; ++j) {
      if (r_factor(j, j) < 0.0) {
        q.col(j) = -q.col(j);
        r_factor.row(j) = -r_factor.row(j);
      }
      const double diag = r_factor(j, j);
      if (!(diag > 0.0) || !std::isfinite(diag))
        throw NonfiniteState("lyapunov: degenerate tangent frame");
      sums[static_cast<std::size_t>(j)].add(std::log(diag));
    }
    system.renormalize(q, r_factor);
    accumulated_time += static_cast<double>(step + 1 - last_accum_step) * opts.dt;
    last_accum_step = step + 1;
    since_renorm = 0;
  }

  Vector lambdas(p);
  for (Index j = 0; j < p; ++j)
    lambdas[j] = sums[static_cast<std::size_t>(j)].value() / accumulated_time;
  return lambdas;
}

std::unique_ptr<TangentIntegrator> make_tangent_integrator(const ReducedModel& model,
                                                           TimeScheme scheme, double dt) {
  return std::make_unique<RomTangentIntegrator>(model, scheme, dt);
}

std::unique_ptr<TangentIntegrator> make_tangent_integrator(const FullModel& model,
                                                           double dt) {
  return std::make_unique<FullTangentIntegrator>(model, dt);
}

Vector lyapunov_spectrum(const ReducedModel& model, ConstVectorRef x0,
                         const LyapunovOptions& opts, TimeScheme scheme) {
  auto sys = make_tangent_integrator(model, scheme, opts.dt);
  return lyapunov_spectrum(*sys, x0, opts);
}

Vector lyapunov_spectrum(const FullModel& model, ConstVectorRef x0,
                         const LyapunovOptions& opts) {
  auto sys = make_tangent_integrator(model, opts.dt);
  return lyapunov_spectrum(*sys, x0, opts);
}

}  // namespace srom
