#include "srom/metrics.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "srom/errors.hpp"

namespace srom {

namespace {
void check_orthonormal(const Matrix& v, const char* which) {
  const Matrix gram = v.transpose() * v;
  const double dev = (gram - Matrix::Identity(v.cols(), v.cols())).norm();
  if (dev > 1e-8) throw Error(std::string("subspace angle: non-orthonormal basis ") + which);
}
}  // namespace

double subspace_angle_error(const Matrix& vb, const Matrix& vi) {
  if (vb.rows() != vi.rows() || vb.cols() != vi.cols())
    throw DimensionMismatch("subspace angle: shape mismatch");
  check_orthonormal(vb, "A");
  check_orthonormal(vi, "B");
  // sum_j sin^2(theta_j) equals ||(I - Vi Vi^T) Vb||_F^2; evaluating the
  // residual directly avoids the 1 - cos^2 cancellation near aligned
  // subspaces, and no n x n projector is ever formed.
  const Matrix residual = vb - vi * (vi.transpose() * vb);
  return residual.norm();
}

void ProjectionErrorAccumulator::add(ConstVectorRef x) {
  if (x.size() != basis_.rows())
    throw DimensionMismatch("projection error: snapshot length mismatch");
  total_.add(x.squaredNorm());
  const Vector coeff = basis_.transpose() * x;
  const Vector resid = x - basis_ * coeff;
  residual_.add(resid.squaredNorm());
}

double ProjectionErrorAccumulator::value() const {
  const double denom = total_.value();
  if (denom <= 0.0) return 0.0;
  return std::sqrt(std::max(0.0, residual_.value()) / denom);
}

double relative_projection_error(const Matrix& x, const Matrix& basis) {
  ProjectionErrorAccumulator acc(basis);
  for (Index j = 0; j < x.cols(); ++j) acc.add(x.col(j));
  return acc.value();
}

double mr_soe(const std::vector<Matrix>& batch_ops, const std::vector<Matrix>& stream_ops) {
  if (batch_ops.empty() || batch_ops.size() != stream_ops.size())
    throw DimensionMismatch("mr-soe: operator list mismatch");
  KahanSum acc;
  for (std::size_t i = 0; i < batch_ops.size(); ++i) {
    const Matrix& ref = batch_ops[i];
    if (ref.rows() != stream_ops[i].rows() || ref.cols() != stream_ops[i].cols())
      throw DimensionMismatch("mr-soe: operator shape mismatch");
    const double denom = static_cast<double>(ref.rows()) * static_cast<double>(ref.cols()) *
                         ref.norm();
    acc.add(denom > 0.0 ? (ref - stream_ops[i]).norm() / denom : 0.0);
  }
  return acc.value() / static_cast<double>(batch_ops.size());
}

double mr_sse(const std::vector<Matrix>& full_states,
              const std::vector<Matrix>& reduced_states, const Matrix& basis) {
  if (full_states.empty() || full_states.size() != reduced_states.size())
    throw DimensionMismatch("mr-sse: trajectory list mismatch");
  KahanSum acc;
  for (std::size_t i = 0; i < full_states.size(); ++i) {
    const Matrix& x = full_states[i];
    const Matrix& xr = reduced_states[i];
    if (xr.cols() != x.cols() || xr.rows() != basis.cols()) {
      acc.add(std::numeric_limits<double>::infinity());
      continue;
    }
    const double denom = x.norm();
    const double err = (x - basis * xr).norm();
    acc.add(denom > 0.0 ? err / denom : err);
  }
  return acc.value() / static_cast<double>(full_states.size());
}

double final_rse(const Matrix& full_states, const Matrix& reduced_states,
                 const Matrix& basis) {
  return mr_sse({full_states}, {reduced_states}, basis);
}

double kaplan_yorke(const Vector& lambdas) {
  const Index p = lambdas.size();
  if (p < 1) throw DimensionMismatch("kaplan-yorke: empty spectrum");
  for (Index i = 1; i < p; ++i)
    if (lambdas[i] > lambdas[i - 1] + 1e-12)
      throw DimensionMismatch("kaplan-yorke: exponents must be sorted descending");
  if (lambdas[0] < 0.0) return 0.0;

  double cumulative = 0.0;
  Index j = 0;
  double sum_j = 0.0;
  for (Index i = 0; i < p; ++i) {
    cumulative += lambdas[i];
    if (cumulative >= 0.0) {
      j = i + 1;
      sum_j = cumulative;
    }
  }
  if (j >= p)
    throw UndefinedDimension("kaplan-yorke: partial sums never go negative");
  return static_cast<double>(j) + sum_j / std::abs(lambdas[j]);
}

double bound_beta1(double sigma1, double eta, Index k, Index n) {
  const double s2 = sigma1 * sigma1;
  const double inner = s2 * s2 + s2 + eta * eta + static_cast<double>(k);
  return 2.0 * std::sqrt(inner) * std::sqrt(static_cast<double>(std::min(n, k)));
}

double bound_beta2(double sigma1, double eps, Index r) {
  const double a = 2.0 * sigma1 + eps;
  return std::sqrt(static_cast<double>(r)) * (sigma1 + eps) * std::sqrt(1.0 + a * a);
}

double bound_rhs_projection(double sigma1, double norm_delta, double gamma_min,
                            double tau_v, double alpha, double beta1) {
  const double root = std::sqrt(gamma_min);
  return sigma1 * norm_delta / root * tau_v * (1.0 + alpha * beta1 / root);
}

double bound_rhs_reformulation(double sigma1, double norm_delta, double gamma_min,
                               double tau_w, double eps, double alpha, double beta2,
                               Index r) {
  const double root = std::sqrt(gamma_min);
  const double first = sigma1 * norm_delta / root * tau_w * (1.0 + alpha * beta2 / root);
  const double second = (alpha * beta2 + root) * std::sqrt(static_cast<double>(r)) *
                        norm_delta / gamma_min * eps;
  return first + second;
}

double operator_perturbation_bound(double alpha, double norm_dbar_pinv,
                                   double norm_dtilde_pinv, double norm_ed,
                                   double norm_rtilde, double norm_er) {
  return alpha * norm_dbar_pinv * norm_dtilde_pinv * norm_ed * norm_rtilde +
         norm_dbar_pinv * norm_er;
}

double sketchy_error_bound_at(const Vector& sigmas, Index q, Index s, Index rho) {
  if (rho < 1 || rho >= q - 1)
    throw IndexOutOfRange("sketchy bound: rho must satisfy 1 <= rho < q - 1");
  if (s <= q + 1) throw DimensionMismatch("sketchy bound: requires s > q + 1");
  KahanSum tail;
  for (Index j = rho + 1; j < sigmas.size(); ++j) tail.add(sigmas[j] * sigmas[j]);
  const double lead = static_cast<double>(s - 1) / static_cast<double>(s - q - 1);
  const double mid = static_cast<double>(q + rho - 1) / static_cast<double>(q - rho - 1);
  return lead * mid * tail.value();
}

double sketchy_error_bound(const Vector& sigmas, Index q, Index s) {
  double best = std::numeric_limits<double>::infinity();
  for (Index rho = 1; rho < q - 1; ++rho)
    best = std::min(best, sketchy_error_bound_at(sigmas, q, s, rho));
  return best;
}

void MemoryBudget::derive_sketch_sizes() {
  q = 4 * r + 1;
  s = 2 * q + 1;
  zeta = static_cast<int>(std::min<Index>(q, 8));
}

Index operator_dimension(Index r, Index m, bool constant, bool symmetric_quadratic) {
  const Index quad = symmetric_quadratic ? r * (r + 1) / 2 : r * r;
  return r + quad + m + (constant ? 1 : 0);
}

MemoryCost streaming_memory_cost(const MemoryBudget& b) {
  MemoryCost cost;
  cost.svd_floats = b.svd_method == SvdMethod::kIncremental
                        ? static_cast<double>(b.n) * static_cast<double>(b.r)
                        : static_cast<double>(b.n) * static_cast<double>(b.q + b.zeta);
  cost.ls_floats = is_recursive(b.paradigm)
                       ? static_cast<double>(b.d) * static_cast<double>(b.d)
                       : static_cast<double>(b.d) * static_cast<double>(b.K + b.d);
  return cost;
}

MemoryCost batch_memory_cost(const MemoryBudget& b) {
  MemoryCost cost;
  cost.svd_floats = static_cast<double>(b.n) * static_cast<double>(b.K + b.r);
  cost.ls_floats = static_cast<double>(b.d) * static_cast<double>(b.K + b.d);
  return cost;
}

double memory_reduction(const MemoryCost& streaming, const MemoryCost& batch) {
  return 1.0 - streaming.total() / batch.total();
}

}  // namespace srom
