#pragma once

#include <vector>

#include "srom/paradigm.hpp"
#include "srom/types.hpp"

namespace srom {

/// Compensated (Kahan) accumulator; keeps 1e-12-level claims honest over 1e5
/// terms.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// Distance between the column spaces of two orthonormal bases:
/// (1/sqrt(2)) * ||Vb Vb^T - Vi Vi^T||_F, evaluated through the singular
/// values of Vb^T Vi so no n x n product is ever formed.
double subspace_angle_error(const Matrix& vb, const Matrix& vi);

/// ||X - Vr Vr^T X||_F / ||X||_F accumulated columnwise.
class ProjectionErrorAccumulator {
 public:
  explicit ProjectionErrorAccumulator(const Matrix& basis) : basis_(basis) {}
  void add(ConstVectorRef x);
  double value() const;

 private:
  Matrix basis_;
  KahanSum total_;
  KahanSum residual_;
};

double relative_projection_error(const Matrix& x, const Matrix& basis);

/// Mean relative streaming operator error over parameters:
/// (1/M) sum ||O_i - O_{k,i}||_F / (d r ||O_i||_F).
double mr_soe(const std::vector<Matrix>& batch_ops, const std::vector<Matrix>& stream_ops);

/// Mean relative streaming state error over parameters:
/// (1/M) sum ||X_i - Vr Xr_i||_F / ||X_i||_F, where Xr_i holds reduced states.
/// A truncated (blown-up) reduced trajectory contributes +inf.
double mr_sse(const std::vector<Matrix>& full_states,
              const std::vector<Matrix>& reduced_states, const Matrix& basis);

/// Final relative state error: mr_sse of the end-of-stream reduced model.
double final_rse(const Matrix& full_states, const Matrix& reduced_states,
                 const Matrix& basis);

/// Largest j with nonnegative partial exponent sum plus linear interpolation:
/// D = j + sum_1^j lambda / |lambda_{j+1}|. Fully stable spectra give 0;
/// throws UndefinedDimension when every partial sum stays nonnegative.
double kaplan_yorke(const Vector& lambdas_descending);

// --- Streaming-error bound evaluators -------------------------------------

double bound_beta1(double sigma1, double eta, Index k, Index n);
double bound_beta2(double sigma1, double eps, Index r);

/// Operator-error bound for the projection pipelines.
double bound_rhs_projection(double sigma1, double norm_delta, double gamma_min,
                            double tau_v, double alpha, double beta1);

/// Operator-error bound for the reformulation pipelines.
double bound_rhs_reformulation(double sigma1, double norm_delta, double gamma_min,
                               double tau_w, double eps, double alpha, double beta2,
                               Index r);

/// General perturbation bound on the stacked least-squares solution.
double operator_perturbation_bound(double alpha, double norm_dbar_pinv,
                                   double norm_dtilde_pinv, double norm_ed,
                                   double norm_rtilde, double norm_er);

/// Expected squared Frobenius error bound of the sketched reconstruction at a
/// fixed tail split rho, and minimized over admissible rho.
double sketchy_error_bound_at(const Vector& sigmas, Index q, Index s, Index rho);
double sketchy_error_bound(const Vector& sigmas, Index q, Index s);

// --- Memory accounting (float counts, not bytes) ---------------------------

struct MemoryBudget {
  Paradigm paradigm = Paradigm::kLs;
  SvdMethod svd_method = SvdMethod::kSketchy;
  Index n = 0;
  Index K = 0;
  Index r = 0;
  Index m = 0;
  Index q = 0;
  Index s = 0;
  int zeta = 0;
  Index d = 0;

  /// Fills q, s, zeta from the sketch-size rules for rank r.
  void derive_sketch_sizes();
};

struct MemoryCost {
  double svd_floats = 0.0;
  double ls_floats = 0.0;
  double total() const { return svd_floats + ls_floats; }
};

/// Feature dimension r + quadratic block + m + optional constant; the
/// quadratic block is r^2 or r(r+1)/2 when symmetric pairing is exploited.
Index operator_dimension(Index r, Index m, bool constant, bool symmetric_quadratic);

MemoryCost streaming_memory_cost(const MemoryBudget& budget);
MemoryCost batch_memory_cost(const MemoryBudget& budget);
double memory_reduction(const MemoryCost& streaming, const MemoryCost& batch);

}  // namespace srom
