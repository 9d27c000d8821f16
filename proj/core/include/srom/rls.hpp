#pragma once

#include <cstdint>
#include <vector>

#include "srom/types.hpp"

namespace srom {

/// Block-diagonal Tikhonov penalty Gamma = diag(gamma1 * I_{d1}, gamma2 * I_{d2}).
/// The first block covers linear/input/constant coefficients, the second the
/// quadratic block.
struct Regularizer {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  Index d1 = 0;
  Index d2 = 0;

  Regularizer() = default;
  Regularizer(double g1, double g2, Index n1, Index n2);
  static Regularizer uniform(double gamma, Index d) { return {gamma, gamma, d, 0}; }

  Index dim() const { return d1 + d2; }
  Vector diagonal() const;
  Vector sqrt_diagonal() const;
  Vector inverse_diagonal() const;
  double min_gamma() const;
};

/// Recursive ridge regression via rank-1 inverse-correlation updates. After k
/// rows the estimate solves min ||R_k - D_k O||_F^2 + ||Gamma^{1/2} O||_F^2
/// exactly (in exact arithmetic).
///
/// Updates are sequential per instance; instances are movable across threads
/// between calls.
class Rls {
 public:
  Rls(const Regularizer& reg, Index d, Index r);
  /// General positive penalty diagonal (entries of Gamma).
  Rls(const Vector& gamma_diagonal, Index r);

  void update(ConstRowRef d_row, ConstRowRef r_row);

  Index rows_processed() const { return k_; }
  Index feature_dim() const { return d_; }
  Index target_dim() const { return r_; }
  const Matrix& estimate() const { return estimate_; }
  const Matrix& inverse_correlation() const { return p_; }

  /// Kalman gain and a-priori error from the most recent update.
  const Vector& last_gain() const { return gain_; }
  const RowVector& last_apriori_error() const { return apriori_; }

  Index storage_floats() const { return p_.size() + estimate_.size(); }

 private:
  Index d_, r_;
  Index k_ = 0;
  Matrix p_;         // d x d symmetric
  Matrix estimate_;  // d x r
  Vector gain_;
  RowVector apriori_;
};

/// Square-root form of Rls: propagates the transposed Cholesky factor
/// Pt = P^{T/2} (upper triangular) through Givens rotations on a bordered
/// array, costing O(d^2) per row. Numerically robust where plain Rls loses
/// positive definiteness.
class InverseQrRls {
 public:
  enum class Storage { kDense, kPacked };

  InverseQrRls(const Regularizer& reg, Index d, Index r,
               Storage storage = Storage::kDense);
  InverseQrRls(const Vector& gamma_diagonal, Index r,
               Storage storage = Storage::kDense);

  void update(ConstRowRef d_row, ConstRowRef r_row);

  Index rows_processed() const { return k_; }
  Index feature_dim() const { return d_; }
  Index target_dim() const { return r_; }
  const Matrix& estimate() const { return estimate_; }
  /// Upper-triangular factor with exact zeros below the diagonal.
  Matrix sqrt_factor_transposed() const;
  /// Reconstructed inverse correlation matrix Pt^T * Pt.
  Matrix inverse_correlation() const;

  const Vector& last_gain() const { return gain_; }
  const RowVector& last_apriori_error() const { return apriori_; }

  /// Scalar multiply-add count of the most recent update (rotation work).
  std::uint64_t last_update_ops() const { return last_ops_; }

  Index storage_floats() const;

 private:
  Index d_, r_;
  Index k_ = 0;
  Storage storage_;
  Matrix pt_dense_;               // used in dense mode
  std::vector<double> pt_packed_; // row-major upper triangle, packed mode
  Matrix estimate_;
  Vector gain_;
  RowVector apriori_;
  Vector work_b_;   // first-column border
  Vector work_w_;   // rotated top row
  std::uint64_t last_ops_ = 0;

  double& pt(Index i, Index j);
  double pt_at(Index i, Index j) const;
};

/// Least-squares solve of the augmented system via column-pivoted QR
/// (never normal equations). Throws RankDeficient when the stacked matrix
/// loses column rank.
Matrix batch_ls(const Matrix& dbar, const Matrix& rbar);

/// Difference between the batch solution and a streaming iterate.
Matrix streaming_operator_error(const Matrix& o_batch, const Matrix& o_k);

}  // namespace srom
