#pragma once

#include <Eigen/LU>
#include <functional>

#include "srom/types.hpp"

namespace srom {

/// LU factorization of a banded matrix without pivoting, stored in compact
/// band layout. Intended for the diagonally dominant systems produced by
/// semi-implicit time stepping.
class BandedLU {
 public:
  BandedLU() = default;
  /// entry(i, j) returns M(i, j); queried only inside the band.
  BandedLU(Index n, Index lower, Index upper,
           const std::function<double(Index, Index)>& entry);

  Index size() const { return n_; }
  void solve_inplace(Vector& b) const;
  Vector solve(ConstVectorRef b) const;
  Matrix solve_matrix(ConstMatrixRef b) const;

 private:
  Index n_ = 0;
  Index kl_ = 0, ku_ = 0;
  Matrix band_;  // (kl + ku + 1) x n; row kl + i - j holds M(i, j)

  double& at(Index i, Index j) { return band_(kl_ + i - j, j); }
  double at(Index i, Index j) const { return band_(kl_ + i - j, j); }
};

/// Banded matrix plus the wrap-around corner blocks of a periodic stencil,
/// solved via the banded factorization and a low-rank correction.
class CyclicBandedLU {
 public:
  CyclicBandedLU() = default;
  /// entry(i, j) over the full matrix; nonzeros must lie within the band or
  /// the periodic corners of half-width `bw`.
  CyclicBandedLU(Index n, Index bw, const std::function<double(Index, Index)>& entry);

  Index size() const { return n_; }
  Vector solve(ConstVectorRef b) const;
  Matrix solve_matrix(ConstMatrixRef b) const;

 private:
  Index n_ = 0;
  Index bw_ = 0;
  BandedLU base_;
  Matrix u_;            // n x 2bw corner row selectors
  Matrix v_;            // n x 2bw corner values per row
  Matrix z_;            // base^{-1} u
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic> cap_;  // capacitance
  Eigen::PartialPivLU<Matrix> cap_lu_;
};

}  // namespace srom
