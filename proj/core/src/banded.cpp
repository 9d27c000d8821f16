#include "srom/banded.hpp"

#include <algorithm>
#include <cmath>

#include "srom/errors.hpp"

namespace srom {

BandedLU::BandedLU(Index n, Index lower, Index upper,
                   const std::function<double(Index, Index)>& entry)
    : n_(n), kl_(lower), ku_(upper) {
  if (n < 1 || lower < 0 || upper < 0) throw DimensionMismatch("banded lu: bad shape");
  band_ = Matrix::Zero(kl_ + ku_ + 1, n_);
  for (Index j = 0; j < n_; ++j)
    for (Index i = std::max<Index>(0, j - ku_); i <= std::min(n_ - 1, j + kl_); ++i)
      at(i, j) = entry(i, j);

  for (Index k = 0; k < n_; ++k) {
    const double pivot = at(k, k);
    if (pivot == 0.0 || !std::isfinite(pivot))
      throw NonfiniteUpdate("banded lu: zero pivot");
    const Index imax = std::min(n_ - 1, k + kl_);
    const Index jmax = std::min(n_ - 1, k + ku_);
    for (Index i = k + 1; i <= imax; ++i) {
      const double l = at(i, k) / pivot;
      at(i, k) = l;
      for (Index j = k + 1; j <= jmax; ++j) at(i, j) -= l * at(k, j);
    }
  }
}

void BandedLU::solve_inplace(Vector& b) const {
  for (Index i = 0; i < n_; ++i) {
    double acc = b[i];
    const Index j0 = std::max<Index>(0, i - kl_);
    for (Index j = j0; j < i; ++j) acc -= at(i, j) * b[j];
    b[i] = acc;
  }
  for (Index i = n_ - 1; i >= 0; --i) {
    double acc = b[i];
    const Index j1 = std::min(n_ - 1, i + ku_);
    for (Index j = i + 1; j <= j1; ++j) acc -= at(i, j) * b[j];
    b[i] = acc / at(i, i);
  }
}

Vector BandedLU::solve(ConstVectorRef b) const {
  Vector x = b;
  solve_inplace(x);
  return x;
}

Matrix BandedLU::solve_matrix(ConstMatrixRef b) const {
  Matrix x = b;
  for (Index j = 0; j < x.cols(); ++j) {
    Vector col = x.col(j);
    solve_inplace(col);
    x.col(j) = col;
  }
  return x;
}

CyclicBandedLU::CyclicBandedLU(Index n, Index bw,
                               const std::function<double(Index, Index)>& entry)
    : n_(n), bw_(bw) {
  if (n < 2 * bw + 1) throw DimensionMismatch("cyclic banded lu: matrix too small for band");
  base_ = BandedLU(n, bw, bw, entry);

  const Index rank = 2 * bw_;
  u_ = Matrix::Zero(n_, rank);
  v_ = Matrix::Zero(n_, rank);
  for (Index t = 0; t < rank; ++t) {
    const Index row = t < bw_ ? t : n_ - rank + t;
    u_(row, t) = 1.0;
    // Corner entries of this row live in the opposite band wrap.
    if (row < bw_) {
      for (Index j = n_ - bw_; j < n_; ++j)
        if (j - row > bw_) v_(j, t) = entry(row, j);
    } else {
      for (Index j = 0; j < bw_; ++j)
        if (row - j > bw_) v_(j, t) = entry(row, j);
    }
  }
  z_ = base_.solve_matrix(u_);
  cap_ = Matrix::Identity(rank, rank) + v_.transpose() * z_;
  cap_lu_.compute(cap_);
}

Vector CyclicBandedLU::solve(ConstVectorRef b) const {
  Vector y = base_.solve(b);
  const Vector w = cap_lu_.solve(v_.transpose() * y);
  y.noalias() -= z_ * w;
  return y;
}

Matrix CyclicBandedLU::solve_matrix(ConstMatrixRef b) const {
  Matrix y = base_.solve_matrix(b);
  const Matrix w = cap_lu_.solve(v_.transpose() * y);
  y.noalias() -= z_ * w;
  return y;
}

}  // namespace srom
