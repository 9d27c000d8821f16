#include "srom/rls.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>

#include "srom/errors.hpp"

namespace srom {

Regularizer::Regularizer(double g1, double g2, Index n1, Index n2)
    : gamma1(g1), gamma2(g2), d1(n1), d2(n2) {
  if (n1 < 0 || n2 < 0 || n1 + n2 < 1)
    throw DimensionMismatch("regularizer: invalid block sizes");
  if (n1 > 0 && !(g1 > 0.0)) throw NonpositiveGamma("regularizer: gamma1 must be positive");
  if (n2 > 0 && !(g2 > 0.0)) throw NonpositiveGamma("regularizer: gamma2 must be positive");
}

Vector Regularizer::diagonal() const {
  Vector g(dim());
  g.head(d1).setConstant(gamma1);
  g.tail(d2).setConstant(gamma2);
  return g;
}

Vector Regularizer::sqrt_diagonal() const { return diagonal().cwiseSqrt(); }

Vector Regularizer::inverse_diagonal() const { return diagonal().cwiseInverse(); }

double Regularizer::min_gamma() const {
  if (d1 == 0) return gamma2;
  if (d2 == 0) return gamma1;
  return std::min(gamma1, gamma2);
}

Rls::Rls(const Regularizer& reg, Index d, Index r) : Rls(reg.diagonal(), r) {
  if (reg.dim() != d) throw DimensionMismatch("rls: regularizer dimension mismatch");
}

Rls::Rls(const Vector& gamma_diagonal, Index r) : d_(gamma_diagonal.size()), r_(r) {
  if (r < 1) throw DimensionMismatch("rls: target dimension must be positive");
  if ((gamma_diagonal.array() <= 0.0).any())
    throw NonpositiveGamma("rls: penalty diagonal must be positive");
  p_ = gamma_diagonal.cwiseInverse().asDiagonal();
  estimate_ = Matrix::Zero(d_, r_);
  gain_ = Vector::Zero(d_);
  apriori_ = RowVector::Zero(r_);
}

void Rls::update(ConstRowRef d_row, ConstRowRef r_row) {
  if (d_row.size() != d_ || r_row.size() != r_)
    throw DimensionMismatch("rls: row length mismatch");

  const Vector pd = p_ * d_row.transpose();
  const double denom = 1.0 + (d_row * pd).value();
  if (!std::isfinite(denom) || denom <= 0.0)
    throw NonfiniteUpdate("rls: conversion factor not finite and positive");
  const double conv = 1.0 / denom;

  gain_ = pd * conv;
  p_.noalias() -= gain_ * gain_.transpose() / conv;
  p_ = 0.5 * (p_ + p_.transpose()).eval();

  apriori_ = r_row - d_row * estimate_;
  estimate_.noalias() += gain_ * apriori_;
  ++k_;
}

InverseQrRls::InverseQrRls(const Regularizer& reg, Index d, Index r, Storage storage)
    : InverseQrRls(reg.diagonal(), r, storage) {
  if (reg.dim() != d) throw DimensionMismatch("iqrrls: regularizer dimension mismatch");
}

InverseQrRls::InverseQrRls(const Vector& gamma_diagonal, Index r, Storage storage)
    : d_(gamma_diagonal.size()), r_(r), storage_(storage) {
  if (r < 1) throw DimensionMismatch("iqrrls: target dimension must be positive");
  if ((gamma_diagonal.array() <= 0.0).any())
    throw NonpositiveGamma("iqrrls: penalty diagonal must be positive");
  const Vector inv_sqrt = gamma_diagonal.cwiseSqrt().cwiseInverse();
  if (storage_ == Storage::kDense) {
    pt_dense_ = Matrix::Zero(d_, d_);
    pt_dense_.diagonal() = inv_sqrt;
  } else {
    pt_packed_.assign(static_cast<std::size_t>(d_) * (d_ + 1) / 2, 0.0);
    for (Index i = 0; i < d_; ++i) pt(i, i) = inv_sqrt[i];
  }
  estimate_ = Matrix::Zero(d_, r_);
  gain_ = Vector::Zero(d_);
  apriori_ = RowVector::Zero(r_);
  work_b_.resize(d_);
  work_w_.resize(d_);
}

double& InverseQrRls::pt(Index i, Index j) {
  if (storage_ == Storage::kDense) return pt_dense_(i, j);
  const Index offset = i * d_ - i * (i - 1) / 2 + (j - i);
  return pt_packed_[static_cast<std::size_t>(offset)];
}

double InverseQrRls::pt_at(Index i, Index j) const {
  if (j < i) return 0.0;
  if (storage_ == Storage::kDense) return pt_dense_(i, j);
  const Index offset = i * d_ - i * (i - 1) / 2 + (j - i);
  return pt_packed_[static_cast<std::size_t>(offset)];
}

void InverseQrRls::update(ConstRowRef d_row, ConstRowRef r_row) {
  if (d_row.size() != d_ || r_row.size() != r_)
    throw DimensionMismatch("iqrrls: row length mismatch");

  // Border column of the pre-array: Pt * d^T (Pt upper triangular).
  for (Index i = 0; i < d_; ++i) {
    double acc = 0.0;
    for (Index j = i; j < d_; ++j) acc += pt_at(i, j) * d_row[j];
    work_b_[i] = acc;
  }
  work_w_.setZero();
  double head = 1.0;
  std::uint64_t ops = 0;

  // Annihilate the border bottom-up; rotations touch only columns >= i, so the
  // triangular profile survives and each sweep costs O(d - i).
  for (Index i = d_ - 1; i >= 0; --i) {
    const double bi = work_b_[i];
    if (bi == 0.0) continue;
    const double rho = std::hypot(head, bi);
    const double c = head / rho;
    const double s = bi / rho;
    head = rho;
    for (Index j = i; j < d_; ++j) {
      const double wj = work_w_[j];
      const double tij = pt(i, j);
      work_w_[j] = c * wj + s * tij;
      pt(i, j) = -s * wj + c * tij;
    }
    ops += 4 * static_cast<std::uint64_t>(d_ - i) + 6;
  }
  last_ops_ = ops;

  if (!std::isfinite(head) || head <= 0.0)
    throw NonfiniteUpdate("iqrrls: post-array head not finite and positive");

  gain_ = work_w_ / head;
  apriori_ = r_row - d_row * estimate_;
  estimate_.noalias() += gain_ * apriori_;
  ++k_;
}

Matrix InverseQrRls::sqrt_factor_transposed() const {
  Matrix out = Matrix::Zero(d_, d_);
  for (Index i = 0; i < d_; ++i)
    for (Index j = i; j < d_; ++j) out(i, j) = pt_at(i, j);
  return out;
}

Matrix InverseQrRls::inverse_correlation() const {
  const Matrix t = sqrt_factor_transposed();
  return t.transpose() * t;
}

Index InverseQrRls::storage_floats() const {
  const Index tri = storage_ == Storage::kDense ? pt_dense_.size()
                                                : static_cast<Index>(pt_packed_.size());
  return tri + estimate_.size() + work_b_.size() + work_w_.size();
}

Matrix batch_ls(const Matrix& dbar, const Matrix& rbar) {
  if (dbar.rows() != rbar.rows())
    throw DimensionMismatch("batch ls: row count mismatch");
  Eigen::ColPivHouseholderQR<Matrix> qr(dbar);
  if (qr.rank() < dbar.cols())
    throw RankDeficient("batch ls: stacked data matrix is column rank deficient");
  return qr.solve(rbar);
}

Matrix streaming_operator_error(const Matrix& o_batch, const Matrix& o_k) {
  if (o_batch.rows() != o_k.rows() || o_batch.cols() != o_k.cols())
    throw DimensionMismatch("streaming operator error: shape mismatch");
  return o_batch - o_k;
}

}  // namespace srom
