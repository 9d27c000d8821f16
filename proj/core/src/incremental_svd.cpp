#include "srom/incremental_svd.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>

#include "srom/errors.hpp"

namespace srom {

namespace {
constexpr double kZeroNorm = 1e-14;
constexpr double kDegenerateResidual = 1e-12;

// Deterministic unit vector orthogonal to the first `rank` columns of basis.
// Assumes rank < basis.rows().
Vector orthogonal_completion(const Matrix& basis, Index rank) {
  const Index n = basis.rows();
  Vector best;
  for (Index i = 0; i < n; ++i) {
    Vector v = Vector::Zero(n);
    v[i] = 1.0;
    v.noalias() -= basis.leftCols(rank) * (basis.leftCols(rank).transpose() * v);
    const double nrm = v.norm();
    if (nrm > 1e-3) {
      v /= nrm;
      v.noalias() -= basis.leftCols(rank) * (basis.leftCols(rank).transpose() * v);
      return v / v.norm();
    }
  }
  return Vector::Zero(n);  // unreachable for rank < n
}
}  // namespace

IncrementalSvd::IncrementalSvd(Index n, Index r_max, bool track_right)
    : n_(n), r_max_(std::min(r_max, n)), track_right_(track_right) {
  if (n < 1) throw DimensionMismatch("incremental svd: dimension must be positive");
  if (r_max < 1) throw DimensionMismatch("incremental svd: rank cap must be positive");
  left_.resize(n_, r_max_);
  values_ = Vector::Zero(r_max_);
}

void IncrementalSvd::init(ConstVectorRef x1) {
  if (x1.size() != n_) throw DimensionMismatch("incremental svd: snapshot length mismatch");
  const double nrm = x1.norm();
  if (nrm < kZeroNorm) throw ZeroSnapshot("incremental svd: cannot initialize from zero snapshot");
  left_.col(0) = x1 / nrm;
  values_[0] = nrm;
  rank_ = 1;
  ++count_;
  if (track_right_) {
    right_capacity_ = std::max<Index>(16, count_);
    right_.setZero(right_capacity_, r_max_ + 1);
    right_(count_ - 1, 0) = 1.0;
  }
  initialized_ = true;
}

void IncrementalSvd::push(ConstVectorRef x) {
  if (initialized_) {
    update(x);
    return;
  }
  if (x.norm() < kZeroNorm) {
    // Leading zero columns defer initialization; they become zero rows of the
    // right factor once the first nonzero snapshot arrives.
    ++count_;
    return;
  }
  init(x);
}

void IncrementalSvd::update(ConstVectorRef x) {
  if (!initialized_) throw Error("incremental svd: update before init");
  if (x.size() != n_) throw DimensionMismatch("incremental svd: snapshot length mismatch");

  const Index r = rank_;
  const double xnorm = x.norm();

  // Two-pass Gram-Schmidt split of the snapshot.
  Vector proj = left_.leftCols(r).transpose() * x;
  Vector resid = x - left_.leftCols(r) * proj;
  Vector proj2 = left_.leftCols(r).transpose() * resid;
  resid.noalias() -= left_.leftCols(r) * proj2;
  proj += proj2;
  const double p = resid.norm();

  Vector dir;
  if (p <= kDegenerateResidual * xnorm || p == 0.0) {
    // Snapshot numerically inside the current span: the middle matrix keeps
    // the computed p, but the appended direction must stay orthonormal.
    dir = (r < n_) ? orthogonal_completion(left_, r) : Vector::Zero(n_);
  } else {
    dir = resid / p;
  }

  Matrix middle = Matrix::Zero(r + 1, r + 1);
  middle.topLeftCorner(r, r).diagonal() = values_.head(r);
  middle.topRightCorner(r, 1) = proj;
  middle(r, r) = p;

  Eigen::JacobiSVD<Matrix> svd(middle, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Index new_rank = std::min(r + 1, r_max_);

  Matrix rot_left = svd.matrixU().leftCols(new_rank);  // (r+1) x new_rank
  Matrix new_left(n_, new_rank);
  new_left.noalias() = left_.leftCols(r) * rot_left.topRows(r);
  new_left.noalias() += dir * rot_left.row(r);
  left_.leftCols(new_rank) = new_left;
  values_.head(new_rank) = svd.singularValues().head(new_rank);
  if (new_rank < r_max_) values_.tail(r_max_ - new_rank).setZero();

  if (track_right_) {
    const Matrix rot_right = svd.matrixV().leftCols(new_rank);  // (r+1) x new_rank
    ensure_right_capacity(count_ + 1);
    // Rows already present rotate by the top block; the new snapshot
    // contributes the bottom row of the rotation.
    Matrix rotated(count_, new_rank);
    rotated.noalias() = right_.topRows(count_).leftCols(r) * rot_right.topRows(r);
    right_.topRows(count_).leftCols(new_rank) = rotated;
    right_.row(count_).setZero();
    right_.row(count_).head(new_rank) = rot_right.row(r);
  }

  rank_ = new_rank;
  ++count_;
}

void IncrementalSvd::ensure_right_capacity(Index rows) {
  if (rows <= right_capacity_) return;
  const Index new_cap = std::max<Index>(right_capacity_ * 2, rows);
  Matrix grown = Matrix::Zero(new_cap, r_max_ + 1);
  grown.topRows(count_) = right_.topRows(count_);
  right_.swap(grown);
  right_capacity_ = new_cap;
}

Matrix IncrementalSvd::right() const {
  if (!track_right_) return Matrix();
  return right_.topRows(count_).leftCols(rank_);
}

TruncatedSvd IncrementalSvd::factors() const {
  TruncatedSvd out;
  out.left = left_.leftCols(rank_);
  out.singular_values = values_.head(rank_);
  out.right = right();
  return out;
}

Index IncrementalSvd::storage_floats() const {
  return left_.size() + values_.size() + right_.size();
}

}  // namespace srom
