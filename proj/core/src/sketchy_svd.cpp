#include "srom/sketchy_svd.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cstdio>

#include "srom/errors.hpp"

namespace srom {

SketchySvd::SketchySvd(Index n, Index total_snapshots, Index r, std::uint64_t seed)
    : n_(n),
      total_(total_snapshots),
      target_rank_(r),
      q_(4 * r + 1),
      s_(2 * (4 * r + 1) + 1),
      zeta_(static_cast<int>(std::min<Index>(q_, 8))),
      seed_(seed) {
  if (n < 1 || total_snapshots < 1)
    throw DimensionMismatch("sketchy svd: dimensions must be positive");
  if (r < 1) throw DimensionMismatch("sketchy svd: rank must be positive");
  if (s_ > std::min(n_, total_)) {
    oversized_ = true;
    std::fprintf(stderr,
                 "[srom] warning: sketch size s=%lld exceeds min(n,K)=%lld; "
                 "sketching offers no compression\n",
                 static_cast<long long>(s_),
                 static_cast<long long>(std::min(n_, total_)));
  }

  range_ = Matrix::Zero(n_, q_);
  corange_ = Matrix::Zero(q_, total_);
  core_ = Matrix::Zero(s_, s_);

  const int zeta_n = static_cast<int>(std::min<Index>(zeta_, n_));
  const int zeta_k = static_cast<int>(std::min<Index>(zeta_, total_));
  upsilon_ = SparseSignMatrix(q_, n_, zeta_n, seed, 1);
  omega_ = SparseSignMatrix(q_, total_, zeta_k, seed, 2);
  xi_ = SparseSignMatrix(s_, n_, zeta_n, seed, 3);
  psi_ = SparseSignMatrix(s_, total_, zeta_k, seed, 4);
}

void SketchySvd::update(ConstVectorRef x, Index k) {
  if (x.size() != n_) throw DimensionMismatch("sketchy svd: snapshot length mismatch");
  if (k < 1 || k > total_) throw IndexOutOfRange("sketchy svd: snapshot index out of range");
  if (k <= processed_) throw DuplicateIndex("sketchy svd: snapshot index already consumed");
  if (k != processed_ + 1)
    throw IndexOutOfRange("sketchy svd: snapshots must arrive in order");

  omega_.add_outer(range_, x, k - 1);
  corange_.col(k - 1) += upsilon_.apply(x);
  const Vector compressed = xi_.apply(x);
  psi_.add_outer(core_, compressed, k - 1);
  processed_ = k;
}

TruncatedSvd SketchySvd::finalize(Index r) const {
  if (r < 1 || r > q_) throw DimensionMismatch("sketchy svd: finalize rank out of range");
  const Index k = std::max<Index>(processed_, 1);

  Eigen::HouseholderQR<Matrix> range_qr(range_);
  Matrix q_range = range_qr.householderQ() * Matrix::Identity(n_, q_);

  Matrix corange_t = corange_.leftCols(k).transpose();  // k x q
  const Index qc = std::min(q_, k);
  Eigen::HouseholderQR<Matrix> corange_qr(corange_t);
  Matrix q_corange = corange_qr.householderQ() * Matrix::Identity(k, qc);

  // Least-squares core: solve (Xi Q_range) C (Psi Q_corange)^T = core sketch.
  Matrix left_factor = xi_.apply_matrix(q_range);                 // s x q
  Matrix right_factor = psi_.apply_leading(q_corange, k);  // s x qc

  Eigen::CompleteOrthogonalDecomposition<Matrix> left_pinv(left_factor);
  left_pinv.setThreshold(1e-12);
  Eigen::CompleteOrthogonalDecomposition<Matrix> right_pinv(right_factor);
  right_pinv.setThreshold(1e-12);

  Matrix core = left_pinv.solve(core_);                       // q x s
  core = right_pinv.solve(core.transpose()).transpose();      // q x qc

  Eigen::BDCSVD<Matrix> svd(core, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double sigma_max = svd.singularValues().size() > 0 ? svd.singularValues()[0] : 0.0;
  if (sigma_max > 0.0) {
    Index numerical_rank = 0;
    for (Index j = 0; j < svd.singularValues().size(); ++j)
      if (svd.singularValues()[j] > 1e-12 * sigma_max) ++numerical_rank;
    if (numerical_rank < r)
      throw RankDeficientSketch("sketchy svd: sketched data rank below requested rank");
  }

  TruncatedSvd out;
  const Index rr = std::min<Index>(r, svd.singularValues().size());
  out.left.noalias() = q_range * svd.matrixU().leftCols(rr);
  out.singular_values = svd.singularValues().head(rr);
  out.right.noalias() = q_corange * svd.matrixV().leftCols(rr);
  if (rr < r) {
    // Zero-pad the degenerate case (all-zero data) to the requested rank.
    Matrix left = Matrix::Zero(n_, r);
    left.leftCols(rr) = out.left;
    Matrix right = Matrix::Zero(k, r);
    right.leftCols(rr) = out.right;
    Vector vals = Vector::Zero(r);
    vals.head(rr) = out.singular_values;
    out.left = left;
    out.right = right;
    out.singular_values = vals;
  }
  return out;
}

Index SketchySvd::storage_floats() const {
  return range_.size() + corange_.size() + core_.size() + upsilon_.storage_floats() +
         omega_.storage_floats() + xi_.storage_floats() + psi_.storage_floats();
}

}  // namespace srom
