#pragma once

#include <cstdint>

#include "srom/sparse_sign.hpp"
#include "srom/truncated_svd.hpp"
#include "srom/types.hpp"

namespace srom {

/// One-pass randomized streaming SVD. Three sketches (range, corange, core)
/// accumulate products of the data with fixed sparse sign maps; each snapshot
/// costs O(n * zeta) and nothing proportional to n*K is ever stored. The
/// factorization is recovered after the stream ends.
///
/// Sketch sizes follow q = 4r + 1, s = 2q + 1, zeta = min(q, 8). Updates are
/// sequential per instance; the reduction maps are immutable after
/// construction and safe to share read-only.
class SketchySvd {
 public:
  SketchySvd(Index n, Index total_snapshots, Index r, std::uint64_t seed);

  /// Accumulates snapshot k (1-based; each k exactly once, in order).
  void update(ConstVectorRef x, Index k);
  /// update() with the running index.
  void push(ConstVectorRef x) { update(x, processed_ + 1); }

  /// Recovers a rank-r factorization from the sketches. Uses only the
  /// snapshots streamed so far, so intermediate checkpoints are valid.
  /// Throws RankDeficientSketch when the sketched data has nonzero numerical
  /// rank below `r`.
  TruncatedSvd finalize(Index r) const;
  TruncatedSvd finalize() const { return finalize(target_rank_); }

  Index dim() const { return n_; }
  Index total_snapshots() const { return total_; }
  Index processed() const { return processed_; }
  Index target_rank() const { return target_rank_; }
  Index range_size() const { return q_; }
  Index core_size() const { return s_; }
  int sparsity() const { return zeta_; }
  std::uint64_t seed() const { return seed_; }
  /// Set when s > min(n, K) at construction: compression offers no savings.
  bool oversized() const { return oversized_; }

  const Matrix& range_sketch() const { return range_; }
  const Matrix& corange_sketch() const { return corange_; }
  const Matrix& core_sketch() const { return core_; }
  const SparseSignMatrix& corange_map() const { return upsilon_; }
  const SparseSignMatrix& range_map() const { return omega_; }
  const SparseSignMatrix& core_left_map() const { return xi_; }
  const SparseSignMatrix& core_right_map() const { return psi_; }

  /// Allocated doubles across sketches and maps.
  Index storage_floats() const;

 private:
  Index n_;
  Index total_;
  Index target_rank_;
  Index q_, s_;
  int zeta_;
  std::uint64_t seed_;
  bool oversized_ = false;
  Index processed_ = 0;

  Matrix range_;    // n x q
  Matrix corange_;  // q x K
  Matrix core_;     // s x s

  SparseSignMatrix upsilon_;  // q x n
  SparseSignMatrix omega_;    // q x K
  SparseSignMatrix xi_;       // s x n
  SparseSignMatrix psi_;      // s x K
};

}  // namespace srom
