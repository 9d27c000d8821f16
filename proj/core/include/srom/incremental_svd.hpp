#pragma once

#include <cstdint>

#include "srom/truncated_svd.hpp"
#include "srom/types.hpp"

namespace srom {

/// Streaming truncated SVD updated one snapshot at a time.
///
/// Each update appends a column to the implicitly factored matrix: the new
/// snapshot is split into its projection onto the current left basis and an
/// orthogonal residual (with a second Gram-Schmidt pass), a small
/// (rank+1)-square middle matrix is re-decomposed, and the factors are rotated
/// and truncated back to at most `r_max` modes. Memory stays O(n * r_max) plus
/// O(k * r_max) when right-vector tracking is enabled.
///
/// Updates are sequential per instance; instances may move between threads
/// between calls.
class IncrementalSvd {
 public:
  /// r_max: target rank cap. track_right: keep the k x r right factor
  /// (needed by reformulated regression; skip for projection-only pipelines).
  IncrementalSvd(Index n, Index r_max, bool track_right = true);

  /// Seeds the factorization from the first snapshot. Throws ZeroSnapshot when
  /// ||x1|| < 1e-14.
  void init(ConstVectorRef x1);

  /// Rank-1 append of one snapshot; init must have run.
  void update(ConstVectorRef x);

  /// init-or-update convenience for stream loops. Zero snapshots arriving
  /// before the first nonzero one defer initialization but still count as
  /// columns, so the right factor keeps one row per streamed snapshot.
  void push(ConstVectorRef x);

  bool initialized() const { return initialized_; }
  Index dim() const { return n_; }
  Index rank() const { return rank_; }
  Index snapshot_count() const { return count_; }
  Index max_rank() const { return r_max_; }
  bool tracks_right() const { return track_right_; }

  /// Left singular vectors, n x rank().
  Matrix left() const { return left_.leftCols(rank_); }
  /// Singular values, descending.
  ConstVectorRef singular_values() const { return values_.head(rank_); }
  /// Right singular vectors, snapshot_count() x rank(). Empty when tracking
  /// is off.
  Matrix right() const;

  TruncatedSvd factors() const;

  /// Allocated doubles across members and persistent workspace.
  Index storage_floats() const;

 private:
  Index n_;
  Index r_max_;
  bool track_right_;
  bool initialized_ = false;
  Index rank_ = 0;
  Index count_ = 0;  // snapshots streamed, including leading zeros

  Matrix left_;    // n x r_max, first rank_ columns valid
  Vector values_;  // r_max
  Matrix right_;   // capacity-managed, first count_ rows / rank_ cols valid
  Index right_capacity_ = 0;

  void ensure_right_capacity(Index rows);
};

}  // namespace srom
