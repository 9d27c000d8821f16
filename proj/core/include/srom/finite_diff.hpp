#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "srom/types.hpp"

namespace srom {

enum class FdScheme { kForward1, kCentral4 };

/// Time-derivative approximation as a sparse band matrix Delta (k x ktilde)
/// acting on snapshot sequences from the right, plus the column selector that
/// aligns snapshot columns with derivative columns.
///
/// forward1 drops the last column (ktilde = k - 1); central4 keeps all k
/// columns, switching to one-sided fourth-order stencils at the ends.
class FiniteDifference {
 public:
  FiniteDifference(FdScheme scheme, double dt);

  FdScheme scheme() const { return scheme_; }
  double dt() const { return dt_; }

  /// Snapshots touched by one derivative column.
  Index stencil_width() const { return scheme_ == FdScheme::kForward1 ? 2 : 5; }
  /// Minimum stream length the scheme supports.
  Index min_samples() const { return stencil_width(); }
  Index sample_count(Index k) const;

  /// 0-based snapshot indices kept by the selector, one per derivative column.
  std::vector<Index> selected_indices(Index k) const;

  /// Nonzeros of Delta's column j as (snapshot index, coefficient) pairs.
  std::vector<std::pair<Index, double>> column_stencil(Index k, Index j) const;

  /// Dense Delta (k x ktilde); intended for small k.
  Matrix difference_matrix(Index k) const;
  /// Dense selector S (k x ktilde).
  Matrix selector_matrix(Index k) const;

  /// X * Delta for columnwise sequences.
  Matrix differentiate(ConstMatrixRef x) const;

 private:
  FdScheme scheme_;
  double dt_;
};

/// Streams (snapshot, derivative) pairs out of a sequential snapshot feed,
/// buffering exactly one stencil width of vectors.
class FdRowStreamer {
 public:
  using Emit = std::function<void(Index, const Vector&, const Vector&)>;

  FdRowStreamer(const FiniteDifference& fd, Index expected_count);

  void push(ConstVectorRef x, const Emit& emit);
  void finish(const Emit& emit);

 private:
  FiniteDifference fd_;
  Index expected_;
  Index seen_ = 0;
  std::vector<Vector> ring_;  // last stencil_width() snapshots

  const Vector& buffered(Index index) const;
  Vector derivative_at(Index j) const;
};

FdScheme fd_scheme_from_string(const std::string& name);
std::string to_string(FdScheme scheme);

}  // namespace srom
