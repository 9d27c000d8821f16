#pragma once

#include <cstdint>
#include <vector>

#include "srom/types.hpp"

namespace srom {

/// Random reduction map with exactly `zeta` signed nonzeros per column, each
/// equal to +-1/sqrt(zeta). Stored column-wise so products against streamed
/// vectors cost O(cols * zeta) instead of dense work.
///
/// Columns are drawn from a counter-based generator keyed by (seed, column),
/// so construction is reproducible and order-independent.
class SparseSignMatrix {
 public:
  SparseSignMatrix() = default;
  SparseSignMatrix(Index rows, Index cols, int zeta, std::uint64_t seed,
                   std::uint64_t stream_tag);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  int nonzeros_per_column() const { return zeta_; }

  /// y = A * x with x of length cols().
  Vector apply(ConstVectorRef x) const;

  /// acc += x * row(A^T, col) = x * A(:, col)^T. acc is rows(x) x rows(A).
  void add_outer(Matrix& acc, ConstVectorRef x, Index col) const;

  /// A * M for a dense M with M.rows() == cols().
  Matrix apply_matrix(ConstMatrixRef m) const;

  /// A(:, 0:count) * M for a dense M with M.rows() == count.
  Matrix apply_leading(ConstMatrixRef m, Index count) const;

  Matrix dense() const;

  /// Floats held by the map (value storage only; indices excluded).
  Index storage_floats() const { return static_cast<Index>(values_.size()); }

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  int zeta_ = 0;
  // Entry t of column j lives at [j * zeta_ + t].
  std::vector<Index> row_index_;
  std::vector<double> values_;
};

}  // namespace srom
