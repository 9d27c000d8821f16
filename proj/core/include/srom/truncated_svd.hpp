#pragma once

#include "srom/types.hpp"

namespace srom {

/// Rank-truncated SVD factors X ~= left * singular_values.asDiagonal() * right^T.
/// `left` is n x r, `right` is k x r (empty when right-vector tracking is off).
struct TruncatedSvd {
  Matrix left;
  Vector singular_values;
  Matrix right;

  Index rank() const { return singular_values.size(); }
};

}  // namespace srom
