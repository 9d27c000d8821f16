#pragma once

#include "srom/types.hpp"

namespace srom {

/// Componentwise mean-centering followed by min-max scaling to [-1, 1].
/// Statistics come from one streaming pass (observe each training snapshot
/// once, then finish). Components whose range collapses to a point pass
/// through mean-centered with unit scale.
class Preprocessor {
 public:
  explicit Preprocessor(Index n);

  void observe(ConstVectorRef x);
  void finish();
  bool fitted() const { return fitted_; }

  Vector apply(ConstVectorRef x) const;
  Vector invert(ConstVectorRef y) const;

  Index dim() const { return n_; }
  const Vector& mean() const { return mean_; }
  /// Temporal minimum of the centered data.
  const Vector& lo() const { return lo_; }
  /// Temporal maximum of the centered data.
  const Vector& hi() const { return hi_; }

 private:
  Index n_;
  Index count_ = 0;
  bool fitted_ = false;
  Vector sum_;
  Vector min_raw_;
  Vector max_raw_;
  Vector mean_, lo_, hi_;
};

}  // namespace srom
