#include "srom/preprocess.hpp"

#include <limits>

#include "srom/errors.hpp"

namespace srom {

Preprocessor::Preprocessor(Index n) : n_(n) {
  if (n < 1) throw DimensionMismatch("preprocessor: dimension must be positive");
  sum_ = Vector::Zero(n);
  min_raw_ = Vector::Constant(n, std::numeric_limits<double>::infinity());
  max_raw_ = Vector::Constant(n, -std::numeric_limits<double>::infinity());
}

void Preprocessor::observe(ConstVectorRef x) {
  if (x.size() != n_) throw DimensionMismatch("preprocessor: snapshot length mismatch");
  if (fitted_) throw Error("preprocessor: observe after finish");
  sum_ += x;
  min_raw_ = min_raw_.cwiseMin(x);
  max_raw_ = max_raw_.cwiseMax(x);
  ++count_;
}

void Preprocessor::finish() {
  if (count_ == 0) throw Error("preprocessor: no snapshots observed");
  mean_ = sum_ / static_cast<double>(count_);
  // Centering shifts min/max by the same constant, so one pass suffices.
  lo_ = min_raw_ - mean_;
  hi_ = max_raw_ - mean_;
  fitted_ = true;
}

Vector Preprocessor::apply(ConstVectorRef x) const {
  if (!fitted_) throw Error("preprocessor: not fitted");
  if (x.size() != n_) throw DimensionMismatch("preprocessor: snapshot length mismatch");
  Vector y(n_);
  for (Index i = 0; i < n_; ++i) {
    const double span = hi_[i] - lo_[i];
    const double centered = x[i] - mean_[i];
    y[i] = span > 0.0 ? 2.0 * (centered - lo_[i]) / span - 1.0 : centered;
  }
  return y;
}

Vector Preprocessor::invert(ConstVectorRef y) const {
  if (!fitted_) throw Error("preprocessor: not fitted");
  if (y.size() != n_) throw DimensionMismatch("preprocessor: snapshot length mismatch");
  Vector x(n_);
  for (Index i = 0; i < n_; ++i) {
    const double span = hi_[i] - lo_[i];
    x[i] = span > 0.0 ? (y[i] + 1.0) * 0.5 * span + lo_[i] + mean_[i] : y[i] + mean_[i];
  }
  return x;
}

}  // namespace srom
