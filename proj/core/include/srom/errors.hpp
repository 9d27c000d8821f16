#pragma once

#include <stdexcept>
#include <string>

namespace srom {

/// Base class for all srom error conditions.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZeroSnapshot : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct IndexOutOfRange : Error {
  using Error::Error;
};
struct DuplicateIndex : Error {
  using Error::Error;
};
struct RankDeficientSketch : Error {
  using Error::Error;
};
struct NonpositiveGamma : Error {
  using Error::Error;
};
struct NonfiniteUpdate : Error {
  using Error::Error;
};
struct RankDeficient : Error {
  using Error::Error;
};
struct MissingDerivatives : Error {
  using Error::Error;
};
struct AllUnstable : Error {
  using Error::Error;
};
struct Extrapolation : Error {
  using Error::Error;
};
struct InconsistentDimensions : Error {
  using Error::Error;
};
struct NonfiniteState : Error {
  using Error::Error;
};
struct UndefinedDimension : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

}  // namespace srom
