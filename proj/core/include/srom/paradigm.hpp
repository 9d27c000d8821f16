#pragma once

#include <string>

#include "srom/errors.hpp"

namespace srom {

/// The four streaming pipelines: reformulated data (from SVD factors) or
/// projected data (second pass), solved in batch or recursively.
enum class Paradigm { kLs, kRls, kProjectLs, kProjectRls };

enum class SvdMethod { kIncremental, kSketchy };

enum class RlsMethod { kStandard, kInverseQr };

inline Paradigm paradigm_from_string(const std::string& s) {
  if (s == "isvd-ls") return Paradigm::kLs;
  if (s == "isvd-rls") return Paradigm::kRls;
  if (s == "isvd-project-ls") return Paradigm::kProjectLs;
  if (s == "isvd-project-rls") return Paradigm::kProjectRls;
  throw ConfigError("unknown paradigm: " + s);
}

inline std::string to_string(Paradigm p) {
  switch (p) {
    case Paradigm::kLs: return "isvd-ls";
    case Paradigm::kRls: return "isvd-rls";
    case Paradigm::kProjectLs: return "isvd-project-ls";
    default: return "isvd-project-rls";
  }
}

inline bool is_recursive(Paradigm p) {
  return p == Paradigm::kRls || p == Paradigm::kProjectRls;
}
inline bool is_projected(Paradigm p) {
  return p == Paradigm::kProjectLs || p == Paradigm::kProjectRls;
}

inline SvdMethod svd_method_from_string(const std::string& s) {
  if (s == "baker") return SvdMethod::kIncremental;
  if (s == "sketchy") return SvdMethod::kSketchy;
  throw ConfigError("unknown svd method: " + s);
}

inline std::string to_string(SvdMethod m) {
  return m == SvdMethod::kIncremental ? "baker" : "sketchy";
}

inline RlsMethod rls_method_from_string(const std::string& s) {
  if (s == "standard") return RlsMethod::kStandard;
  if (s == "iqr") return RlsMethod::kInverseQr;
  throw ConfigError("unknown rls method: " + s);
}

inline std::string to_string(RlsMethod m) {
  return m == RlsMethod::kStandard ? "standard" : "iqr";
}

}  // namespace srom
