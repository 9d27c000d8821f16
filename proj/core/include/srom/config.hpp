#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "srom/types.hpp"

namespace srom {

/// Line-oriented key=value experiment description. Unknown keys are rejected;
/// serialize() followed by parse() reproduces the configuration exactly.
struct ExperimentConfig {
  std::string experiment = "custom-stream";  // burgers | kse | custom-stream
  std::vector<std::string> paradigms = {"isvd-ls"};
  std::string svd_method = "sketchy";
  std::string rls_method = "iqr";
  std::vector<Index> r_list;
  double gamma1 = 1e-9;
  double gamma2 = 1e-9;
  std::vector<double> gamma1_grid;  // nonempty: run grid search
  std::vector<double> gamma2_grid;
  std::string fd_scheme = "forward1";
  double dt = 0.0;
  std::vector<Index> checkpoints;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  std::string data_dir;  // defaults to out_dir when empty

  // Data generation / experiment scale.
  Index n = 0;
  double t_final = 0.0;
  Index store_every = 1;
  std::vector<double> mu_list;
  Index trace_stride = 0;

  // Chaos diagnostics.
  Index le_count = 10;
  double le_t_total = 500.0;
  double le_dt = 1e-3;
  Index le_renorm = 10;

  // custom-stream inputs.
  std::vector<std::string> train_files;
  std::vector<std::string> deriv_files;
  std::vector<std::string> input_files;
  std::string validation_file;

  /// Keys explicitly present in the parsed text (defaults are not overridden
  /// for these by apply_defaults).
  std::set<std::string> keys_seen;

  std::string serialize() const;
  static ExperimentConfig parse_file(const std::string& path);
  static ExperimentConfig parse_string(const std::string& text);

  /// Fills unset scale fields with the published setup for the experiment.
  void apply_defaults();
};

/// Grid specifications: either "log:<lo>:<hi>:<count>" (log-equidistant,
/// endpoints included) or a comma-separated value list.
std::vector<double> parse_value_grid(const std::string& text);

}  // namespace srom
