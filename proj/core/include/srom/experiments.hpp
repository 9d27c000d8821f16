#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "srom/config.hpp"
#include "srom/types.hpp"

namespace srom {

/// Data-generation summary (also produced by --dry-run without writing).
struct GenerateSummary {
  std::vector<std::string> files;
  std::uint64_t bytes = 0;
  Index total_snapshots = 0;
};

GenerateSummary generate_data(const ExperimentConfig& cfg, bool dry_run);

/// Per-rank results of the Burgers study; vectors index r_values.
struct BurgersSummary {
  std::vector<Index> r_values;
  std::vector<double> subspace_angle;
  std::vector<double> rpe_stream;
  std::vector<double> rpe_batch;
  std::vector<double> final_rse_stream_train;
  std::vector<double> final_rse_batch_train;
  std::vector<double> final_rse_intrusive_train;
  std::vector<double> final_rse_stream_test;
  std::vector<double> final_rse_batch_test;
  double svd_reduction = 0.0;
  double ls_reduction = 0.0;
  double total_reduction = 0.0;
  double measured_svd_storage_floats = 0.0;
  double formula_svd_storage_floats = 0.0;
};

BurgersSummary run_burgers_experiment(const ExperimentConfig& cfg);

struct KseSummary {
  std::vector<Index> r_values;
  std::vector<double> subspace_angle;
  std::vector<double> rpe_stream;
  std::vector<double> mrsoe_final;
  Vector full_lyapunov;
  double full_kaplan_yorke = 0.0;
  Vector rom_lyapunov;  // at the largest requested rank
  double rom_kaplan_yorke = 0.0;
  double svd_reduction = 0.0;
  double ls_reduction = 0.0;
  double total_reduction = 0.0;
};

KseSummary run_kse_experiment(const ExperimentConfig& cfg);

/// Streams user-provided snapshot files through the configured paradigm and
/// writes the learned operators plus basic metrics.
void run_custom_experiment(const ExperimentConfig& cfg);

int cmd_generate(const ExperimentConfig& cfg, bool dry_run);
int cmd_run(const ExperimentConfig& cfg);
int cmd_compare(const std::string& run_a, const std::string& run_b);

}  // namespace srom
