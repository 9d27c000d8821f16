// Command-line front end: data generation, streaming pipeline runs, and run
// comparison. Machine-readable output goes to stdout, progress to stderr.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>

#include "srom/config.hpp"
#include "srom/errors.hpp"
#include "srom/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

srom::ExperimentConfig load_config(const std::string& path, bool has_seed,
                                   std::uint64_t seed, const std::string& out_dir) {
  srom::ExperimentConfig cfg = srom::ExperimentConfig::parse_file(path);
  if (has_seed) cfg.seed = seed;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  cfg.apply_defaults();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"streaming reduced-operator learning benchmark"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool dry_run = false;

  auto add_common = [&](CLI::App* cmd, bool with_dry_run) {
    cmd->add_option("--config", config_path, "experiment config file")->required();
    cmd->add_option("--seed", seed, "override the config seed");
    cmd->add_option("--out", out_dir, "override the output directory");
    if (with_dry_run) cmd->add_flag("--dry-run", dry_run, "report sizes without writing");
  };

  CLI::App* generate = app.add_subcommand("generate", "write snapshot datasets");
  add_common(generate, true);
  CLI::App* run = app.add_subcommand("run", "run streaming pipelines and baselines");
  add_common(run, false);

  CLI::App* compare = app.add_subcommand("compare", "tabulate metric ratios of two runs");
  std::string run_a, run_b;
  compare->add_option("runA", run_a, "first run directory")->required();
  compare->add_option("runB", run_b, "second run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  const bool has_seed = app.count_all() && (generate->count("--seed") || run->count("--seed"));

  try {
    if (generate->parsed()) {
      return srom::cmd_generate(load_config(config_path, has_seed, seed, out_dir), dry_run);
    }
    if (run->parsed()) {
      return srom::cmd_run(load_config(config_path, has_seed, seed, out_dir));
    }
    if (compare->parsed()) {
      return srom::cmd_compare(run_a, run_b);
    }
  } catch (const srom::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const srom::AllUnstable& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  } catch (const srom::NonfiniteState& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  } catch (const srom::NonfiniteUpdate& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  } catch (const srom::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return kExitOk;
}
