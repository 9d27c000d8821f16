#include "srom/experiments.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

#include "srom/errors.hpp"
#include "srom/incremental_svd.hpp"
#include "srom/lyapunov.hpp"
#include "srom/metrics.hpp"
#include "srom/models.hpp"
#include "srom/opinf.hpp"
#include "srom/rng.hpp"
#include "srom/sketchy_svd.hpp"
#include "srom/snapshot_io.hpp"

namespace srom {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void progress(Index streamed) {
  if (streamed % 1000 == 0)
    std::fprintf(stderr, "[srom] streamed %lld snapshots\n",
                 static_cast<long long>(streamed));
}

/// Deterministic CSV sink: one schema header line, then rows.
class CsvFile {
 public:
  CsvFile(const fs::path& path, const std::string& header) {
    out_.open(path);
    if (!out_) throw IoError("csv: cannot open " + path.string());
    out_ << header << "\n";
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ",";
      out_ << cells[i];
    }
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

std::string burgers_state_file(const fs::path& dir, std::size_t i) {
  char name[64];
  std::snprintf(name, sizeof(name), "burgers_mu%02zu.srom", i);
  return (dir / name).string();
}
std::string burgers_input_file(const fs::path& dir, std::size_t i) {
  char name[64];
  std::snprintf(name, sizeof(name), "burgers_mu%02zu_inputs.srom", i);
  return (dir / name).string();
}
std::string kse_state_file(const fs::path& dir, std::size_t i) {
  char name[64];
  std::snprintf(name, sizeof(name), "kse_traj%02zu.srom", i);
  return (dir / name).string();
}
std::string kse_deriv_file(const fs::path& dir, std::size_t i) {
  char name[64];
  std::snprintf(name, sizeof(name), "kse_traj%02zu_xdot.srom", i);
  return (dir / name).string();
}

/// Deterministic per-step uniform input u_k in [0, 1): the value depends only
/// on (seed, stream, step) so regenerated data is bit-identical.
InputSignal counter_input_signal(std::uint64_t seed, std::uint64_t stream) {
  return [seed, stream](double, Index step) -> Vector {
    CounterRng rng(seed ^ (0x5eedull + stream * 0x9e3779b97f4a7c15ull),
                   static_cast<std::uint64_t>(step));
    Vector u(1);
    u[0] = rng.next_unit();
    return u;
  };
}

InputSignal constant_input_signal(double value) {
  return [value](double, Index) -> Vector {
    Vector u(1);
    u[0] = value;
    return u;
  };
}

std::vector<std::pair<double, double>> kse_training_combos() {
  std::vector<std::pair<double, double>> combos;
  for (const double a : {0.2, 0.7, 1.2})
    for (const double b : {0.1, 0.5, 0.9}) combos.push_back({a, b});
  return combos;
}

std::uint64_t srom_file_bytes(Index rows, Index cols) {
  return 28ull + 8ull * static_cast<std::uint64_t>(rows) * static_cast<std::uint64_t>(cols);
}

/// Concatenated column source over in-memory matrices.
class PooledSource final : public SnapshotSource {
 public:
  explicit PooledSource(const std::vector<Matrix>* blocks) : blocks_(blocks) {
    for (const Matrix& b : *blocks_) total_ += b.cols();
  }
  Index dim() const override { return blocks_->empty() ? 0 : (*blocks_)[0].rows(); }
  Index count() const override { return total_; }
  bool next(Vector& out) override {
    while (block_ < blocks_->size() && col_ >= (*blocks_)[block_].cols()) {
      ++block_;
      col_ = 0;
    }
    if (block_ >= blocks_->size()) return false;
    out = (*blocks_)[block_].col(col_++);
    return true;
  }
  void reset() override {
    block_ = 0;
    col_ = 0;
  }

 private:
  const std::vector<Matrix>* blocks_;
  std::size_t block_ = 0;
  Index col_ = 0;
  Index total_ = 0;
};

struct BatchPod {
  Matrix basis;   // n x r_max
  Vector sigmas;  // r_max
};

/// Reference truncated POD basis via the Gram matrix of the pooled snapshots.
BatchPod batch_pod(const std::vector<Matrix>& blocks, Index r_max) {
  const Index n = blocks.front().rows();
  Matrix gram = Matrix::Zero(n, n);
  for (const Matrix& b : blocks) gram.noalias() += b * b.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  BatchPod pod;
  pod.basis.resize(n, r_max);
  pod.sigmas.resize(r_max);
  for (Index j = 0; j < r_max; ++j) {
    pod.basis.col(j) = eig.eigenvectors().col(n - 1 - j);
    pod.sigmas[j] = std::sqrt(std::max(0.0, eig.eigenvalues()[n - 1 - j]));
  }
  return pod;
}

/// Relative projection errors for every rank 1..r_max of two bases in one
/// pass over the data.
void rpe_profiles(const std::vector<Matrix>& blocks, const Matrix& basis_a,
                  const Matrix& basis_b, Vector& rpe_a, Vector& rpe_b) {
  const Index r_max = basis_a.cols();
  KahanSum total;
  std::vector<KahanSum> cum_a(static_cast<std::size_t>(r_max));
  std::vector<KahanSum> cum_b(static_cast<std::size_t>(r_max));
  for (const Matrix& block : blocks) {
    for (Index j = 0; j < block.cols(); ++j) {
      const Vector x = block.col(j);
      total.add(x.squaredNorm());
      const Vector ca = basis_a.transpose() * x;
      const Vector cb = basis_b.transpose() * x;
      double sa = 0.0, sb = 0.0;
      for (Index t = 0; t < r_max; ++t) {
        sa += ca[t] * ca[t];
        sb += cb[t] * cb[t];
        cum_a[static_cast<std::size_t>(t)].add(sa);
        cum_b[static_cast<std::size_t>(t)].add(sb);
      }
    }
  }
  rpe_a.resize(r_max);
  rpe_b.resize(r_max);
  for (Index t = 0; t < r_max; ++t) {
    rpe_a[t] = std::sqrt(
        std::max(0.0, 1.0 - cum_a[static_cast<std::size_t>(t)].value() / total.value()));
    rpe_b[t] = std::sqrt(
        std::max(0.0, 1.0 - cum_b[static_cast<std::size_t>(t)].value() / total.value()));
  }
}

double relative_state_error(const Matrix& reference, const Trajectory& rom,
                            const Matrix& basis) {
  if (!rom.finite || rom.states.cols() != reference.cols())
    return std::numeric_limits<double>::infinity();
  return (reference - basis * rom.states).norm() / reference.norm();
}

}  // namespace

// --------------------------------------------------------------------------
// Data generation
// --------------------------------------------------------------------------

GenerateSummary generate_data(const ExperimentConfig& cfg, bool dry_run) {
  GenerateSummary summary;
  const fs::path out(cfg.out_dir);
  if (!dry_run) fs::create_directories(out);

  if (cfg.experiment == "burgers") {
    const Index steps = static_cast<Index>(std::llround(cfg.t_final / cfg.dt));
    const Index snapshots = steps + 1;
    for (std::size_t i = 0; i < cfg.mu_list.size(); ++i) {
      const std::string state_path = burgers_state_file(out, i);
      const std::string input_path = burgers_input_file(out, i);
      summary.files.push_back(state_path);
      summary.files.push_back(input_path);
      summary.bytes += srom_file_bytes(cfg.n, snapshots) + srom_file_bytes(1, snapshots);
      summary.total_snapshots += snapshots;
      if (dry_run) continue;

      const FullModel model = burgers_model(cfg.n, cfg.mu_list[i]);
      const Trajectory traj =
          simulate_burgers(model, burgers_initial_condition(cfg.n),
                           counter_input_signal(cfg.seed, i), cfg.dt, cfg.t_final);
      write_matrix(state_path, traj.states);
      write_matrix(input_path, traj.inputs);
      write_metadata(state_path + ".meta",
                     {{"experiment", "burgers"},
                      {"dt", fmt(cfg.dt)},
                      {"mu", fmt(cfg.mu_list[i])},
                      {"ic", "0.1*sin(2*pi*w)"},
                      {"input_seed", std::to_string(cfg.seed)},
                      {"input_stream", std::to_string(i)}});
      std::fprintf(stderr, "[srom] wrote %s (%lld snapshots)\n", state_path.c_str(),
                   static_cast<long long>(traj.states.cols()));
    }
  } else if (cfg.experiment == "kse") {
    const auto combos = kse_training_combos();
    const Index steps = static_cast<Index>(std::llround(cfg.t_final / cfg.dt));
    const Index stored = steps / cfg.store_every;  // trailing column dropped
    for (std::size_t i = 0; i < combos.size(); ++i) {
      const std::string state_path = kse_state_file(out, i);
      const std::string deriv_path = kse_deriv_file(out, i);
      summary.files.push_back(state_path);
      summary.files.push_back(deriv_path);
      summary.bytes += 2 * srom_file_bytes(cfg.n, stored);
      summary.total_snapshots += stored;
      if (dry_run) continue;

      const auto [a, b] = combos[i];
      const FullModel model = kse_model(cfg.n, 22.0);
      const Trajectory traj = simulate_kse(model, kse_initial_condition(cfg.n, 22.0, a, b),
                                           cfg.dt, cfg.t_final, cfg.store_every);
      write_matrix(state_path, traj.states.leftCols(stored));
      write_matrix(deriv_path, traj.derivatives.leftCols(stored));
      write_metadata(state_path + ".meta",
                     {{"experiment", "kse"},
                      {"dt", fmt(cfg.dt)},
                      {"store_every", std::to_string(cfg.store_every)},
                      {"mu", "1"},
                      {"ic_a", fmt(a)},
                      {"ic_b", fmt(b)}});
      std::fprintf(stderr, "[srom] wrote %s (%lld snapshots)\n", state_path.c_str(),
                   static_cast<long long>(stored));
    }
  } else {
    throw ConfigError("generate: only burgers and kse datasets can be generated");
  }
  return summary;
}

// --------------------------------------------------------------------------
// Burgers study
// --------------------------------------------------------------------------

namespace {

struct BurgersData {
  std::vector<Matrix> states;  // per mu, n x K
  std::vector<Matrix> inputs;  // per mu, 1 x K
};

BurgersData load_or_generate_burgers(const ExperimentConfig& cfg) {
  BurgersData data;
  const fs::path dir(cfg.data_dir.empty() ? cfg.out_dir : cfg.data_dir);
  bool have_files = !cfg.mu_list.empty();
  for (std::size_t i = 0; i < cfg.mu_list.size() && have_files; ++i)
    have_files = fs::exists(burgers_state_file(dir, i)) &&
                 fs::exists(burgers_input_file(dir, i));

  for (std::size_t i = 0; i < cfg.mu_list.size(); ++i) {
    if (have_files) {
      data.states.push_back(read_matrix(burgers_state_file(dir, i)));
      data.inputs.push_back(read_matrix(burgers_input_file(dir, i)));
    } else {
      const FullModel model = burgers_model(cfg.n, cfg.mu_list[i]);
      const Trajectory traj =
          simulate_burgers(model, burgers_initial_condition(cfg.n),
                           counter_input_signal(cfg.seed, i), cfg.dt, cfg.t_final);
      data.states.push_back(traj.states);
      data.inputs.push_back(traj.inputs);
    }
  }
  return data;
}

}  // namespace

BurgersSummary run_burgers_experiment(const ExperimentConfig& cfg) {
  if (cfg.r_list.empty()) throw ConfigError("run: empty rank list");
  const Index r_max = *std::max_element(cfg.r_list.begin(), cfg.r_list.end());
  const Paradigm paradigm = paradigm_from_string(cfg.paradigms.front());
  const SvdMethod svd_method = svd_method_from_string(cfg.svd_method);
  const RlsMethod rls_method = rls_method_from_string(cfg.rls_method);
  const FiniteDifference fd(fd_scheme_from_string(cfg.fd_scheme), cfg.dt);
  if (is_projected(paradigm))
    throw ConfigError("run: the burgers study uses the reformulated paradigms");

  const fs::path out(cfg.out_dir);
  fs::create_directories(out / "operators");
  std::ofstream(out / "config.resolved") << cfg.serialize();

  const BurgersData data = load_or_generate_burgers(cfg);
  const std::size_t n_mu = data.states.size();
  const Index n = data.states.front().rows();
  const Index k_per_mu = data.states.front().cols();

  BurgersSummary summary;
  summary.r_values.assign(cfg.r_list.begin(), cfg.r_list.end());

  // ---- Streaming SVD phase over the pooled parameter blocks. ----
  Index total_snapshots = 0;
  for (const Matrix& block : data.states) total_snapshots += block.cols();

  TruncatedSvd stream;
  double measured_storage = 0.0;
  if (svd_method == SvdMethod::kSketchy) {
    SketchySvd sketch(n, total_snapshots, r_max, cfg.seed);
    Index streamed = 0;
    for (const Matrix& block : data.states)
      for (Index j = 0; j < block.cols(); ++j) {
        sketch.push(block.col(j));
        progress(++streamed);
      }
    measured_storage = static_cast<double>(sketch.storage_floats());
    stream = sketch.finalize(r_max);
  } else {
    IncrementalSvd isvd(n, r_max, /*track_right=*/true);
    Index streamed = 0;
    for (const Matrix& block : data.states)
      for (Index j = 0; j < block.cols(); ++j) {
        isvd.push(block.col(j));
        progress(++streamed);
      }
    measured_storage = static_cast<double>(isvd.storage_floats());
    stream = isvd.factors();
  }

  const BatchPod batch = batch_pod(data.states, r_max);

  Vector rpe_stream_all, rpe_batch_all;
  rpe_profiles(data.states, stream.left, batch.basis, rpe_stream_all, rpe_batch_all);
  for (const Index r : cfg.r_list) {
    summary.subspace_angle.push_back(
        subspace_angle_error(batch.basis.leftCols(r), stream.left.leftCols(r)));
    summary.rpe_stream.push_back(rpe_stream_all[r - 1]);
    summary.rpe_batch.push_back(rpe_batch_all[r - 1]);
  }

  // ---- Reference solutions under the evaluation input u(t) = 1. ----
  std::vector<Matrix> reference(n_mu);
  std::vector<FullModel> models;
  for (std::size_t i = 0; i < n_mu; ++i) {
    models.push_back(burgers_model(cfg.n, cfg.mu_list[i]));
    reference[i] = simulate_burgers(models[i], burgers_initial_condition(cfg.n),
                                    constant_input_signal(1.0), cfg.dt, cfg.t_final)
                       .states;
  }

  // Held-out parameters, evenly spaced inside the training range. Cubic
  // interpolation needs at least four training parameters; smaller studies
  // skip the generalization columns.
  std::vector<double> test_mus;
  if (cfg.mu_list.size() >= 4) {
    const double lo = cfg.mu_list.front();
    const double hi = cfg.mu_list.back();
    for (int i = 1; i <= 5; ++i) test_mus.push_back(lo + (hi - lo) * i / 6.0);
  }
  std::vector<Matrix> test_reference;
  for (const double mu : test_mus)
    test_reference.push_back(
        simulate_burgers(burgers_model(cfg.n, mu), burgers_initial_condition(cfg.n),
                         constant_input_signal(1.0), cfg.dt, cfg.t_final)
            .states);

  CsvFile svd_csv(out / "svd_assessment.csv", "r,subspace_angle,rpe_stream,rpe_batch");
  CsvFile rse_csv(out / "final_rse.csv",
                  "r,stream_train,batch_train,intrusive_train,stream_test,batch_test");
  CsvFile soe_csv(out / "mrsoe_trace.csv", "r,k,mrsoe");
  CsvFile sse_csv(out / "mrsse_trace.csv", "r,k,mrsse");

  for (std::size_t ri = 0; ri < cfg.r_list.size(); ++ri) {
    const Index r = cfg.r_list[ri];
    const OperatorStructure st{r, 1, false};
    const Matrix v_stream = stream.left.leftCols(r);
    const Matrix v_batch = batch.basis.leftCols(r);

    std::vector<ReducedModel> stream_models, batch_models, intrusive_models;
    std::vector<Matrix> stream_ref_ops(n_mu);
    std::vector<std::vector<Index>> trace_steps(n_mu);
    std::vector<std::vector<Matrix>> trace_ops(n_mu);

    Index row_offset = 0;
    for (std::size_t i = 0; i < n_mu; ++i) {
      const Index block_k = data.states[i].cols();
      const Matrix w_block = stream.right.middleRows(row_offset, block_k);
      row_offset += block_k;

      const auto [dbar, rbar] = build_reformulated(
          stream.singular_values, w_block, data.inputs[i], fd, cfg.gamma1, cfg.gamma2, st);
      stream_ref_ops[i] = batch_ls(dbar, rbar);

      Matrix stacked;
      if (paradigm == Paradigm::kLs) {
        stacked = stream_ref_ops[i];
      } else {
        auto rec = solve_recursive_reformulated(stream.singular_values, w_block,
                                                data.inputs[i], fd, cfg.gamma1, cfg.gamma2,
                                                st, rls_method, cfg.trace_stride);
        stacked = rec.stacked;
        trace_steps[i] = std::move(rec.trace_steps);
        trace_ops[i] = std::move(rec.trace_ops);
      }
      stream_models.push_back(ReducedModel::from_stacked(stacked, st));

      // Batch baseline: projected data onto the batch basis, batch solve.
      const Matrix xhat = v_batch.transpose() * data.states[i];
      const auto [dbar_b, rbar_b] =
          build_from_reduced(xhat, data.inputs[i], fd, cfg.gamma1, cfg.gamma2, st);
      batch_models.push_back(ReducedModel::from_stacked(batch_ls(dbar_b, rbar_b), st));

      intrusive_models.push_back(intrusive_galerkin(v_batch, models[i]));

      char opname[64];
      std::snprintf(opname, sizeof(opname), "stream_mu%02zu_r%02lld.srom", i,
                    static_cast<long long>(r));
      write_matrix((out / "operators" / opname).string(), stacked);
    }

    // MR-SOE / MR-SSE traces against the streaming-basis batch solutions.
    if (paradigm == Paradigm::kRls && cfg.trace_stride > 0 && !trace_steps[0].empty()) {
      const std::size_t points = trace_steps[0].size();
      for (std::size_t p = 0; p < points; ++p) {
        std::vector<Matrix> at_k(n_mu);
        bool complete = true;
        for (std::size_t i = 0; i < n_mu; ++i) {
          if (p >= trace_ops[i].size()) {
            complete = false;
            break;
          }
          at_k[i] = trace_ops[i][p];
        }
        if (!complete) break;
        soe_csv.row({std::to_string(r), std::to_string(trace_steps[0][p]),
                     fmt(mr_soe(stream_ref_ops, at_k))});
        std::vector<Matrix> rom_states(n_mu);
        for (std::size_t i = 0; i < n_mu; ++i) {
          const ReducedModel interim = ReducedModel::from_stacked(at_k[i], st);
          const Trajectory traj = integrate_rom(
              interim, v_stream.transpose() * reference[i].col(0),
              constant_input_signal(1.0), cfg.dt, cfg.t_final,
              TimeScheme::kSemiImplicitEuler);
          rom_states[i] = traj.finite ? traj.states : Matrix();
        }
        sse_csv.row({std::to_string(r), std::to_string(trace_steps[0][p]),
                     fmt(mr_sse(reference, rom_states, v_stream))});
      }
    }

    const auto rom_rse = [&](const ReducedModel& model, const Matrix& basis,
                             const Matrix& ref) {
      const Trajectory traj =
          integrate_rom(model, basis.transpose() * ref.col(0), constant_input_signal(1.0),
                        cfg.dt, cfg.t_final, TimeScheme::kSemiImplicitEuler);
      return relative_state_error(ref, traj, basis);
    };

    KahanSum rse_stream, rse_batch, rse_intr;
    for (std::size_t i = 0; i < n_mu; ++i) {
      rse_stream.add(rom_rse(stream_models[i], v_stream, reference[i]));
      rse_batch.add(rom_rse(batch_models[i], v_batch, reference[i]));
      rse_intr.add(rom_rse(intrusive_models[i], v_batch, reference[i]));
    }
    summary.final_rse_stream_train.push_back(rse_stream.value() / n_mu);
    summary.final_rse_batch_train.push_back(rse_batch.value() / n_mu);
    summary.final_rse_intrusive_train.push_back(rse_intr.value() / n_mu);

    KahanSum rse_stream_test, rse_batch_test;
    for (std::size_t t = 0; t < test_mus.size(); ++t) {
      const ReducedModel interp_stream =
          interpolate_operators(cfg.mu_list, stream_models, test_mus[t]);
      const ReducedModel interp_batch =
          interpolate_operators(cfg.mu_list, batch_models, test_mus[t]);
      rse_stream_test.add(rom_rse(interp_stream, v_stream, test_reference[t]));
      rse_batch_test.add(rom_rse(interp_batch, v_batch, test_reference[t]));
    }
    summary.final_rse_stream_test.push_back(rse_stream_test.value() / test_mus.size());
    summary.final_rse_batch_test.push_back(rse_batch_test.value() / test_mus.size());

    svd_csv.row({std::to_string(r), fmt(summary.subspace_angle[ri]),
                 fmt(summary.rpe_stream[ri]), fmt(summary.rpe_batch[ri])});
    rse_csv.row({std::to_string(r), fmt(summary.final_rse_stream_train[ri]),
                 fmt(summary.final_rse_batch_train[ri]),
                 fmt(summary.final_rse_intrusive_train[ri]),
                 fmt(summary.final_rse_stream_test[ri]),
                 fmt(summary.final_rse_batch_test[ri])});
  }

  // ---- Memory accounting (float counts). ----
  MemoryBudget budget;
  budget.paradigm = paradigm;
  budget.svd_method = svd_method;
  budget.n = n;
  budget.K = total_snapshots;
  budget.r = r_max;
  budget.m = 1;
  budget.derive_sketch_sizes();
  budget.d = operator_dimension(r_max, 1, false, true);

  MemoryBudget ls_budget = budget;
  ls_budget.K = k_per_mu;  // the regression runs per parameter value
  const MemoryCost stream_cost{streaming_memory_cost(budget).svd_floats,
                               streaming_memory_cost(ls_budget).ls_floats};
  const MemoryCost batch_cost{batch_memory_cost(budget).svd_floats,
                              batch_memory_cost(ls_budget).ls_floats};
  summary.svd_reduction = 1.0 - stream_cost.svd_floats / batch_cost.svd_floats;
  summary.ls_reduction = 1.0 - stream_cost.ls_floats / batch_cost.ls_floats;
  summary.total_reduction = memory_reduction(stream_cost, batch_cost);
  summary.measured_svd_storage_floats = measured_storage;
  summary.formula_svd_storage_floats =
      svd_method == SvdMethod::kSketchy
          ? static_cast<double>(n) * (budget.q + budget.zeta) +
                static_cast<double>(budget.q) * total_snapshots +
                static_cast<double>(budget.s) * budget.s
          : static_cast<double>(n) * r_max + static_cast<double>(total_snapshots) * r_max;

  CsvFile mem_csv(out / "memory_report.csv",
                  "quantity,streaming_floats,batch_floats,reduction");
  mem_csv.row({"svd", fmt(stream_cost.svd_floats), fmt(batch_cost.svd_floats),
               fmt(summary.svd_reduction)});
  mem_csv.row({"ls", fmt(stream_cost.ls_floats), fmt(batch_cost.ls_floats),
               fmt(summary.ls_reduction)});
  mem_csv.row({"total", fmt(stream_cost.total()), fmt(batch_cost.total()),
               fmt(summary.total_reduction)});
  return summary;
}

// --------------------------------------------------------------------------
// KSE study
// --------------------------------------------------------------------------

namespace {

struct KseData {
  std::vector<Matrix> states;
  std::vector<Matrix> derivatives;
};

KseData load_or_generate_kse(const ExperimentConfig& cfg) {
  KseData data;
  const fs::path dir(cfg.data_dir.empty() ? cfg.out_dir : cfg.data_dir);
  const auto combos = kse_training_combos();
  bool have_files = true;
  for (std::size_t i = 0; i < combos.size() && have_files; ++i)
    have_files = fs::exists(kse_state_file(dir, i)) && fs::exists(kse_deriv_file(dir, i));

  const Index steps = static_cast<Index>(std::llround(cfg.t_final / cfg.dt));
  const Index stored = steps / cfg.store_every;
  for (std::size_t i = 0; i < combos.size(); ++i) {
    if (have_files) {
      data.states.push_back(read_matrix(kse_state_file(dir, i)));
      data.derivatives.push_back(read_matrix(kse_deriv_file(dir, i)));
    } else {
      const auto [a, b] = combos[i];
      const FullModel model = kse_model(cfg.n, 22.0);
      const Trajectory traj = simulate_kse(model, kse_initial_condition(cfg.n, 22.0, a, b),
                                           cfg.dt, cfg.t_final, cfg.store_every);
      data.states.push_back(traj.states.leftCols(stored));
      data.derivatives.push_back(traj.derivatives.leftCols(stored));
    }
    std::fprintf(stderr, "[srom] kse trajectory %zu ready\n", i);
  }
  return data;
}

}  // namespace

KseSummary run_kse_experiment(const ExperimentConfig& cfg) {
  if (cfg.r_list.empty()) throw ConfigError("run: empty rank list");
  const Index r_max = *std::max_element(cfg.r_list.begin(), cfg.r_list.end());
  const Paradigm paradigm = paradigm_from_string(cfg.paradigms.front());
  const SvdMethod svd_method = svd_method_from_string(cfg.svd_method);
  const RlsMethod rls_method = rls_method_from_string(cfg.rls_method);
  if (!is_projected(paradigm))
    throw ConfigError("run: the kse study uses the projection paradigms");

  const fs::path out(cfg.out_dir);
  fs::create_directories(out / "operators");
  std::ofstream(out / "config.resolved") << cfg.serialize();

  KseData data = load_or_generate_kse(cfg);
  const Index n = data.states.front().rows();
  Index total_snapshots = 0;
  for (const Matrix& b : data.states) total_snapshots += b.cols();

  KseSummary summary;
  summary.r_values.assign(cfg.r_list.begin(), cfg.r_list.end());

  TruncatedSvd stream;
  if (svd_method == SvdMethod::kIncremental) {
    IncrementalSvd isvd(n, r_max, /*track_right=*/false);
    Index streamed = 0;
    for (const Matrix& block : data.states)
      for (Index j = 0; j < block.cols(); ++j) {
        isvd.push(block.col(j));
        progress(++streamed);
      }
    stream = isvd.factors();
  } else {
    SketchySvd sketch(n, total_snapshots, r_max, cfg.seed);
    Index streamed = 0;
    for (const Matrix& block : data.states)
      for (Index j = 0; j < block.cols(); ++j) {
        sketch.push(block.col(j));
        progress(++streamed);
      }
    stream = sketch.finalize(r_max);
  }

  const BatchPod batch = batch_pod(data.states, r_max);
  Vector rpe_stream_all, rpe_batch_all;
  rpe_profiles(data.states, stream.left, batch.basis, rpe_stream_all, rpe_batch_all);

  CsvFile svd_csv(out / "svd_assessment.csv", "r,subspace_angle,rpe_stream,rpe_batch");
  CsvFile soe_csv(out / "mrsoe_trace.csv", "r,k,mrsoe");

  PooledSource snapshots(&data.states);
  PooledSource derivatives(&data.derivatives);
  const Matrix no_inputs;

  ReducedModel focus_model;
  for (const Index r : cfg.r_list) {
    const OperatorStructure st{r, 0, false};
    const Matrix v_stream = stream.left.leftCols(r);
    summary.subspace_angle.push_back(
        subspace_angle_error(batch.basis.leftCols(r), v_stream));
    summary.rpe_stream.push_back(rpe_stream_all[r - 1]);
    svd_csv.row({std::to_string(r), fmt(summary.subspace_angle.back()),
                 fmt(summary.rpe_stream.back()), fmt(rpe_batch_all[r - 1])});

    Matrix stacked;
    std::vector<Index> steps;
    std::vector<Matrix> ops;
    if (is_recursive(paradigm)) {
      auto rec = solve_recursive_projected(v_stream, snapshots, derivatives, no_inputs,
                                           cfg.gamma1, cfg.gamma2, st, rls_method,
                                           cfg.trace_stride);
      stacked = std::move(rec.stacked);
      steps = std::move(rec.trace_steps);
      ops = std::move(rec.trace_ops);
    }

    const auto [dbar, rbar] = build_projected(v_stream, snapshots, derivatives, no_inputs,
                                              cfg.gamma1, cfg.gamma2, st);
    const Matrix reference_op = batch_ls(dbar, rbar);
    if (!is_recursive(paradigm)) stacked = reference_op;

    for (std::size_t p = 0; p < ops.size(); ++p)
      soe_csv.row({std::to_string(r), std::to_string(steps[p]),
                   fmt(mr_soe({reference_op}, {ops[p]}))});
    summary.mrsoe_final.push_back(mr_soe({reference_op}, {stacked}));

    char opname[64];
    std::snprintf(opname, sizeof(opname), "stream_r%02lld.srom",
                  static_cast<long long>(r));
    write_matrix((out / "operators" / opname).string(), stacked);
    if (r == r_max) focus_model = ReducedModel::from_stacked(stacked, st);
  }

  // Chaos diagnostics at the largest rank with identical algorithm parameters
  // for the full and reduced models.
  LyapunovOptions opts;
  opts.exponent_count = cfg.le_count;
  opts.t_total = cfg.le_t_total;
  opts.dt = cfg.le_dt;
  opts.renorm_interval = cfg.le_renorm;

  const FullModel full = kse_model(cfg.n, 22.0);
  const Vector x0 = kse_initial_condition(cfg.n, 22.0, 0.2, 0.1);
  std::fprintf(stderr, "[srom] computing full-model lyapunov spectrum\n");
  summary.full_lyapunov = lyapunov_spectrum(full, x0, opts);
  summary.full_kaplan_yorke = kaplan_yorke(summary.full_lyapunov);

  const Matrix v_focus = stream.left.leftCols(r_max);
  std::fprintf(stderr, "[srom] computing reduced-model lyapunov spectrum\n");
  summary.rom_lyapunov =
      lyapunov_spectrum(focus_model, v_focus.transpose() * x0, opts, TimeScheme::kCnab2);
  summary.rom_kaplan_yorke = kaplan_yorke(summary.rom_lyapunov);

  CsvFile le_csv(out / "lyapunov.csv", "index,full,rom");
  for (Index i = 0; i < summary.full_lyapunov.size(); ++i)
    le_csv.row({std::to_string(i + 1), fmt(summary.full_lyapunov[i]),
                fmt(summary.rom_lyapunov[i])});
  CsvFile ky_csv(out / "kaplan_yorke.csv", "model,dimension");
  ky_csv.row({"full", fmt(summary.full_kaplan_yorke)});
  ky_csv.row({"rom", fmt(summary.rom_kaplan_yorke)});

  MemoryBudget budget;
  budget.paradigm = paradigm;
  budget.svd_method = svd_method;
  budget.n = n;
  budget.K = total_snapshots;
  budget.r = r_max;
  budget.m = 0;
  budget.derive_sketch_sizes();
  budget.d = operator_dimension(r_max, 0, false, true);
  MemoryBudget ls_budget = budget;
  ls_budget.K = data.states.front().cols();
  const MemoryCost stream_cost{streaming_memory_cost(budget).svd_floats,
                               streaming_memory_cost(ls_budget).ls_floats};
  const MemoryCost batch_cost{batch_memory_cost(budget).svd_floats,
                              batch_memory_cost(ls_budget).ls_floats};
  summary.svd_reduction = 1.0 - stream_cost.svd_floats / batch_cost.svd_floats;
  summary.ls_reduction = 1.0 - stream_cost.ls_floats / batch_cost.ls_floats;
  summary.total_reduction = memory_reduction(stream_cost, batch_cost);

  CsvFile mem_csv(out / "memory_report.csv",
                  "quantity,streaming_floats,batch_floats,reduction");
  mem_csv.row({"svd", fmt(stream_cost.svd_floats), fmt(batch_cost.svd_floats),
               fmt(summary.svd_reduction)});
  mem_csv.row({"ls", fmt(stream_cost.ls_floats), fmt(batch_cost.ls_floats),
               fmt(summary.ls_reduction)});
  mem_csv.row({"total", fmt(stream_cost.total()), fmt(batch_cost.total()),
               fmt(summary.total_reduction)});
  return summary;
}

// --------------------------------------------------------------------------
// Custom stream study
// --------------------------------------------------------------------------

void run_custom_experiment(const ExperimentConfig& cfg) {
  if (cfg.train_files.empty()) throw ConfigError("run: custom-stream needs train_files");
  if (cfg.r_list.empty()) throw ConfigError("run: empty rank list");
  const Index r = cfg.r_list.front();
  const Paradigm paradigm = paradigm_from_string(cfg.paradigms.front());
  const SvdMethod svd_method = svd_method_from_string(cfg.svd_method);
  const RlsMethod rls_method = rls_method_from_string(cfg.rls_method);

  const fs::path out(cfg.out_dir);
  fs::create_directories(out);
  std::ofstream(out / "config.resolved") << cfg.serialize();

  std::vector<Matrix> states, derivs, inputs;
  for (const std::string& f : cfg.train_files) states.push_back(read_matrix(f));
  for (const std::string& f : cfg.deriv_files) derivs.push_back(read_matrix(f));
  for (const std::string& f : cfg.input_files) inputs.push_back(read_matrix(f));
  if (is_projected(paradigm) && derivs.size() != states.size())
    throw MissingDerivatives("run: projection paradigms need one deriv file per train file");

  const Index m = inputs.empty() ? 0 : inputs.front().rows();
  const OperatorStructure st{r, m, true};

  PooledSource snapshots(&states);
  PipelineConfig pipeline;
  pipeline.structure = st;
  pipeline.gamma1 = cfg.gamma1;
  pipeline.gamma2 = cfg.gamma2;
  pipeline.fd_scheme = fd_scheme_from_string(cfg.fd_scheme);
  pipeline.dt = cfg.dt;
  pipeline.seed = cfg.seed;
  pipeline.trace_stride = cfg.trace_stride;
  pipeline.checkpoints = cfg.checkpoints;

  Matrix pooled_inputs;
  if (m > 0) {
    Index total = 0;
    for (const Matrix& b : inputs) total += b.cols();
    pooled_inputs.resize(m, total);
    Index at = 0;
    for (const Matrix& b : inputs) {
      pooled_inputs.middleCols(at, b.cols()) = b;
      at += b.cols();
    }
  }

  std::unique_ptr<PooledSource> deriv_source;
  if (!derivs.empty()) deriv_source = std::make_unique<PooledSource>(&derivs);

  const ParadigmResult result =
      solve_paradigm(paradigm, svd_method, rls_method, snapshots, deriv_source.get(),
                     pooled_inputs, pipeline);

  write_matrix((out / "operator.srom").string(), result.stacked);
  write_matrix((out / "basis.srom").string(), result.svd.left);

  CsvFile meta_csv(out / "run_summary.csv", "quantity,value");
  meta_csv.row({"rank", std::to_string(r)});
  meta_csv.row({"snapshots", std::to_string(snapshots.count())});
  meta_csv.row({"sigma_max", fmt(result.svd.singular_values[0])});

  if (!cfg.gamma1_grid.empty() && !cfg.gamma2_grid.empty() &&
      !cfg.validation_file.empty()) {
    GridSearchProblem problem;
    const auto built =
        is_projected(paradigm)
            ? build_projected(result.svd.left, snapshots, *deriv_source, pooled_inputs,
                              cfg.gamma1, cfg.gamma2, st)
            : build_reformulated(result.svd.singular_values, result.svd.right,
                                 pooled_inputs, FiniteDifference(pipeline.fd_scheme, cfg.dt),
                                 cfg.gamma1, cfg.gamma2, st);
    problem.data = built.first.topRows(built.first.rows() - st.dim());
    problem.rhs = built.second.topRows(built.second.rows() - st.dim());
    problem.structure = st;
    problem.basis = result.svd.left;
    problem.validation_full = read_matrix(cfg.validation_file);
    problem.xhat0 = result.svd.left.transpose() * problem.validation_full.col(0);
    problem.input = constant_input_signal(1.0);
    problem.dt = cfg.dt;
    problem.t_final = cfg.dt * static_cast<double>(problem.validation_full.cols() - 1);
    problem.scheme = TimeScheme::kRk4;
    const Regularizer chosen = grid_search(cfg.gamma1_grid, cfg.gamma2_grid, problem);
    CsvFile grid_csv(out / "grid_search.csv", "gamma1,gamma2");
    grid_csv.row({fmt(chosen.gamma1), fmt(chosen.gamma2)});
  }
}

// --------------------------------------------------------------------------
// Command wrappers
// --------------------------------------------------------------------------

int cmd_generate(const ExperimentConfig& cfg, bool dry_run) {
  const GenerateSummary summary = generate_data(cfg, dry_run);
  std::printf("files=%zu\nsnapshots=%lld\nbytes=%llu\n", summary.files.size(),
              static_cast<long long>(summary.total_snapshots),
              static_cast<unsigned long long>(summary.bytes));
  return 0;
}

int cmd_run(const ExperimentConfig& cfg) {
  if (cfg.r_list.empty()) throw ConfigError("run: empty rank list");
  if (cfg.experiment == "burgers") {
    const BurgersSummary s = run_burgers_experiment(cfg);
    std::printf("final_rse_stream_r%lld=%s\n", static_cast<long long>(s.r_values.back()),
                fmt(s.final_rse_stream_train.back()).c_str());
  } else if (cfg.experiment == "kse") {
    const KseSummary s = run_kse_experiment(cfg);
    std::printf("rom_kaplan_yorke=%s\n", fmt(s.rom_kaplan_yorke).c_str());
  } else {
    run_custom_experiment(cfg);
    std::printf("ok\n");
  }
  return 0;
}

int cmd_compare(const std::string& run_a, const std::string& run_b) {
  const fs::path a(run_a), b(run_b);
  if (!fs::is_directory(a)) throw IoError("compare: missing run directory " + run_a);
  if (!fs::is_directory(b)) throw IoError("compare: missing run directory " + run_b);

  std::vector<fs::path> csvs;
  for (const auto& entry : fs::directory_iterator(a))
    if (entry.path().extension() == ".csv") csvs.push_back(entry.path());
  std::sort(csvs.begin(), csvs.end());
  if (csvs.empty()) throw IoError("compare: no csv files in " + run_a);

  std::printf("file,row,column,value_a,value_b,ratio\n");
  for (const fs::path& pa : csvs) {
    const fs::path pb = b / pa.filename();
    if (!fs::exists(pb)) throw IoError("compare: missing file " + pb.string());
    std::ifstream fa(pa), fb(pb);
    std::string la, lb;
    std::getline(fa, la);
    std::getline(fb, lb);  // header line
    Index row = 0;
    while (std::getline(fa, la)) {
      if (!std::getline(fb, lb))
        throw IoError("compare: row count differs in " + pb.string());
      std::stringstream sa(la), sb(lb);
      std::string ca, cb;
      Index col = 0;
      while (std::getline(sa, ca, ',')) {
        if (!std::getline(sb, cb, ','))
          throw IoError("compare: column count differs in " + pb.string());
        char* enda = nullptr;
        char* endb = nullptr;
        const double va = std::strtod(ca.c_str(), &enda);
        const double vb = std::strtod(cb.c_str(), &endb);
        const bool numeric_a = enda && *enda == '\0' && !ca.empty();
        const bool numeric_b = endb && *endb == '\0' && !cb.empty();
        if (numeric_a && numeric_b) {
          const double ratio =
              vb == 0.0 ? (va == 0.0 ? 1.0 : std::numeric_limits<double>::infinity())
                        : va / vb;
          std::printf("%s,%lld,%lld,%s,%s,%s\n", pa.filename().string().c_str(),
                      static_cast<long long>(row), static_cast<long long>(col),
                      fmt(va).c_str(), fmt(vb).c_str(), fmt(ratio).c_str());
        }
        ++col;
      }
      ++row;
    }
    if (std::getline(fb, lb)) throw IoError("compare: row count differs in " + pb.string());
  }
  return 0;
}

}  // namespace srom
