#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "srom/finite_diff.hpp"
#include "srom/models.hpp"
#include "srom/paradigm.hpp"
#include "srom/reduced_model.hpp"
#include "srom/rls.hpp"
#include "srom/snapshot_io.hpp"
#include "srom/truncated_svd.hpp"
#include "srom/types.hpp"

namespace srom {

/// Penalty diagonal in feature order: gamma1 on linear/input/constant
/// coefficients, gamma2 on the quadratic block.
Vector tikhonov_diagonal(double gamma1, double gamma2, const OperatorStructure& st);

/// Regression system assembled from streaming SVD factors alone: features from
/// columns of diag(S) W^T, derivatives from the finite-difference operator,
/// penalty rows appended. `inputs` is m x K (ignored when the structure has no
/// input block). Returns the stacked (Dbar, Rbar).
std::pair<Matrix, Matrix> build_reformulated(ConstVectorRef singular_values,
                                             const Matrix& right_vectors,
                                             const Matrix& inputs,
                                             const FiniteDifference& fd,
                                             double gamma1, double gamma2,
                                             const OperatorStructure& st);

/// Same assembly from an explicit reduced snapshot matrix (r x K columns).
std::pair<Matrix, Matrix> build_from_reduced(const Matrix& reduced_states,
                                             const Matrix& inputs,
                                             const FiniteDifference& fd,
                                             double gamma1, double gamma2,
                                             const OperatorStructure& st);

/// Regression system from explicitly projected snapshot and derivative
/// streams. Both sources must be aligned and of equal length.
std::pair<Matrix, Matrix> build_projected(const Matrix& basis, SnapshotSource& snapshots,
                                          SnapshotSource& derivatives, const Matrix& inputs,
                                          double gamma1, double gamma2,
                                          const OperatorStructure& st);

/// Recursive solve over the same rows the builders produce. Records the
/// streaming estimate every `trace_stride` rows (0 disables) plus the final.
struct RecursiveSolveResult {
  Matrix stacked;                  // final d x r estimate
  std::vector<Index> trace_steps;  // 1-based row counts
  std::vector<Matrix> trace_ops;
};

RecursiveSolveResult solve_recursive_reformulated(ConstVectorRef singular_values,
                                                  const Matrix& right_vectors,
                                                  const Matrix& inputs,
                                                  const FiniteDifference& fd,
                                                  double gamma1, double gamma2,
                                                  const OperatorStructure& st,
                                                  RlsMethod method, Index trace_stride);

RecursiveSolveResult solve_recursive_projected(const Matrix& basis, SnapshotSource& snapshots,
                                               SnapshotSource& derivatives,
                                               const Matrix& inputs, double gamma1,
                                               double gamma2, const OperatorStructure& st,
                                               RlsMethod method, Index trace_stride);

/// Streaming-SVD phase shared by every paradigm.
TruncatedSvd stream_svd(SvdMethod method, SnapshotSource& snapshots, Index r,
                        std::uint64_t seed, bool track_right = true);

struct PipelineConfig {
  OperatorStructure structure;
  double gamma1 = 1e-9;
  double gamma2 = 1e-9;
  FdScheme fd_scheme = FdScheme::kForward1;
  double dt = 0.0;                 // snapshot spacing for FD paradigms
  std::uint64_t seed = 0;          // sketch seed
  Index trace_stride = 0;          // recursive paradigms: SOE sampling stride
  std::vector<Index> checkpoints;  // batch paradigms: intermediate solves
};

struct ParadigmResult {
  TruncatedSvd svd;
  Matrix stacked;
  ReducedModel model;
  std::vector<Index> trace_steps;
  std::vector<Matrix> trace_ops;
};

/// End-to-end single-regression pipeline: streaming SVD over the snapshots,
/// then the chosen learning route. Projection paradigms require a derivative
/// source; inputs may be empty for input-free structures.
ParadigmResult solve_paradigm(Paradigm paradigm, SvdMethod svd_method,
                              RlsMethod rls_method, SnapshotSource& snapshots,
                              SnapshotSource* derivatives, const Matrix& inputs,
                              const PipelineConfig& config);

/// Geometric checkpoint schedule {K/16, K/8, K/4, K/2, K}.
std::vector<Index> default_checkpoints(Index total);

/// Candidate selection by validation state error.
struct GridSearchProblem {
  Matrix data;  // unregularized regression rows, Ktilde x d
  Matrix rhs;   // Ktilde x r
  OperatorStructure structure;
  Matrix basis;             // n x r lifting for validation
  Matrix validation_full;   // n x Kv reference trajectory
  Vector xhat0;             // initial reduced state of the validation run
  InputSignal input;        // used when structure.m > 0
  double dt = 0.0;
  double t_final = 0.0;
  TimeScheme scheme = TimeScheme::kRk4;
};

/// Returns the candidate pair minimizing validation relative state error;
/// ties resolve toward the lexicographically larger (gamma1, gamma2). Blown-up
/// candidates score +inf; throws AllUnstable when nothing integrates.
Regularizer grid_search(const std::vector<double>& gamma1_candidates,
                        const std::vector<double>& gamma2_candidates,
                        const GridSearchProblem& problem);

/// Entrywise cubic-spline interpolation of learned operators across a sorted
/// parameter grid (>= 4 points; queries inside the trained range).
ReducedModel interpolate_operators(const std::vector<double>& mus,
                                   const std::vector<ReducedModel>& models,
                                   double mu_query);

}  // namespace srom
