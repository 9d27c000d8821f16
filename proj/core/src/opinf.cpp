#include "srom/opinf.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>

#include "srom/errors.hpp"
#include "srom/incremental_svd.hpp"
#include "srom/metrics.hpp"
#include "srom/sketchy_svd.hpp"

namespace srom {

namespace {

Vector reduced_state(ConstVectorRef singular_values, const Matrix& right, Index j, Index r) {
  return right.row(j).head(r).transpose().cwiseProduct(singular_values.head(r));
}

Vector input_column(const Matrix& inputs, const OperatorStructure& st, Index j) {
  if (st.m == 0) return Vector();
  if (inputs.cols() <= j || inputs.rows() != st.m)
    throw DimensionMismatch("opinf: input matrix shape mismatch");
  return inputs.col(j);
}

void append_penalty_rows(Matrix& dbar, Matrix& rbar, double gamma1, double gamma2,
                         const OperatorStructure& st, Index data_rows) {
  const Vector diag = tikhonov_diagonal(gamma1, gamma2, st).cwiseSqrt();
  dbar.bottomRows(st.dim()).setZero();
  dbar.bottomRows(st.dim()).diagonal() = diag;
  rbar.bottomRows(st.dim()).setZero();
  (void)data_rows;
}

}  // namespace

Vector tikhonov_diagonal(double gamma1, double gamma2, const OperatorStructure& st) {
  if (!(gamma1 > 0.0) || !(gamma2 > 0.0))
    throw NonpositiveGamma("opinf: tikhonov parameters must be positive");
  Vector diag(st.dim());
  diag.head(st.r).setConstant(gamma1);
  if (st.quadratic)
    diag.segment(st.quadratic_offset(), st.r * st.r).setConstant(gamma2);
  if (st.m > 0) diag.segment(st.input_offset(), st.m).setConstant(gamma1);
  if (st.constant) diag[st.constant_offset()] = gamma1;
  return diag;
}

std::pair<Matrix, Matrix> build_from_reduced(const Matrix& reduced_states,
                                             const Matrix& inputs,
                                             const FiniteDifference& fd,
                                             double gamma1, double gamma2,
                                             const OperatorStructure& st) {
  if (reduced_states.rows() != st.r)
    throw DimensionMismatch("opinf: reduced states narrower than requested rank");
  const Index k_total = reduced_states.cols();
  const Index kt = fd.sample_count(k_total);
  const Index d = st.dim();

  Matrix dbar(kt + d, d);
  Matrix rbar(kt + d, st.r);
  for (Index j = 0; j < kt; ++j) {
    dbar.row(j) =
        assemble_row(reduced_states.col(j), input_column(inputs, st, j), st).transpose();
    Vector deriv = Vector::Zero(st.r);
    for (const auto& [i, c] : fd.column_stencil(k_total, j))
      deriv += c * reduced_states.col(i);
    rbar.row(j) = deriv.transpose();
  }
  append_penalty_rows(dbar, rbar, gamma1, gamma2, st, kt);
  return {std::move(dbar), std::move(rbar)};
}

std::pair<Matrix, Matrix> build_reformulated(ConstVectorRef singular_values,
                                             const Matrix& right_vectors,
                                             const Matrix& inputs,
                                             const FiniteDifference& fd,
                                             double gamma1, double gamma2,
                                             const OperatorStructure& st) {
  if (singular_values.size() < st.r || right_vectors.cols() < st.r)
    throw DimensionMismatch("opinf: factors narrower than requested rank");
  const Matrix reduced = singular_values.head(st.r).asDiagonal() *
                         right_vectors.leftCols(st.r).transpose();
  return build_from_reduced(reduced, inputs, fd, gamma1, gamma2, st);
}

std::pair<Matrix, Matrix> build_projected(const Matrix& basis, SnapshotSource& snapshots,
                                          SnapshotSource& derivatives, const Matrix& inputs,
                                          double gamma1, double gamma2,
                                          const OperatorStructure& st) {
  if (basis.cols() != st.r) throw DimensionMismatch("opinf: basis rank mismatch");
  if (snapshots.count() != derivatives.count())
    throw DimensionMismatch("opinf: snapshot and derivative streams differ in length");
  const Index kt = snapshots.count();
  const Index d = st.dim();

  snapshots.reset();
  derivatives.reset();
  Matrix dbar(kt + d, d);
  Matrix rbar(kt + d, st.r);
  Vector x, xdot;
  for (Index j = 0; j < kt; ++j) {
    if (!snapshots.next(x) || !derivatives.next(xdot))
      throw DimensionMismatch("opinf: stream ended early");
    const Vector xhat = basis.transpose() * x;
    const Vector rhat = basis.transpose() * xdot;
    dbar.row(j) = assemble_row(xhat, input_column(inputs, st, j), st).transpose();
    rbar.row(j) = rhat.transpose();
  }
  append_penalty_rows(dbar, rbar, gamma1, gamma2, st, kt);
  return {std::move(dbar), std::move(rbar)};
}

namespace {

class RecursiveSolver {
 public:
  RecursiveSolver(RlsMethod method, const Vector& gamma_diagonal, Index r)
      : method_(method) {
    if (method == RlsMethod::kStandard)
      rls_ = std::make_unique<Rls>(gamma_diagonal, r);
    else
      iqr_ = std::make_unique<InverseQrRls>(gamma_diagonal, r);
  }

  void update(ConstRowRef d_row, ConstRowRef r_row) {
    if (rls_)
      rls_->update(d_row, r_row);
    else
      iqr_->update(d_row, r_row);
  }

  const Matrix& estimate() const { return rls_ ? rls_->estimate() : iqr_->estimate(); }

 private:
  RlsMethod method_;
  std::unique_ptr<Rls> rls_;
  std::unique_ptr<InverseQrRls> iqr_;
};

}  // namespace

RecursiveSolveResult solve_recursive_reformulated(ConstVectorRef singular_values,
                                                  const Matrix& right_vectors,
                                                  const Matrix& inputs,
                                                  const FiniteDifference& fd,
                                                  double gamma1, double gamma2,
                                                  const OperatorStructure& st,
                                                  RlsMethod method, Index trace_stride) {
  const Index k_total = right_vectors.rows();
  const Index kt = fd.sample_count(k_total);
  RecursiveSolver solver(method, tikhonov_diagonal(gamma1, gamma2, st), st.r);
  RecursiveSolveResult out;

  FdRowStreamer streamer(fd, k_total);
  Index emitted = 0;
  const auto emit = [&](Index j, const Vector& xhat, const Vector& deriv) {
    const RowVector d_row = assemble_row(xhat, input_column(inputs, st, j), st).transpose();
    solver.update(d_row, deriv.transpose());
    ++emitted;
    if (trace_stride > 0 && (emitted % trace_stride == 0 || emitted == kt)) {
      out.trace_steps.push_back(emitted);
      out.trace_ops.push_back(solver.estimate());
    }
  };
  // The reformulated stream feeds reduced states; the ring buffer inside the
  // streamer holds one stencil width of r-vectors, never full states.
  for (Index j = 0; j < k_total; ++j)
    streamer.push(reduced_state(singular_values, right_vectors, j, st.r), emit);
  streamer.finish(emit);

  out.stacked = solver.estimate();
  return out;
}

RecursiveSolveResult solve_recursive_projected(const Matrix& basis, SnapshotSource& snapshots,
                                               SnapshotSource& derivatives,
                                               const Matrix& inputs, double gamma1,
                                               double gamma2, const OperatorStructure& st,
                                               RlsMethod method, Index trace_stride) {
  if (basis.cols() != st.r) throw DimensionMismatch("opinf: basis rank mismatch");
  if (snapshots.count() != derivatives.count())
    throw DimensionMismatch("opinf: snapshot and derivative streams differ in length");
  const Index kt = snapshots.count();
  RecursiveSolver solver(method, tikhonov_diagonal(gamma1, gamma2, st), st.r);
  RecursiveSolveResult out;

  snapshots.reset();
  derivatives.reset();
  Vector x, xdot;
  for (Index j = 0; j < kt; ++j) {
    if (!snapshots.next(x) || !derivatives.next(xdot))
      throw DimensionMismatch("opinf: stream ended early");
    const Vector xhat = basis.transpose() * x;
    const Vector rhat = basis.transpose() * xdot;
    const RowVector d_row = assemble_row(xhat, input_column(inputs, st, j), st).transpose();
    solver.update(d_row, rhat.transpose());
    if (trace_stride > 0 && ((j + 1) % trace_stride == 0 || j + 1 == kt)) {
      out.trace_steps.push_back(j + 1);
      out.trace_ops.push_back(solver.estimate());
    }
  }
  out.stacked = solver.estimate();
  return out;
}

TruncatedSvd stream_svd(SvdMethod method, SnapshotSource& snapshots, Index r,
                        std::uint64_t seed, bool track_right) {
  snapshots.reset();
  Vector x;
  if (method == SvdMethod::kIncremental) {
    IncrementalSvd isvd(snapshots.dim(), r, track_right);
    while (snapshots.next(x)) isvd.push(x);
    return isvd.factors();
  }
  SketchySvd sketch(snapshots.dim(), snapshots.count(), r, seed);
  while (snapshots.next(x)) sketch.push(x);
  return sketch.finalize(r);
}

std::vector<Index> default_checkpoints(Index total) {
  std::vector<Index> out;
  for (const Index div : {16, 8, 4, 2, 1}) {
    const Index k = total / div;
    if (k >= 2 && (out.empty() || out.back() != k)) out.push_back(k);
  }
  return out;
}

ParadigmResult solve_paradigm(Paradigm paradigm, SvdMethod svd_method,
                              RlsMethod rls_method, SnapshotSource& snapshots,
                              SnapshotSource* derivatives, const Matrix& inputs,
                              const PipelineConfig& config) {
  const OperatorStructure& st = config.structure;
  if (is_projected(paradigm) && derivatives == nullptr)
    throw MissingDerivatives("opinf: projection paradigms require derivative data");

  ParadigmResult result;
  result.svd = stream_svd(svd_method, snapshots, st.r, config.seed,
                          /*track_right=*/!is_projected(paradigm));

  const FiniteDifference fd(config.fd_scheme, config.dt);
  switch (paradigm) {
    case Paradigm::kLs: {
      const auto [dbar, rbar] =
          build_reformulated(result.svd.singular_values, result.svd.right, inputs, fd,
                             config.gamma1, config.gamma2, st);
      for (const Index k : config.checkpoints) {
        if (k >= result.svd.right.rows()) continue;
        const auto [dk, rk] =
            build_reformulated(result.svd.singular_values, result.svd.right.topRows(k),
                               inputs, fd, config.gamma1, config.gamma2, st);
        result.trace_steps.push_back(k);
        result.trace_ops.push_back(batch_ls(dk, rk));
      }
      result.stacked = batch_ls(dbar, rbar);
      break;
    }
    case Paradigm::kRls: {
      auto rec = solve_recursive_reformulated(result.svd.singular_values, result.svd.right,
                                              inputs, fd, config.gamma1, config.gamma2, st,
                                              rls_method, config.trace_stride);
      result.stacked = std::move(rec.stacked);
      result.trace_steps = std::move(rec.trace_steps);
      result.trace_ops = std::move(rec.trace_ops);
      break;
    }
    case Paradigm::kProjectLs: {
      const auto [dbar, rbar] = build_projected(result.svd.left, snapshots, *derivatives,
                                                inputs, config.gamma1, config.gamma2, st);
      result.stacked = batch_ls(dbar, rbar);
      break;
    }
    case Paradigm::kProjectRls: {
      auto rec = solve_recursive_projected(result.svd.left, snapshots, *derivatives, inputs,
                                           config.gamma1, config.gamma2, st, rls_method,
                                           config.trace_stride);
      result.stacked = std::move(rec.stacked);
      result.trace_steps = std::move(rec.trace_steps);
      result.trace_ops = std::move(rec.trace_ops);
      break;
    }
  }
  result.model = ReducedModel::from_stacked(result.stacked, st);
  return result;
}

Regularizer grid_search(const std::vector<double>& gamma1_candidates,
                        const std::vector<double>& gamma2_candidates,
                        const GridSearchProblem& problem) {
  if (gamma1_candidates.empty() || gamma2_candidates.empty())
    throw ConfigError("grid search: candidate lists must be nonempty");
  const OperatorStructure& st = problem.structure;
  const Index d = st.dim();
  if (problem.data.cols() != d) throw DimensionMismatch("grid search: data width mismatch");

  std::vector<double> g1 = gamma1_candidates;
  std::vector<double> g2 = gamma2_candidates;
  std::sort(g1.begin(), g1.end());
  std::sort(g2.begin(), g2.end());

  Matrix dbar(problem.data.rows() + d, d);
  Matrix rbar(problem.rhs.rows() + d, st.r);
  dbar.topRows(problem.data.rows()) = problem.data;
  rbar.topRows(problem.rhs.rows()) = problem.rhs;
  rbar.bottomRows(d).setZero();

  const double denom = problem.validation_full.norm();
  double best_err = std::numeric_limits<double>::infinity();
  Regularizer best;
  bool any_finite = false;

  for (const double c1 : g1) {
    for (const double c2 : g2) {
      dbar.bottomRows(d).setZero();
      dbar.bottomRows(d).diagonal() = tikhonov_diagonal(c1, c2, st).cwiseSqrt();
      Matrix stacked;
      try {
        stacked = batch_ls(dbar, rbar);
      } catch (const RankDeficient&) {
        continue;
      }
      const ReducedModel model = ReducedModel::from_stacked(stacked, st);
      const Trajectory traj = integrate_rom(model, problem.xhat0, problem.input, problem.dt,
                                            problem.t_final, problem.scheme);
      double err = std::numeric_limits<double>::infinity();
      if (traj.finite && traj.states.cols() == problem.validation_full.cols()) {
        err = (problem.validation_full - problem.basis * traj.states).norm() /
              (denom > 0.0 ? denom : 1.0);
        if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
      }
      // Ascending lexicographic sweep with <= keeps the largest tied pair.
      if (err <= best_err && std::isfinite(err)) {
        best_err = err;
        best = Regularizer{c1, c2, st.r + st.m + (st.constant ? 1 : 0), st.quad_size()};
        any_finite = true;
      }
    }
  }
  if (!any_finite)
    throw AllUnstable("grid search: every candidate produced a non-finite trajectory");
  return best;
}

ReducedModel interpolate_operators(const std::vector<double>& mus,
                                   const std::vector<ReducedModel>& models,
                                   double mu_query) {
  const std::size_t count = mus.size();
  if (count < 4) throw DimensionMismatch("operator interpolation: need at least 4 parameters");
  if (models.size() != count)
    throw InconsistentDimensions("operator interpolation: parameter/model count mismatch");
  for (std::size_t i = 1; i < count; ++i)
    if (!(mus[i] > mus[i - 1]))
      throw InconsistentDimensions("operator interpolation: parameters must be increasing");
  if (mu_query < mus.front() || mu_query > mus.back())
    throw Extrapolation("operator interpolation: query outside trained range");

  const OperatorStructure st = models.front().structure();
  for (const ReducedModel& m : models)
    if (m.order() != st.r || m.input_dim() != st.m || m.has_constant() != st.constant)
      throw InconsistentDimensions("operator interpolation: inconsistent model shapes");

  const Index ncoef = st.dim() * st.r;
  const Index n = static_cast<Index>(count);
  Matrix values(n, ncoef);
  for (Index i = 0; i < n; ++i) {
    const Matrix stacked = models[static_cast<std::size_t>(i)].stacked();
    values.row(i) = Eigen::Map<const Vector>(stacked.data(), ncoef).transpose();
  }

  // Interpolating cubic spline with not-a-knot end conditions, solved for the
  // knot second derivatives with every operator entry as a right-hand side.
  Vector h(n - 1);
  for (Index i = 0; i < n - 1; ++i) h[i] = mus[static_cast<std::size_t>(i + 1)] -
                                           mus[static_cast<std::size_t>(i)];
  Matrix a = Matrix::Zero(n, n);
  Matrix rhs = Matrix::Zero(n, ncoef);
  for (Index i = 1; i < n - 1; ++i) {
    a(i, i - 1) = h[i - 1] / 6.0;
    a(i, i) = (h[i - 1] + h[i]) / 3.0;
    a(i, i + 1) = h[i] / 6.0;
    rhs.row(i) = (values.row(i + 1) - values.row(i)) / h[i] -
                 (values.row(i) - values.row(i - 1)) / h[i - 1];
  }
  a(0, 0) = h[1];
  a(0, 1) = -(h[0] + h[1]);
  a(0, 2) = h[0];
  a(n - 1, n - 3) = h[n - 2];
  a(n - 1, n - 2) = -(h[n - 3] + h[n - 2]);
  a(n - 1, n - 1) = h[n - 3];
  const Matrix moments = Eigen::PartialPivLU<Matrix>(a).solve(rhs);

  // Locate the interval and evaluate.
  std::size_t seg = count - 2;
  for (std::size_t i = 0; i + 1 < count; ++i)
    if (mu_query <= mus[i + 1]) {
      seg = i;
      break;
    }
  const Index i = static_cast<Index>(seg);
  const double hi = h[i];
  const double left = mus[seg + 1] - mu_query;
  const double right = mu_query - mus[seg];
  RowVector flat = moments.row(i) * (left * left * left) / (6.0 * hi) +
                   moments.row(i + 1) * (right * right * right) / (6.0 * hi) +
                   (values.row(i) / hi - moments.row(i) * hi / 6.0) * left +
                   (values.row(i + 1) / hi - moments.row(i + 1) * hi / 6.0) * right;

  Matrix stacked = Eigen::Map<Matrix>(flat.data(), st.dim(), st.r);
  return ReducedModel::from_stacked(stacked, st);
}

}  // namespace srom
