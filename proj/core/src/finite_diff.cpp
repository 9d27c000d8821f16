#include "srom/finite_diff.hpp"

#include <string>

#include "srom/errors.hpp"

namespace srom {

namespace {
// Fourth-order first-derivative stencils over five points, scaled by 12*dt.
constexpr double kEdge0[5] = {-25.0, 48.0, -36.0, 16.0, -3.0};
constexpr double kEdge1[5] = {-3.0, -10.0, 18.0, -6.0, 1.0};
constexpr double kInterior[5] = {1.0, -8.0, 0.0, 8.0, -1.0};
constexpr double kEdgeM2[5] = {-1.0, 6.0, -18.0, 10.0, 3.0};
constexpr double kEdgeM1[5] = {3.0, -16.0, 36.0, -48.0, 25.0};
}  // namespace

FiniteDifference::FiniteDifference(FdScheme scheme, double dt) : scheme_(scheme), dt_(dt) {
  if (!(dt > 0.0)) throw DimensionMismatch("finite difference: time step must be positive");
}

Index FiniteDifference::sample_count(Index k) const {
  if (k < min_samples())
    throw DimensionMismatch("finite difference: stream shorter than stencil");
  return scheme_ == FdScheme::kForward1 ? k - 1 : k;
}

std::vector<Index> FiniteDifference::selected_indices(Index k) const {
  const Index kt = sample_count(k);
  std::vector<Index> idx(static_cast<std::size_t>(kt));
  for (Index j = 0; j < kt; ++j) idx[static_cast<std::size_t>(j)] = j;
  return idx;
}

std::vector<std::pair<Index, double>> FiniteDifference::column_stencil(Index k, Index j) const {
  const Index kt = sample_count(k);
  if (j < 0 || j >= kt) throw IndexOutOfRange("finite difference: column out of range");
  std::vector<std::pair<Index, double>> out;
  if (scheme_ == FdScheme::kForward1) {
    const double w = 1.0 / dt_;
    out.push_back({j, -w});
    out.push_back({j + 1, w});
    return out;
  }
  const double w = 1.0 / (12.0 * dt_);
  const double* coeff = kInterior;
  Index base = j - 2;
  if (j == 0) {
    coeff = kEdge0;
    base = 0;
  } else if (j == 1) {
    coeff = kEdge1;
    base = 0;
  } else if (j == kt - 2) {
    coeff = kEdgeM2;
    base = kt - 5;
  } else if (j == kt - 1) {
    coeff = kEdgeM1;
    base = kt - 5;
  }
  for (int t = 0; t < 5; ++t)
    if (coeff[t] != 0.0) out.push_back({base + t, coeff[t] * w});
  return out;
}

Matrix FiniteDifference::difference_matrix(Index k) const {
  const Index kt = sample_count(k);
  Matrix delta = Matrix::Zero(k, kt);
  for (Index j = 0; j < kt; ++j)
    for (const auto& [i, c] : column_stencil(k, j)) delta(i, j) = c;
  return delta;
}

Matrix FiniteDifference::selector_matrix(Index k) const {
  const auto idx = selected_indices(k);
  Matrix s = Matrix::Zero(k, static_cast<Index>(idx.size()));
  for (Index j = 0; j < static_cast<Index>(idx.size()); ++j)
    s(idx[static_cast<std::size_t>(j)], j) = 1.0;
  return s;
}

Matrix FiniteDifference::differentiate(ConstMatrixRef x) const {
  const Index k = x.cols();
  const Index kt = sample_count(k);
  Matrix y = Matrix::Zero(x.rows(), kt);
  for (Index j = 0; j < kt; ++j)
    for (const auto& [i, c] : column_stencil(k, j)) y.col(j).noalias() += c * x.col(i);
  return y;
}

FdRowStreamer::FdRowStreamer(const FiniteDifference& fd, Index expected_count)
    : fd_(fd), expected_(expected_count) {
  if (expected_count < fd.min_samples())
    throw DimensionMismatch("finite difference: stream shorter than stencil");
  ring_.resize(static_cast<std::size_t>(fd.stencil_width()));
}

const Vector& FdRowStreamer::buffered(Index index) const {
  return ring_[static_cast<std::size_t>(index % fd_.stencil_width())];
}

Vector FdRowStreamer::derivative_at(Index j) const {
  Vector d;
  for (const auto& [i, c] : fd_.column_stencil(expected_, j)) {
    const Vector& x = buffered(i);
    if (d.size() == 0)
      d = c * x;
    else
      d.noalias() += c * x;
  }
  return d;
}

void FdRowStreamer::push(ConstVectorRef x, const Emit& emit) {
  if (seen_ >= expected_) throw IndexOutOfRange("finite difference: more snapshots than declared");
  ring_[static_cast<std::size_t>(seen_ % fd_.stencil_width())] = x;
  const Index just = seen_;
  ++seen_;

  if (fd_.scheme() == FdScheme::kForward1) {
    if (just >= 1) emit(just - 1, buffered(just - 1), derivative_at(just - 1));
    return;
  }
  if (just == 4) {
    for (Index j = 0; j <= 2 && j < fd_.sample_count(expected_) - 2; ++j)
      emit(j, buffered(j), derivative_at(j));
  } else if (just > 4 && just <= expected_ - 1 && just - 2 < expected_ - 2) {
    emit(just - 2, buffered(just - 2), derivative_at(just - 2));
  }
}

void FdRowStreamer::finish(const Emit& emit) {
  if (seen_ != expected_)
    throw DimensionMismatch("finite difference: stream ended early");
  if (fd_.scheme() == FdScheme::kForward1) return;
  emit(expected_ - 2, buffered(expected_ - 2), derivative_at(expected_ - 2));
  emit(expected_ - 1, buffered(expected_ - 1), derivative_at(expected_ - 1));
}

FdScheme fd_scheme_from_string(const std::string& name) {
  if (name == "forward1") return FdScheme::kForward1;
  if (name == "central4") return FdScheme::kCentral4;
  throw ConfigError("unknown finite difference scheme: " + name);
}

std::string to_string(FdScheme scheme) {
  return scheme == FdScheme::kForward1 ? "forward1" : "central4";
}

}  // namespace srom
