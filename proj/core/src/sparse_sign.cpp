#include "srom/sparse_sign.hpp"

#include <cmath>
#include <stdexcept>

#include "srom/errors.hpp"
#include "srom/rng.hpp"

namespace srom {

SparseSignMatrix::SparseSignMatrix(Index rows, Index cols, int zeta,
                                   std::uint64_t seed,
                                   std::uint64_t stream_tag)
    : rows_(rows), cols_(cols), zeta_(zeta) {
  if (rows <= 0 || cols <= 0) throw DimensionMismatch("sparse sign map: empty shape");
  if (zeta <= 0 || zeta > rows)
    throw DimensionMismatch("sparse sign map: zeta must lie in [1, rows]");

  row_index_.resize(static_cast<std::size_t>(cols) * zeta);
  values_.resize(static_cast<std::size_t>(cols) * zeta);
  const double scale = 1.0 / std::sqrt(static_cast<double>(zeta));

  std::vector<Index> pool(static_cast<std::size_t>(rows));
  for (Index j = 0; j < cols; ++j) {
    CounterRng rng(seed, stream_tag * 0x1000000000ull + static_cast<std::uint64_t>(j));
    // Partial Fisher-Yates picks zeta distinct rows for this column.
    for (Index i = 0; i < rows; ++i) pool[static_cast<std::size_t>(i)] = i;
    for (int t = 0; t < zeta_; ++t) {
      const Index pick =
          static_cast<Index>(t) +
          static_cast<Index>(rng.next_below(static_cast<std::uint64_t>(rows - t)));
      std::swap(pool[static_cast<std::size_t>(t)], pool[static_cast<std::size_t>(pick)]);
      const std::size_t slot = static_cast<std::size_t>(j) * zeta_ + t;
      row_index_[slot] = pool[static_cast<std::size_t>(t)];
      values_[slot] = rng.next_sign_bit() ? scale : -scale;
    }
  }
}

Vector SparseSignMatrix::apply(ConstVectorRef x) const {
  if (x.size() != cols_) throw DimensionMismatch("sparse sign apply: length mismatch");
  Vector y = Vector::Zero(rows_);
  for (Index j = 0; j < cols_; ++j) {
    const double xj = x[j];
    if (xj == 0.0) continue;
    const std::size_t base = static_cast<std::size_t>(j) * zeta_;
    for (int t = 0; t < zeta_; ++t) y[row_index_[base + t]] += values_[base + t] * xj;
  }
  return y;
}

void SparseSignMatrix::add_outer(Matrix& acc, ConstVectorRef x, Index col) const {
  if (col < 0 || col >= cols_) throw IndexOutOfRange("sparse sign outer: column out of range");
  if (acc.rows() != x.size() || acc.cols() != rows_)
    throw DimensionMismatch("sparse sign outer: accumulator shape mismatch");
  const std::size_t base = static_cast<std::size_t>(col) * zeta_;
  for (int t = 0; t < zeta_; ++t)
    acc.col(row_index_[base + t]).noalias() += values_[base + t] * x;
}

Matrix SparseSignMatrix::apply_matrix(ConstMatrixRef m) const {
  if (m.rows() != cols_) throw DimensionMismatch("sparse sign apply: row mismatch");
  return apply_leading(m, cols_);
}

Matrix SparseSignMatrix::apply_leading(ConstMatrixRef m, Index count) const {
  if (count < 0 || count > cols_) throw IndexOutOfRange("sparse sign apply: column count");
  if (m.rows() != count) throw DimensionMismatch("sparse sign apply: row mismatch");
  Matrix y = Matrix::Zero(rows_, m.cols());
  for (Index j = 0; j < count; ++j) {
    const std::size_t base = static_cast<std::size_t>(j) * zeta_;
    for (int t = 0; t < zeta_; ++t)
      y.row(row_index_[base + t]).noalias() += values_[base + t] * m.row(j);
  }
  return y;
}

Matrix SparseSignMatrix::dense() const {
  Matrix a = Matrix::Zero(rows_, cols_);
  for (Index j = 0; j < cols_; ++j) {
    const std::size_t base = static_cast<std::size_t>(j) * zeta_;
    for (int t = 0; t < zeta_; ++t) a(row_index_[base + t], j) = values_[base + t];
  }
  return a;
}

}  // namespace srom
