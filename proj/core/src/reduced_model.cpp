#include "srom/reduced_model.hpp"

#include "srom/errors.hpp"

namespace srom {

Vector kron(ConstVectorRef x, ConstVectorRef y) {
  Vector out(x.size() * y.size());
  for (Index i = 0; i < x.size(); ++i) out.segment(i * y.size(), y.size()) = x[i] * y;
  return out;
}

Vector ReducedModel::quadratic(ConstVectorRef xhat) const {
  return A2 * kron(xhat, xhat);
}

Vector ReducedModel::rhs(ConstVectorRef xhat, ConstVectorRef u) const {
  Vector out = A1 * xhat + quadratic(xhat);
  if (B.cols() > 0) {
    if (u.size() != B.cols()) throw DimensionMismatch("reduced model: input length mismatch");
    out.noalias() += B * u;
  }
  if (c.size() > 0) out += c;
  return out;
}

Vector ReducedModel::rhs(ConstVectorRef xhat) const {
  if (B.cols() > 0) throw MissingDerivatives("reduced model: input signal required");
  return rhs(xhat, Vector());
}

Matrix ReducedModel::jacobian(ConstVectorRef xhat) const {
  const Index r = order();
  Matrix j = A1;
  for (Index col = 0; col < r; ++col)
    for (Index t = 0; t < r; ++t) {
      const double xt = xhat[t];
      if (xt == 0.0) continue;
      j.col(col).noalias() += xt * (A2.col(t * r + col) + A2.col(col * r + t));
    }
  return j;
}

Matrix ReducedModel::stacked() const {
  const OperatorStructure st = structure();
  Matrix ops(st.dim(), order());
  ops.topRows(st.r) = A1.transpose();
  ops.middleRows(st.quadratic_offset(), st.quad_size()) = A2.transpose();
  if (st.m > 0) ops.middleRows(st.input_offset(), st.m) = B.transpose();
  if (st.constant) ops.row(st.constant_offset()) = c.transpose();
  return ops;
}

ReducedModel ReducedModel::from_stacked(const Matrix& ops, const OperatorStructure& st) {
  if (ops.rows() != st.dim() || ops.cols() != st.r)
    throw DimensionMismatch("reduced model: stacked operator shape mismatch");
  ReducedModel model;
  model.A1 = ops.topRows(st.r).transpose();
  model.A2 = st.quadratic
                 ? Matrix(ops.middleRows(st.quadratic_offset(), st.r * st.r).transpose())
                 : Matrix::Zero(st.r, st.r * st.r);
  model.B = st.m > 0 ? Matrix(ops.middleRows(st.input_offset(), st.m).transpose())
                     : Matrix(st.r, 0);
  model.c = st.constant ? Vector(ops.row(st.constant_offset()).transpose()) : Vector();
  return model;
}

Vector assemble_row(ConstVectorRef xhat, ConstVectorRef u, const OperatorStructure& st) {
  if (xhat.size() != st.r) throw DimensionMismatch("assemble row: state length mismatch");
  if (st.m > 0 && u.size() != st.m)
    throw DimensionMismatch("assemble row: input length mismatch");
  Vector row(st.dim());
  row.head(st.r) = xhat;
  if (st.quadratic) row.segment(st.quadratic_offset(), st.r * st.r) = kron(xhat, xhat);
  if (st.m > 0) row.segment(st.input_offset(), st.m) = u;
  if (st.constant) row[st.constant_offset()] = 1.0;
  return row;
}

Vector assemble_row(ConstVectorRef xhat, ConstVectorRef u) {
  return assemble_row(xhat, u, OperatorStructure{xhat.size(), u.size(), true});
}

}  // namespace srom
