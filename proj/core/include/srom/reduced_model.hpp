#pragma once

#include "srom/types.hpp"

namespace srom {

/// Which coefficient blocks the regression row carries. The feature layout is
/// [state, state (x) state, input?, constant?] with the quadratic block in
/// Kronecker order: entry i*r + j (0-based) multiplies x_i * x_j. Purely
/// linear systems may drop the quadratic block to keep the problem
/// identifiable from a single trajectory.
struct OperatorStructure {
  Index r = 0;
  Index m = 0;          // input dimension; 0 disables the input block
  bool constant = true;
  bool quadratic = true;

  Index quad_size() const { return quadratic ? r * r : 0; }
  Index dim() const { return r + quad_size() + m + (constant ? 1 : 0); }
  Index linear_offset() const { return 0; }
  Index quadratic_offset() const { return r; }
  Index input_offset() const { return r + quad_size(); }
  Index constant_offset() const { return r + quad_size() + m; }
};

/// Learned polynomial reduced operators. B has zero columns when the model has
/// no input; c has zero length when there is no constant term.
struct ReducedModel {
  Matrix A1;  // r x r
  Matrix A2;  // r x r^2, Kronecker column order
  Matrix B;   // r x m
  Vector c;   // r or empty

  Index order() const { return A1.rows(); }
  Index input_dim() const { return B.cols(); }
  bool has_constant() const { return c.size() > 0; }

  OperatorStructure structure() const {
    return OperatorStructure{order(), input_dim(), has_constant()};
  }

  /// dx/dt at the given reduced state (and input, when present).
  Vector rhs(ConstVectorRef xhat, ConstVectorRef u) const;
  Vector rhs(ConstVectorRef xhat) const;

  /// A2 * (xhat (x) xhat) without materializing operators.
  Vector quadratic(ConstVectorRef xhat) const;

  /// Jacobian A1 + A2 * (I (x) x + x (x) I).
  Matrix jacobian(ConstVectorRef xhat) const;

  /// Stacked regression unknown [A1, A2, B?, c?]^T of shape d x r.
  Matrix stacked() const;
  static ReducedModel from_stacked(const Matrix& ops, const OperatorStructure& st);
};

/// One regression row [x^T, (x (x) x)^T, u^T, 1] laid out per `st`.
Vector assemble_row(ConstVectorRef xhat, ConstVectorRef u, const OperatorStructure& st);
/// Full layout with input and constant blocks.
Vector assemble_row(ConstVectorRef xhat, ConstVectorRef u);

/// x (x) y in the row-major pairing used by the quadratic block.
Vector kron(ConstVectorRef x, ConstVectorRef y);

}  // namespace srom
