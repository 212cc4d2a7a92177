#pragma once

#include <span>

#include "mcalc/env.hpp"
#include "mcalc/expr.hpp"

namespace mcalc::detail {

/// Apply the operator of `node` to already-evaluated operand values.
/// Throws DomainError (or DivisionByZero) outside an operator's domain.
Value apply_op(const Expr& node, std::span<const Value> args);

double apply_unary(Op op, double x, double exponent = 0.0);

}  // namespace mcalc::detail
