#pragma once

// Deterministic normal form used for comparing and displaying derivatives.
//
// A scalar expression is scalarized, then normalized into a sum of terms
// `c * b1^p1 * b2^p2 ...`. Equal bases merge by adding exponents, like terms
// merge by adding coefficients, and constant subexpressions fold. Sums that
// cannot be distributed stay as opaque bases. Factors print with variables
// first, then function calls, then parenthesised sums, negative powers last.

#include "mcalc/expr.hpp"
#include "mcalc/jacobian.hpp"

namespace mcalc {

Expr canonical(const Expr& e);
Jacobian canonical(const Jacobian& j);

/// True when the canonical forms of `a` and `b` are structurally identical.
bool canonically_equal(const Expr& a, const Expr& b);

/// Total order on expression trees: negative, zero or positive.
int compare(const Expr& a, const Expr& b);

}  // namespace mcalc
