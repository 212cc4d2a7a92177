#pragma once

// Symbolic derivatives of scalar and vector expressions.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcalc/expr.hpp"
#include "mcalc/jacobian.hpp"

namespace mcalc {

/// d e / d v for a scalar expression and a scalar variable (a scalar Var or
/// one element of a vector variable). Vector subexpressions are expanded
/// into components first. The result is simplified.
Expr derive_scalar(const Expr& e, const Expr& v);

/// Scalar leaves of a list of variables: a scalar Var is kept as is, a vector
/// Var contributes one element leaf per component.
std::vector<Expr> input_components(std::span<const Expr> vars);

/// Row vector of partials of a scalar expression.
Jacobian gradient(const Expr& e, const Expr& v);
/// Gradient with respect to the concatenation of several variables.
Jacobian gradient(const Expr& e, std::span<const Expr> vars);

/// Jacobian in numerator layout. Picks the diagonal representation for
/// element-wise functions of `v` and a column for vector functions of a
/// scalar; everything else is a dense grid.
Jacobian jacobian(const Expr& e, const Expr& v);
/// Jacobian of the stacked outputs with respect to the concatenated inputs.
Jacobian jacobian(std::span<const Expr> outputs, std::span<const Expr> inputs);

/// Entry-by-entry Jacobian, never using a structured representation.
Jacobian dense_jacobian(const Expr& e, const Expr& v);

/// True when each output component i of `e` depends on `v` only through v_i,
/// checked structurally. Such functions have a diagonal Jacobian.
bool is_elementwise_in(const Expr& e, const Expr& v);

/// Diagonal Jacobian of an element-wise function of `v`; nullopt when the
/// structural check fails, in which case the dense path applies.
std::optional<Jacobian> detect_diagonal(const Expr& e, const Expr& v);

/// Column of partials of a vector expression with respect to a scalar.
Jacobian scalar_expansion_partials(const Expr& e, const Expr& z);

/// Gradient of sum(inner) as a ones row times the Jacobian of `inner`.
Jacobian sum_reduction_grad(const Expr& e, const Expr& v);

/// Product of Jacobians (outer * inner), keeping diagonal structure where
/// possible. Both are taken in numerator layout. Throws DimensionMismatch.
Jacobian vector_chain(const Jacobian& outer, const Jacobian& inner);

/// Intermediate definition `name = definition` for total_derivative.
struct Binding {
  std::string name;
  Expr definition;
};

/// Total derivative df/dx through scalar intermediates, each of which may
/// reference x and earlier intermediates. The result is expressed in x alone.
/// Throws CyclicDefinition when a binding refers to itself or a later one.
Expr total_derivative(const Expr& f, const Expr& x, std::span<const Binding> intermediates);

/// Vector-level forward tangent of `e` along `seed`. `seed` is a variable
/// (whole vector, scalar, or element leaf); a whole vector is seeded with
/// ones in every component. Returns nullopt when the tangent is zero.
std::optional<Expr> tangent(const Expr& e, const Expr& seed);

/// Directional derivative of `e` where each named variable moves along the
/// given expression (same shape as the variable); unnamed variables are held
/// fixed. Returns nullopt when the result is structurally zero.
std::optional<Expr> directional(const Expr& e, const std::map<std::string, Expr>& directions);

}  // namespace mcalc
