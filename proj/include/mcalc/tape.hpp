#pragma once

// Lowering to single-operator intermediate variables, with forward- and
// reverse-mode numeric differentiation over the resulting tape.
//
// lower(ln(sin(x^3)^2)) gives
//   u1 = x^3
//   u2 = sin(u1)
//   u3 = u2^2
//   u4 = ln(u3)

#include <cstddef>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "mcalc/env.hpp"
#include "mcalc/expr.hpp"

namespace mcalc {

/// An operand is either an earlier tape entry (by index) or a leaf
/// expression: a variable, an element leaf, or a constant.
using Operand = std::variant<std::size_t, Expr>;

struct TapeEntry {
  std::string id;  // u1, u2, ...
  /// The subtree this entry computes; its operator and parameters (Pow
  /// exponent, Expand length) are what the entry applies.
  Expr node;
  std::vector<Operand> operands;
  /// A tape for a bare leaf holds one entry that just names it.
  bool alias = false;

  Op op() const { return node.op(); }
  const Shape& shape() const { return node.shape(); }
};

struct Tape {
  std::vector<TapeEntry> entries;  // topologically ordered, result last

  std::size_t size() const { return entries.size(); }
  const TapeEntry& result() const { return entries.back(); }
};

/// Simplifies `e`, then emits one entry per operator in post-order.
Tape lower(const Expr& e);

/// Expression tree recomputed from the tape; equals simplify(e) for lower(e).
Expr rebuild(const Tape& tape);

/// Right-hand side of entry i, with earlier entries referenced by id.
Expr entry_expr(const Tape& tape, std::size_t i);

/// Numeric derivative of one entry with respect to one operand. Element-wise
/// operators on vectors have Diagonal partials, Sum and Dot have Row partials
/// and Expand has a Col partial of ones.
struct LocalPartial {
  enum class Kind { Scalar, Diagonal, Row, Col };
  Kind kind;
  std::vector<double> values;
};

enum class Mode { Forward, Reverse };

struct DerivRecord {
  Mode mode;
  std::vector<Value> values;                        // per entry
  std::vector<std::vector<LocalPartial>> partials;  // per entry, per operand
  /// Tangents (forward) or adjoints (reverse), per entry.
  std::vector<Value> accumulated;
  /// Forward: d result / d seed.
  Value tangent = 0.0;
  /// Reverse: d result / d variable for every variable leaf, shaped like the
  /// variable.
  std::map<std::string, Value> adjoints;

  const Value& value() const { return values.back(); }
};

/// One sweep in tape order. `seed` is a scalar variable or an element leaf.
/// DomainError names the offending entry.
DerivRecord forward_mode(const Tape& tape, const Env& env, const Expr& seed);

/// Value sweep then adjoint sweep; the result must be scalar.
DerivRecord reverse_mode(const Tape& tape, const Env& env);

/// Sum over paths of products of symbolic local partials, with every
/// intermediate substituted back. `v` is a scalar variable or element leaf.
Expr symbolic_backsub(const Tape& tape, const Expr& v);

/// One line per entry: "u3 = u2^2   ∂u3/∂u2 = 2 * u2".
std::string render(const Tape& tape);

/// Graphviz digraph; leaves appear once, edges run from operand to user.
std::string to_dot(const Tape& tape);

}  // namespace mcalc
