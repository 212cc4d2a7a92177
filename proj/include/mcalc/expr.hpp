#pragma once

// Immutable expression trees over scalar and column-vector values.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcalc/errors.hpp"

namespace mcalc {

/// Scalar, or an n x 1 column vector.
class Shape {
 public:
  static Shape scalar() { return Shape(); }
  static Shape vector(std::size_t n);

  bool is_scalar() const { return length_ == 0; }
  bool is_vector() const { return length_ != 0; }
  /// Number of scalar components (1 for a scalar).
  std::size_t size() const { return length_ == 0 ? 1 : length_; }
  std::string to_string() const;

  friend bool operator==(const Shape&, const Shape&) = default;

 private:
  std::size_t length_ = 0;
};

enum class Op {
  Var,
  Const,
  ConstVec,
  Add,
  Sub,
  Mul,  // scalar multiplication, or scalar-by-vector scaling via Expand
  Pow,  // real constant exponent
  Hadamard,
  HadamardDiv,
  Expand,  // scalar broadcast to a ones-vector multiple
  Dot,
  Sum,
  Max0,
  Step,  // derivative of Max0: 1 for z > 0, else 0
  Sin,
  Cos,
  Ln,
  Exp,
  Neg,
};

std::string_view op_name(Op op);
bool is_unary_call(Op op);

struct Node;

class Expr {
 public:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  Op op() const;
  const Shape& shape() const;
  std::span<const Expr> children() const;
  const Expr& child(std::size_t i) const;

  // Var
  const std::string& name() const;
  /// Set when this leaf denotes one element of a vector variable.
  std::optional<std::size_t> component() const;
  /// Declared shape of the variable (the whole vector for a component leaf).
  const Shape& declared_shape() const;
  bool is_var() const { return op() == Op::Var; }
  bool is_component() const { return is_var() && component().has_value(); }

  /// Const value.
  double value() const;
  /// Pow exponent.
  double exponent() const;
  /// ConstVec values.
  std::span<const double> values() const;

  bool is_const() const { return op() == Op::Const; }
  bool is_const(double v) const { return op() == Op::Const && value() == v; }

  const Node* get() const { return node_.get(); }

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  std::shared_ptr<const Node> node_;
};

struct Node {
  Op op = Op::Const;
  Shape shape;
  std::vector<Expr> children;
  std::string name;
  std::optional<std::size_t> component;
  Shape declared;
  double value = 0.0;  // Const value or Pow exponent
  std::vector<double> values;
};

/// Extra fields for `build` on leaves and parameterised nodes.
struct NodeMeta {
  std::string name;
  Shape shape;
  std::optional<std::size_t> component;
  double value = 0.0;
  std::vector<double> values;
  std::size_t length = 0;
};

/// Validated construction of any node kind. Element-wise ops that combine a
/// scalar with a vector get an Expand node inserted around the scalar.
Expr build(Op op, std::vector<Expr> children, const NodeMeta& meta = {});

Expr var(std::string name, Shape shape = Shape::scalar());
/// Leaf for element `index` (0-based) of vector variable `name` of length `length`.
Expr element(std::string name, std::size_t index, std::size_t length);
Expr constant(double v);
Expr constant_vec(std::vector<double> values);
Expr ones(std::size_t n);

Expr add(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr mul(Expr a, Expr b);
Expr pow(Expr base, double exponent);
Expr hadamard(Expr a, Expr b);
Expr hadamard_div(Expr a, Expr b);
Expr expand(Expr scalar, std::size_t n);
Expr dot(Expr a, Expr b);
Expr sum(Expr v);
Expr max0(Expr e);
Expr step(Expr e);
Expr sin(Expr e);
Expr cos(Expr e);
Expr ln(Expr e);
Expr exp(Expr e);
Expr neg(Expr e);
/// a * b^-1 for scalars.
Expr quotient(Expr a, Expr b);

/// Rebuild a node of the same kind over new children.
Expr with_children(const Expr& e, std::vector<Expr> children);

inline const Shape& shape_of(const Expr& e) { return e.shape(); }

/// Variables reachable from `e`, keyed by name, with their declared shapes.
/// Throws ConflictingShape when one name is used with two shapes.
std::map<std::string, Shape> free_vars(const Expr& e);

bool depends_on(const Expr& e, std::string_view name);
std::size_t node_count(const Expr& e);
std::size_t depth(const Expr& e);

/// Replace variables by expressions. A vector variable replaced by a vector
/// expression also rewrites its component leaves.
Expr substitute(const Expr& e, const std::map<std::string, Expr>& replacements);

/// Scalar expressions for each component of `e` (one for a scalar). Sum and
/// Dot become explicit addition chains; element-wise division becomes a * b^-1.
std::vector<Expr> components(const Expr& e);

/// Shallow semantics-preserving rewrite: constant folding, 0/1 identities,
/// double negation, Sum of a constant vector.
Expr simplify(const Expr& e);

}  // namespace mcalc
