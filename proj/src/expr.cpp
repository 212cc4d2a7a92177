#include "mcalc/expr.hpp"

#include <algorithm>
#include <utility>

namespace mcalc {

Shape Shape::vector(std::size_t n) {
  if (n == 0) throw ShapeMismatch("vector length must be at least 1");
  Shape s;
  s.length_ = n;
  return s;
}

std::string Shape::to_string() const {
  return is_scalar() ? "Scalar" : "Vector(" + std::to_string(length_) + ")";
}

std::string_view op_name(Op op) {
  switch (op) {
    case Op::Var: return "var";
    case Op::Const: return "const";
    case Op::ConstVec: return "constvec";
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Pow: return "pow";
    case Op::Hadamard: return "hadamard";
    case Op::HadamardDiv: return "hadamard_div";
    case Op::Expand: return "expand";
    case Op::Dot: return "dot";
    case Op::Sum: return "sum";
    case Op::Max0: return "max0";
    case Op::Step: return "step";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Ln: return "ln";
    case Op::Exp: return "exp";
    case Op::Neg: return "neg";
  }
  return "?";
}

bool is_unary_call(Op op) {
  switch (op) {
    case Op::Max0:
    case Op::Step:
    case Op::Sin:
    case Op::Cos:
    case Op::Ln:
    case Op::Exp:
      return true;
    default:
      return false;
  }
}

Op Expr::op() const { return node_->op; }
const Shape& Expr::shape() const { return node_->shape; }
std::span<const Expr> Expr::children() const { return node_->children; }
const Expr& Expr::child(std::size_t i) const { return node_->children.at(i); }
const std::string& Expr::name() const { return node_->name; }
std::optional<std::size_t> Expr::component() const { return node_->component; }
const Shape& Expr::declared_shape() const { return node_->declared; }
double Expr::value() const { return node_->value; }
double Expr::exponent() const { return node_->value; }
std::span<const double> Expr::values() const { return node_->values; }

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const Node& x = *a.node_;
  const Node& y = *b.node_;
  if (x.op != y.op || !(x.shape == y.shape) || x.children.size() != y.children.size()) return false;
  switch (x.op) {
    case Op::Var:
      if (x.name != y.name || x.component != y.component || !(x.declared == y.declared)) return false;
      break;
    case Op::Const:
    case Op::Pow:
      if (x.value != y.value) return false;
      break;
    case Op::ConstVec:
      if (x.values != y.values) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < x.children.size(); ++i) {
    if (!(x.children[i] == y.children[i])) return false;
  }
  return true;
}

namespace {

Expr make(Node n) { return Expr(std::make_shared<const Node>(std::move(n))); }

void require_arity(Op op, const std::vector<Expr>& children, std::size_t n) {
  if (children.size() != n) {
    throw ArityError(std::string(op_name(op)) + " expects " + std::to_string(n) + " operand(s), got " +
                     std::to_string(children.size()));
  }
}

}  // namespace

Expr build(Op op, std::vector<Expr> children, const NodeMeta& meta) {
  Node n;
  n.op = op;
  switch (op) {
    case Op::Var:
      require_arity(op, children, 0);
      if (meta.name.empty()) throw Error("variable needs a name");
      n.name = meta.name;
      if (meta.component) {
        n.declared = Shape::vector(meta.length);
        if (*meta.component >= meta.length) throw ShapeMismatch("component index out of range for " + meta.name);
        n.component = meta.component;
        n.shape = Shape::scalar();
      } else {
        n.declared = meta.shape;
        n.shape = meta.shape;
      }
      return make(std::move(n));
    case Op::Const:
      require_arity(op, children, 0);
      n.value = meta.value;
      return make(std::move(n));
    case Op::ConstVec:
      require_arity(op, children, 0);
      n.shape = Shape::vector(meta.values.size());
      n.values = meta.values;
      return make(std::move(n));
    case Op::Expand:
      require_arity(op, children, 1);
      if (!children[0].shape().is_scalar()) throw ShapeMismatch("expand needs a scalar operand");
      n.shape = Shape::vector(meta.length);
      break;
    case Op::Dot:
      require_arity(op, children, 2);
      if (!children[0].shape().is_vector() || !children[1].shape().is_vector()) {
        throw ShapeMismatch("dot needs two vector operands");
      }
      if (!(children[0].shape() == children[1].shape())) {
        throw ShapeMismatch("dot of " + children[0].shape().to_string() + " and " +
                            children[1].shape().to_string());
      }
      n.shape = Shape::scalar();
      break;
    case Op::Sum:
      require_arity(op, children, 1);
      if (!children[0].shape().is_vector()) throw ShapeMismatch("sum needs a vector operand");
      n.shape = Shape::scalar();
      break;
    case Op::Pow:
      require_arity(op, children, 1);
      n.value = meta.value;
      n.shape = children[0].shape();
      break;
    case Op::Max0:
    case Op::Step:
    case Op::Sin:
    case Op::Cos:
    case Op::Ln:
    case Op::Exp:
    case Op::Neg:
      require_arity(op, children, 1);
      n.shape = children[0].shape();
      break;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Hadamard:
    case Op::HadamardDiv: {
      require_arity(op, children, 2);
      Shape a = children[0].shape();
      Shape b = children[1].shape();
      if (a.is_scalar() && b.is_vector()) {
        children[0] = build(Op::Expand, {children[0]}, {.length = b.size()});
      } else if (a.is_vector() && b.is_scalar()) {
        children[1] = build(Op::Expand, {children[1]}, {.length = a.size()});
      } else if (a.is_vector() && b.is_vector()) {
        if (!(a == b)) {
          throw ShapeMismatch(std::string(op_name(op)) + " of " + a.to_string() + " and " + b.to_string());
        }
        if (op == Op::Mul && children[0].op() != Op::Expand && children[1].op() != Op::Expand) {
          throw ShapeMismatch("'*' needs a scalar operand; use (*) or dot for two vectors");
        }
      }
      n.shape = children[0].shape();
      break;
    }
  }
  n.children = std::move(children);
  return make(std::move(n));
}

Expr var(std::string name, Shape shape) { return build(Op::Var, {}, {.name = std::move(name), .shape = shape}); }

Expr element(std::string name, std::size_t index, std::size_t length) {
  return build(Op::Var, {}, {.name = std::move(name), .component = index, .length = length});
}

Expr constant(double v) { return build(Op::Const, {}, {.value = v}); }
Expr constant_vec(std::vector<double> values) { return build(Op::ConstVec, {}, {.values = std::move(values)}); }
Expr ones(std::size_t n) { return constant_vec(std::vector<double>(n, 1.0)); }

Expr add(Expr a, Expr b) { return build(Op::Add, {std::move(a), std::move(b)}); }
Expr sub(Expr a, Expr b) { return build(Op::Sub, {std::move(a), std::move(b)}); }
Expr mul(Expr a, Expr b) { return build(Op::Mul, {std::move(a), std::move(b)}); }
Expr pow(Expr base, double exponent) { return build(Op::Pow, {std::move(base)}, {.value = exponent}); }
Expr hadamard(Expr a, Expr b) { return build(Op::Hadamard, {std::move(a), std::move(b)}); }
Expr hadamard_div(Expr a, Expr b) { return build(Op::HadamardDiv, {std::move(a), std::move(b)}); }
Expr expand(Expr scalar, std::size_t n) { return build(Op::Expand, {std::move(scalar)}, {.length = n}); }
Expr dot(Expr a, Expr b) { return build(Op::Dot, {std::move(a), std::move(b)}); }
Expr sum(Expr v) { return build(Op::Sum, {std::move(v)}); }
Expr max0(Expr e) { return build(Op::Max0, {std::move(e)}); }
Expr step(Expr e) { return build(Op::Step, {std::move(e)}); }
Expr sin(Expr e) { return build(Op::Sin, {std::move(e)}); }
Expr cos(Expr e) { return build(Op::Cos, {std::move(e)}); }
Expr ln(Expr e) { return build(Op::Ln, {std::move(e)}); }
Expr exp(Expr e) { return build(Op::Exp, {std::move(e)}); }
Expr neg(Expr e) { return build(Op::Neg, {std::move(e)}); }
Expr quotient(Expr a, Expr b) { return mul(std::move(a), pow(std::move(b), -1.0)); }

Expr with_children(const Expr& e, std::vector<Expr> children) {
  NodeMeta meta;
  switch (e.op()) {
    case Op::Pow:
      meta.value = e.exponent();
      break;
    case Op::Expand:
      meta.length = e.shape().size();
      break;
    case Op::Var:
    case Op::Const:
    case Op::ConstVec:
      return e;
    default:
      break;
  }
  return build(e.op(), std::move(children), meta);
}

namespace {

void collect_vars(const Expr& e, std::map<std::string, Shape>& out) {
  if (e.is_var()) {
    auto [it, inserted] = out.emplace(e.name(), e.declared_shape());
    if (!inserted && !(it->second == e.declared_shape())) {
      throw ConflictingShape("variable '" + e.name() + "' used as " + it->second.to_string() + " and " +
                             e.declared_shape().to_string());
    }
    return;
  }
  for (const auto& c : e.children()) collect_vars(c, out);
}

Expr chain_sum(const std::vector<Expr>& terms) {
  Expr acc = terms.front();
  for (std::size_t i = 1; i < terms.size(); ++i) acc = add(acc, terms[i]);
  return acc;
}

}  // namespace

std::map<std::string, Shape> free_vars(const Expr& e) {
  std::map<std::string, Shape> out;
  collect_vars(e, out);
  return out;
}

bool depends_on(const Expr& e, std::string_view name) {
  if (e.is_var()) return e.name() == name;
  return std::any_of(e.children().begin(), e.children().end(),
                     [&](const Expr& c) { return depends_on(c, name); });
}

std::size_t node_count(const Expr& e) {
  std::size_t n = 1;
  for (const auto& c : e.children()) n += node_count(c);
  return n;
}

std::size_t depth(const Expr& e) {
  std::size_t d = 0;
  for (const auto& c : e.children()) d = std::max(d, depth(c));
  return d + 1;
}

Expr substitute(const Expr& e, const std::map<std::string, Expr>& replacements) {
  if (e.is_var()) {
    auto it = replacements.find(e.name());
    if (it == replacements.end()) return e;
    const Expr& r = it->second;
    if (e.is_component()) {
      if (!(r.shape() == e.declared_shape())) {
        throw ShapeMismatch("cannot substitute " + r.shape().to_string() + " for " + e.name());
      }
      return components(r).at(*e.component());
    }
    if (!(r.shape() == e.shape())) {
      throw ShapeMismatch("cannot substitute " + r.shape().to_string() + " for " + e.name());
    }
    return r;
  }
  if (e.children().empty()) return e;
  std::vector<Expr> kids;
  kids.reserve(e.children().size());
  bool changed = false;
  for (const auto& c : e.children()) {
    kids.push_back(substitute(c, replacements));
    changed = changed || kids.back().get() != c.get();
  }
  return changed ? with_children(e, std::move(kids)) : e;
}

std::vector<Expr> components(const Expr& e) {
  const std::size_t n = e.shape().size();
  std::vector<Expr> out;
  out.reserve(n);
  switch (e.op()) {
    case Op::Var:
      if (e.shape().is_scalar()) return {e};
      for (std::size_t i = 0; i < n; ++i) out.push_back(element(e.name(), i, n));
      return out;
    case Op::Const:
      return {e};
    case Op::ConstVec:
      for (double v : e.values()) out.push_back(constant(v));
      return out;
    case Op::Expand: {
      Expr s = components(e.child(0)).front();
      return std::vector<Expr>(n, s);
    }
    case Op::Sum:
      return {chain_sum(components(e.child(0)))};
    case Op::Dot: {
      auto a = components(e.child(0));
      auto b = components(e.child(1));
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < a.size(); ++i) terms.push_back(mul(a[i], b[i]));
      return {chain_sum(terms)};
    }
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Hadamard:
    case Op::HadamardDiv: {
      auto a = components(e.child(0));
      auto b = components(e.child(1));
      for (std::size_t i = 0; i < n; ++i) {
        switch (e.op()) {
          case Op::Add: out.push_back(add(a[i], b[i])); break;
          case Op::Sub: out.push_back(sub(a[i], b[i])); break;
          case Op::HadamardDiv: out.push_back(quotient(a[i], b[i])); break;
          default: out.push_back(mul(a[i], b[i])); break;
        }
      }
      return out;
    }
    default: {
      auto a = components(e.child(0));
      for (auto& c : a) out.push_back(with_children(e, {c}));
      return out;
    }
  }
}

}  // namespace mcalc
