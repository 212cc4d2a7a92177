#include <algorithm>
#include <cmath>
#include <vector>

#include "mcalc/expr.hpp"
#include "numeric.hpp"

namespace mcalc {

namespace {

bool is_constant_valued(const Expr& e) {
  return e.op() == Op::Const || e.op() == Op::ConstVec || (e.op() == Op::Expand && e.child(0).is_const());
}

bool all_equal(const Expr& e, double v) {
  switch (e.op()) {
    case Op::Const: return e.value() == v;
    case Op::ConstVec: return std::all_of(e.values().begin(), e.values().end(), [v](double x) { return x == v; });
    case Op::Expand: return e.child(0).is_const(v);
    default: return false;
  }
}

Value constant_value(const Expr& e) {
  if (e.op() == Op::Const) return e.value();
  if (e.op() == Op::ConstVec) return Value(std::vector<double>(e.values().begin(), e.values().end()));
  return Value(e.shape(), std::vector<double>(e.shape().size(), e.child(0).value()));
}

Expr from_value(const Value& v) {
  if (v.is_scalar()) return constant(v.scalar());
  return constant_vec(std::vector<double>(v.data().begin(), v.data().end()));
}

Expr filled(const Shape& shape, double v) {
  return shape.is_scalar() ? constant(v) : expand(constant(v), shape.size());
}

std::optional<Expr> fold(const Expr& e) {
  if (e.op() == Op::Expand || e.children().empty()) return std::nullopt;
  if (!std::all_of(e.children().begin(), e.children().end(), is_constant_valued)) return std::nullopt;
  std::vector<Value> args;
  for (const auto& c : e.children()) args.push_back(constant_value(c));
  try {
    Value v = detail::apply_op(e, args);
    for (double x : v.data()) {
      if (!std::isfinite(x)) return std::nullopt;
    }
    return from_value(v);
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

// Identity rewrites on a node whose children are already simplified.
Expr rewrite(const Expr& e) {
  if (auto folded = fold(e)) return *folded;
  const auto kids = e.children();
  switch (e.op()) {
    case Op::Add:
      if (all_equal(kids[1], 0.0) && kids[0].shape() == e.shape()) return kids[0];
      if (all_equal(kids[0], 0.0) && kids[1].shape() == e.shape()) return kids[1];
      break;
    case Op::Sub:
      if (all_equal(kids[1], 0.0) && kids[0].shape() == e.shape()) return kids[0];
      if (all_equal(kids[0], 0.0) && kids[1].shape() == e.shape()) return rewrite(neg(kids[1]));
      break;
    case Op::Mul:
    case Op::Hadamard:
      if (all_equal(kids[0], 0.0)) return filled(e.shape(), 0.0);
      if (all_equal(kids[1], 0.0)) return filled(e.shape(), 0.0);
      if (all_equal(kids[0], 1.0) && kids[1].shape() == e.shape()) return kids[1];
      if (all_equal(kids[1], 1.0) && kids[0].shape() == e.shape()) return kids[0];
      break;
    case Op::HadamardDiv:
      if (all_equal(kids[1], 1.0)) return kids[0];
      break;
    case Op::Pow:
      if (e.exponent() == 1.0) return kids[0];
      if (e.exponent() == 0.0) return filled(e.shape(), 1.0);
      break;
    case Op::Neg:
      if (kids[0].op() == Op::Neg) return kids[0].child(0);
      break;
    default:
      break;
  }
  return e;
}

}  // namespace

Expr simplify(const Expr& e) {
  if (e.children().empty()) return e;
  std::vector<Expr> kids;
  kids.reserve(e.children().size());
  bool changed = false;
  for (const auto& c : e.children()) {
    kids.push_back(simplify(c));
    changed = changed || kids.back().get() != c.get();
  }
  return rewrite(changed ? with_children(e, std::move(kids)) : e);
}

}  // namespace mcalc
