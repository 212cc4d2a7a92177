#include "mcalc/tape.hpp"

#include <cmath>
#include <set>

#include "mcalc/canonical.hpp"
#include "mcalc/differentiator.hpp"
#include "mcalc/evaluator.hpp"
#include "mcalc/jacobian.hpp"
#include "mcalc/parser.hpp"
#include "numeric.hpp"

namespace mcalc {

namespace {

Operand emit(const Expr& n, Tape& tape) {
  if (n.children().empty()) return n;
  std::vector<Operand> ops;
  for (const auto& c : n.children()) ops.push_back(emit(c, tape));
  tape.entries.push_back({"u" + std::to_string(tape.entries.size() + 1), n, std::move(ops), false});
  return tape.entries.size() - 1;
}

// Entry i over variables named by `name_of(k)` for earlier entries.
template <typename NameOf>
Expr local_expr(const Tape& tape, std::size_t i, NameOf name_of) {
  const TapeEntry& entry = tape.entries.at(i);
  if (entry.alias) return entry.node;
  std::vector<Expr> kids;
  for (const auto& op : entry.operands) {
    if (const auto* k = std::get_if<std::size_t>(&op)) {
      kids.push_back(var(name_of(*k), tape.entries[*k].shape()));
    } else {
      kids.push_back(std::get<Expr>(op));
    }
  }
  // An expanded scalar operand is its own vector entry, so the product is elementwise.
  if (entry.node.op() == Op::Mul && !kids[0].shape().is_scalar() && !kids[1].shape().is_scalar()) {
    return hadamard(kids[0], kids[1]);
  }
  return with_children(entry.node, std::move(kids));
}

std::string internal_name(std::size_t k) { return "$u" + std::to_string(k + 1); }

using Kind = LocalPartial::Kind;

LocalPartial same_shape(const Value& v) {
  return {v.is_scalar() ? Kind::Scalar : Kind::Diagonal, std::vector<double>(v.data().begin(), v.data().end())};
}

LocalPartial filled(const Shape& s, double c) { return same_shape(Value(s, std::vector<double>(s.size(), c))); }

template <typename F>
LocalPartial elementwise(const Value& u, F f) {
  std::vector<double> d;
  for (double x : u.data()) d.push_back(f(x));
  return same_shape(Value(u.shape(), std::move(d)));
}

std::vector<LocalPartial> local_partials(const TapeEntry& entry, const std::vector<Value>& args) {
  const Shape& s = entry.shape();
  switch (entry.op()) {
    case Op::Add: return {filled(s, 1.0), filled(s, 1.0)};
    case Op::Sub: return {filled(s, 1.0), filled(s, -1.0)};
    case Op::Neg: return {filled(s, -1.0)};
    case Op::Mul:
    case Op::Hadamard: return {same_shape(args[1]), same_shape(args[0])};
    case Op::HadamardDiv: {
      std::vector<double> da;
      std::vector<double> db;
      for (std::size_t i = 0; i < args[0].size(); ++i) {
        const double b = args[1][i];
        da.push_back(1.0 / b);
        db.push_back(-args[0][i] / (b * b));
      }
      return {same_shape(Value(s, std::move(da))), same_shape(Value(s, std::move(db)))};
    }
    case Op::Pow: {
      const double p = entry.node.exponent();
      return {elementwise(args[0], [p](double x) { return p * detail::apply_unary(Op::Pow, x, p - 1.0); })};
    }
    case Op::Sin: return {elementwise(args[0], [](double x) { return std::cos(x); })};
    case Op::Cos: return {elementwise(args[0], [](double x) { return -std::sin(x); })};
    case Op::Ln: return {elementwise(args[0], [](double x) { return 1.0 / x; })};
    case Op::Exp: return {elementwise(args[0], [](double x) { return std::exp(x); })};
    case Op::Max0: return {elementwise(args[0], [](double x) { return x > 0.0 ? 1.0 : 0.0; })};
    case Op::Step: return {elementwise(args[0], [](double) { return 0.0; })};
    case Op::Expand: return {{Kind::Col, std::vector<double>(s.size(), 1.0)}};
    case Op::Sum: return {{Kind::Row, std::vector<double>(args[0].size(), 1.0)}};
    case Op::Dot: {
      auto row = [](const Value& v) { return std::vector<double>(v.data().begin(), v.data().end()); };
      return {{Kind::Row, row(args[1])}, {Kind::Row, row(args[0])}};
    }
    default: throw std::logic_error("no local partial for " + std::string(op_name(entry.op())));
  }
}

// Tangent of the output given the tangent of one operand.
Value push_forward(const LocalPartial& p, const Value& t) {
  switch (p.kind) {
    case Kind::Scalar: return p.values[0] * t.scalar();
    case Kind::Diagonal: {
      std::vector<double> out(p.values.size());
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = p.values[i] * t[i];
      return Value(std::move(out));
    }
    case Kind::Row: {
      double s = 0.0;
      for (std::size_t i = 0; i < p.values.size(); ++i) s += p.values[i] * t[i];
      return s;
    }
    case Kind::Col: {
      std::vector<double> out(p.values.size());
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = p.values[i] * t.scalar();
      return Value(std::move(out));
    }
  }
  return 0.0;
}

// Adjoint contribution to one operand given the adjoint of the output.
Value pull_back(const LocalPartial& p, const Value& a) {
  switch (p.kind) {
    case Kind::Scalar:
    case Kind::Diagonal: return push_forward(p, a);
    case Kind::Row: {
      std::vector<double> out(p.values.size());
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = p.values[i] * a.scalar();
      return Value(std::move(out));
    }
    case Kind::Col: {
      double s = 0.0;
      for (std::size_t i = 0; i < p.values.size(); ++i) s += p.values[i] * a[i];
      return s;
    }
  }
  return 0.0;
}

void accumulate(Value& dst, const Value& src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

Value leaf_tangent(const Expr& leaf, const Expr& seed) {
  Value zero = Value::zeros(leaf.shape());
  if (!leaf.is_var() || leaf.name() != seed.name()) return zero;
  if (!seed.is_component()) {
    if (leaf.is_component() || leaf.shape().is_vector()) {
      throw ShapeMismatch("forward-mode seed '" + seed.name() + "' must select one component");
    }
    return 1.0;
  }
  const std::size_t j = *seed.component();
  if (leaf.is_component()) return *leaf.component() == j ? 1.0 : 0.0;
  zero[j] = 1.0;
  return zero;
}

// Values and local partials of every entry.
void value_sweep(const Tape& tape, const Env& env, DerivRecord& rec) {
  if (tape.entries.empty()) throw Error("empty tape");
  for (std::size_t i = 0; i < tape.size(); ++i) {
    const TapeEntry& entry = tape.entries[i];
    try {
      if (entry.alias) {
        rec.values.push_back(eval(entry.node, env));
        rec.partials.push_back({filled(entry.shape(), 1.0)});
        continue;
      }
      std::vector<Value> args;
      for (const auto& op : entry.operands) {
        if (const auto* k = std::get_if<std::size_t>(&op)) {
          args.push_back(rec.values[*k]);
        } else {
          args.push_back(eval(std::get<Expr>(op), env));
        }
      }
      rec.values.push_back(detail::apply_op(entry.node, args));
      rec.partials.push_back(local_partials(entry, args));
    } catch (const DivisionByZero& err) {
      throw DivisionByZero(entry.id + ": " + err.what());
    } catch (const DomainError& err) {
      throw DomainError(entry.id + ": " + err.what());
    }
  }
}

// Short operator label for graph nodes.
std::string op_label(const TapeEntry& entry) {
  if (entry.alias) return pretty_print(entry.node);
  if (entry.op() == Op::Pow) {
    if (entry.node.exponent() == 2.0) return "sqr";
    return "^" + format_number(entry.node.exponent());
  }
  return std::string(op_name(entry.op()));
}

std::string operand_label(const Tape& tape, const Operand& op) {
  if (const auto* k = std::get_if<std::size_t>(&op)) return tape.entries[*k].id;
  return pretty_print(std::get<Expr>(op));
}

}  // namespace

Tape lower(const Expr& e) {
  Tape tape;
  const Expr s = simplify(e);
  if (s.children().empty()) {
    tape.entries.push_back({"u1", s, {s}, true});
    return tape;
  }
  emit(s, tape);
  return tape;
}

Expr rebuild(const Tape& tape) {
  std::vector<Expr> built;
  for (const auto& entry : tape.entries) {
    if (entry.alias) {
      built.push_back(entry.node);
      continue;
    }
    std::vector<Expr> kids;
    for (const auto& op : entry.operands) {
      if (const auto* k = std::get_if<std::size_t>(&op)) {
        kids.push_back(built.at(*k));
      } else {
        kids.push_back(std::get<Expr>(op));
      }
    }
    built.push_back(with_children(entry.node, std::move(kids)));
  }
  if (built.empty()) throw Error("empty tape");
  return built.back();
}

Expr entry_expr(const Tape& tape, std::size_t i) {
  return local_expr(tape, i, [&](std::size_t k) { return tape.entries[k].id; });
}

DerivRecord forward_mode(const Tape& tape, const Env& env, const Expr& seed) {
  if (!seed.is_var() || !seed.shape().is_scalar()) {
    throw ShapeMismatch("forward-mode seed must be a scalar variable or one element of a vector");
  }
  DerivRecord rec{Mode::Forward, {}, {}, {}};
  value_sweep(tape, env, rec);
  for (std::size_t i = 0; i < tape.size(); ++i) {
    const TapeEntry& entry = tape.entries[i];
    Value t = Value::zeros(entry.shape());
    for (std::size_t k = 0; k < entry.operands.size(); ++k) {
      const Operand& op = entry.operands[k];
      const std::size_t* idx = std::get_if<std::size_t>(&op);
      const Value in = idx ? rec.accumulated[*idx] : leaf_tangent(std::get<Expr>(op), seed);
      accumulate(t, push_forward(rec.partials[i][k], in));
    }
    rec.accumulated.push_back(std::move(t));
  }
  rec.tangent = rec.accumulated.back();
  return rec;
}

DerivRecord reverse_mode(const Tape& tape, const Env& env) {
  DerivRecord rec{Mode::Reverse, {}, {}, {}};
  value_sweep(tape, env, rec);
  if (!tape.result().shape().is_scalar()) throw ShapeMismatch("reverse mode needs a scalar result");
  for (const auto& entry : tape.entries) rec.accumulated.push_back(Value::zeros(entry.shape()));
  rec.accumulated.back() = 1.0;
  for (std::size_t i = tape.size(); i-- > 0;) {
    const TapeEntry& entry = tape.entries[i];
    for (std::size_t k = 0; k < entry.operands.size(); ++k) {
      const Value contrib = pull_back(rec.partials[i][k], rec.accumulated[i]);
      const Operand& op = entry.operands[k];
      if (const auto* idx = std::get_if<std::size_t>(&op)) {
        accumulate(rec.accumulated[*idx], contrib);
        continue;
      }
      const Expr& leaf = std::get<Expr>(op);
      if (!leaf.is_var()) continue;
      auto [it, inserted] = rec.adjoints.try_emplace(leaf.name(), Value::zeros(leaf.declared_shape()));
      if (leaf.is_component()) {
        it->second[*leaf.component()] += contrib.scalar();
      } else {
        accumulate(it->second, contrib);
      }
    }
  }
  return rec;
}

Expr symbolic_backsub(const Tape& tape, const Expr& v) {
  if (!v.is_var() || !v.shape().is_scalar()) {
    throw ShapeMismatch("symbolic_backsub needs a scalar variable or one element of a vector");
  }
  if (tape.entries.empty()) throw Error("empty tape");
  std::map<std::string, Expr> dirs;
  if (v.is_component()) {
    std::vector<double> basis(v.declared_shape().size(), 0.0);
    basis.at(*v.component()) = 1.0;
    dirs.emplace(v.name(), constant_vec(std::move(basis)));
  } else {
    dirs.emplace(v.name(), constant(1.0));
  }
  // Tangent of each u_i as the sum over operands of local partial times the
  // operand's tangent.
  std::vector<Expr> defs;
  for (std::size_t i = 0; i < tape.size(); ++i) {
    defs.push_back(local_expr(tape, i, internal_name));
    if (auto d = directional(defs.back(), dirs)) dirs.insert_or_assign(internal_name(i), simplify(*d));
  }
  auto it = dirs.find(internal_name(tape.size() - 1));
  const Shape& out = tape.result().shape();
  Expr result = it != dirs.end() ? it->second
                                 : (out.is_scalar() ? constant(0.0) : expand(constant(0.0), out.size()));
  for (std::size_t k = tape.size(); k-- > 0;) result = substitute(result, {{internal_name(k), defs[k]}});
  return simplify(result);
}

std::string render(const Tape& tape) {
  std::string out;
  for (std::size_t i = 0; i < tape.size(); ++i) {
    const TapeEntry& entry = tape.entries[i];
    const Expr rhs = entry_expr(tape, i);
    std::string line = entry.id + " = " + pretty_print(rhs);
    std::set<std::string> seen;
    for (const auto& op : entry.operands) {
      Expr wrt = constant(0.0);
      if (const auto* k = std::get_if<std::size_t>(&op)) {
        wrt = var(tape.entries[*k].id, tape.entries[*k].shape());
      } else if (std::get<Expr>(op).is_var()) {
        wrt = std::get<Expr>(op);
      } else {
        continue;
      }
      const std::string label = operand_label(tape, op);
      if (!seen.insert(label).second) continue;
      line += "   ∂" + entry.id + "/∂" + label + " = " + render(canonical(jacobian(rhs, wrt)));
    }
    out += line + "\n";
  }
  return out;
}

std::string to_dot(const Tape& tape) {
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') q += '\\';
      q += c;
    }
    return q + "\"";
  };
  std::string out = "digraph tape {\n  node [shape=box];\n";
  std::set<std::string> leaves;
  std::string edges;
  for (std::size_t i = 0; i < tape.size(); ++i) {
    const TapeEntry& entry = tape.entries[i];
    out += "  " + entry.id + " [label=" + quote(entry.id + " = " + op_label(entry)) + "];\n";
    if (entry.alias) {
      const std::string leaf = pretty_print(entry.node);
      if (leaves.insert(leaf).second) out += "  " + quote("leaf:" + leaf) + " [shape=ellipse, label=" + quote(leaf) + "];\n";
      edges += "  " + quote("leaf:" + leaf) + " -> " + entry.id + ";\n";
      continue;
    }
    for (const auto& op : entry.operands) {
      if (const auto* k = std::get_if<std::size_t>(&op)) {
        edges += "  " + tape.entries[*k].id + " -> " + entry.id + ";\n";
        continue;
      }
      const std::string leaf = pretty_print(std::get<Expr>(op));
      if (leaves.insert(leaf).second) out += "  " + quote("leaf:" + leaf) + " [shape=ellipse, label=" + quote(leaf) + "];\n";
      edges += "  " + quote("leaf:" + leaf) + " -> " + entry.id + ";\n";
    }
  }
  return out + edges + "}\n";
}

}  // namespace mcalc
