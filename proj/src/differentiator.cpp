#include "mcalc/differentiator.hpp"


namespace mcalc {

namespace {

using Tangent = std::optional<Expr>;

// Product that works for scalar*scalar, scalar*vector and vector*vector.
Expr times(const Expr& a, const Expr& b) {
  if (a.shape().is_vector() && b.shape().is_vector()) return hadamard(a, b);
  return mul(a, b);
}

Expr divide(const Expr& a, const Expr& b) {
  if (a.shape().is_vector() || b.shape().is_vector()) return hadamard_div(a, b);
  return quotient(a, b);
}

Tangent plus(Tangent a, Tangent b) {
  if (!a) return b;
  if (!b) return a;
  return add(*a, *b);
}

Tangent scaled(const Expr& factor, const Tangent& t) {
  if (!t) return std::nullopt;
  return times(factor, *t);
}

// Local derivative of a unary call at argument `u`.
Tangent unary_derivative(Op op, const Expr& u, double exponent) {
  switch (op) {
    case Op::Sin: return cos(u);
    case Op::Cos: return neg(sin(u));
    case Op::Ln: return pow(u, -1.0);
    case Op::Exp: return exp(u);
    case Op::Max0: return step(u);
    case Op::Step: return std::nullopt;
    case Op::Pow: return mul(constant(exponent), pow(u, exponent - 1.0));
    default: throw std::logic_error("no unary derivative");
  }
}

void require_variable(const Expr& v) {
  if (!v.is_var()) throw ShapeMismatch("differentiation variable must be a variable");
}

Expr zero_like(const Shape& s) { return s.is_scalar() ? constant(0.0) : expand(constant(0.0), s.size()); }

}  // namespace

std::optional<Expr> directional(const Expr& e, const std::map<std::string, Expr>& directions) {
  switch (e.op()) {
    case Op::Var: {
      auto it = directions.find(e.name());
      if (it == directions.end()) return std::nullopt;
      const Expr& dir = it->second;
      if (e.is_component()) {
        if (!(dir.shape() == e.declared_shape())) throw ShapeMismatch("direction for '" + e.name() + "' has the wrong shape");
        Expr c = simplify(components(dir).at(*e.component()));
        if (c.is_const(0.0)) return std::nullopt;
        return c;
      }
      if (!(dir.shape() == e.shape())) throw ShapeMismatch("direction for '" + e.name() + "' has the wrong shape");
      return dir;
    }
    case Op::Const:
    case Op::ConstVec:
      return std::nullopt;
    case Op::Add:
      return plus(directional(e.child(0), directions), directional(e.child(1), directions));
    case Op::Sub: {
      Tangent da = directional(e.child(0), directions);
      Tangent db = directional(e.child(1), directions);
      if (!db) return da;
      if (!da) return neg(*db);
      return sub(*da, *db);
    }
    case Op::Neg: {
      Tangent d = directional(e.child(0), directions);
      if (!d) return std::nullopt;
      return neg(*d);
    }
    case Op::Mul:
    case Op::Hadamard: {
      const Expr& a = e.child(0);
      const Expr& b = e.child(1);
      return plus(scaled(a, directional(b, directions)), scaled(b, directional(a, directions)));
    }
    case Op::HadamardDiv: {
      const Expr& a = e.child(0);
      const Expr& b = e.child(1);
      Tangent da = directional(a, directions);
      Tangent db = directional(b, directions);
      Tangent first = da ? Tangent(divide(*da, b)) : std::nullopt;
      if (!db) return first;
      Expr second = divide(times(a, *db), pow(b, 2.0));
      if (!first) return neg(second);
      return sub(*first, second);
    }
    case Op::Expand: {
      Tangent d = directional(e.child(0), directions);
      if (!d) return std::nullopt;
      return expand(*d, e.shape().size());
    }
    case Op::Sum: {
      Tangent d = directional(e.child(0), directions);
      if (!d) return std::nullopt;
      return sum(*d);
    }
    case Op::Dot: {
      const Expr& a = e.child(0);
      const Expr& b = e.child(1);
      Tangent da = directional(a, directions);
      Tangent db = directional(b, directions);
      return plus(da ? Tangent(dot(*da, b)) : std::nullopt, db ? Tangent(dot(a, *db)) : std::nullopt);
    }
    default: {
      const Expr& u = e.child(0);
      Tangent du = directional(u, directions);
      if (!du) return std::nullopt;
      Tangent local = unary_derivative(e.op(), u, e.op() == Op::Pow ? e.exponent() : 0.0);
      if (!local) return std::nullopt;
      return times(*local, *du);
    }
  }
}

std::optional<Expr> tangent(const Expr& e, const Expr& seed) {
  require_variable(seed);
  const std::size_t n = seed.declared_shape().size();
  Expr dir = constant(1.0);
  if (seed.is_component()) {
    std::vector<double> basis(n, 0.0);
    basis.at(*seed.component()) = 1.0;
    dir = constant_vec(std::move(basis));
  } else if (seed.shape().is_vector()) {
    dir = ones(n);
  }
  return directional(e, {{seed.name(), dir}});
}

Expr derive_scalar(const Expr& e, const Expr& v) {
  require_variable(v);
  if (!v.shape().is_scalar()) throw ShapeMismatch("derive_scalar needs a scalar variable");
  if (!e.shape().is_scalar()) throw ShapeMismatch("derive_scalar needs a scalar expression");
  Tangent d = tangent(components(e).front(), v);
  return d ? simplify(*d) : constant(0.0);
}

std::vector<Expr> input_components(std::span<const Expr> vars) {
  std::vector<Expr> out;
  for (const auto& v : vars) {
    require_variable(v);
    auto cs = components(v);
    out.insert(out.end(), cs.begin(), cs.end());
  }
  return out;
}

Jacobian gradient(const Expr& e, const Expr& v) { return gradient(e, std::span<const Expr>(&v, 1)); }

Jacobian gradient(const Expr& e, std::span<const Expr> vars) {
  if (!e.shape().is_scalar()) throw ShapeMismatch("gradient needs a scalar expression, got " + e.shape().to_string());
  std::vector<Expr> entries;
  for (const auto& x : input_components(vars)) entries.push_back(derive_scalar(e, x));
  const std::size_t n = entries.size();
  return Jacobian::from_grid(1, n, std::move(entries));
}

Jacobian dense_jacobian(const Expr& e, const Expr& v) {
  const auto outs = components(e);
  const auto ins = input_components(std::span<const Expr>(&v, 1));
  std::vector<Expr> grid;
  for (const auto& o : outs) {
    for (const auto& x : ins) grid.push_back(derive_scalar(o, x));
  }
  const std::size_t rows = outs.size();
  const std::size_t cols = ins.size();
  return Jacobian::from_grid(rows, cols, std::move(grid));
}

Jacobian jacobian(const Expr& e, const Expr& v) {
  require_variable(v);
  if (e.shape().is_scalar()) {
    if (v.shape().is_scalar()) return Jacobian::scalar(derive_scalar(e, v));
    return gradient(e, v);
  }
  if (v.shape().is_scalar()) return scalar_expansion_partials(e, v);
  if (auto diag = detect_diagonal(e, v)) return *diag;
  return dense_jacobian(e, v);
}

Jacobian jacobian(std::span<const Expr> outputs, std::span<const Expr> inputs) {
  std::vector<Expr> outs;
  for (const auto& o : outputs) {
    auto cs = components(o);
    outs.insert(outs.end(), cs.begin(), cs.end());
  }
  const auto ins = input_components(inputs);
  if (outs.empty() || ins.empty()) throw DimensionMismatch("jacobian needs at least one output and one input");
  std::vector<Expr> grid;
  for (const auto& o : outs) {
    for (const auto& x : ins) grid.push_back(derive_scalar(o, x));
  }
  const std::size_t rows = outs.size();
  const std::size_t cols = ins.size();
  return Jacobian::from_grid(rows, cols, std::move(grid));
}

bool is_elementwise_in(const Expr& e, const Expr& v) {
  require_variable(v);
  if (!v.shape().is_vector() || v.is_component()) return false;
  const std::size_t n = v.shape().size();
  if (!(e.shape() == v.shape())) return false;
  auto check = [&](auto&& self, const Expr& node) -> bool {
    if (!depends_on(node, v.name())) return true;
    if (node.shape() != v.shape()) return false;
    switch (node.op()) {
      case Op::Var:
        return !node.is_component() && node.shape().size() == n;
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
      case Op::Hadamard:
      case Op::HadamardDiv:
        return self(self, node.child(0)) && self(self, node.child(1));
      case Op::Expand:
      case Op::Sum:
      case Op::Dot:
        return false;
      default:
        return self(self, node.child(0));
    }
  };
  return check(check, e);
}

std::optional<Jacobian> detect_diagonal(const Expr& e, const Expr& v) {
  if (!is_elementwise_in(e, v)) return std::nullopt;
  Tangent t = tangent(e, v);
  Expr d = t ? simplify(*t) : zero_like(e.shape());
  std::vector<Expr> diag;
  for (const auto& c : components(d)) diag.push_back(simplify(c));
  return Jacobian::diagonal(std::move(diag));
}

Jacobian scalar_expansion_partials(const Expr& e, const Expr& z) {
  require_variable(z);
  if (!z.shape().is_scalar()) throw ShapeMismatch("scalar_expansion_partials needs a scalar variable");
  if (!e.shape().is_vector()) throw ShapeMismatch("scalar_expansion_partials needs a vector expression");
  Tangent t = tangent(e, z);
  Expr d = t ? simplify(*t) : zero_like(e.shape());
  std::vector<Expr> col;
  for (const auto& c : components(d)) col.push_back(simplify(c));
  return Jacobian::column(std::move(col));
}

Jacobian sum_reduction_grad(const Expr& e, const Expr& v) {
  if (e.op() != Op::Sum) throw ShapeMismatch("sum_reduction_grad needs sum(...)");
  const Expr& inner = e.child(0);
  Jacobian ones_row = Jacobian::row(std::vector<Expr>(inner.shape().size(), constant(1.0)));
  return vector_chain(ones_row, jacobian(inner, v));
}

Jacobian vector_chain(const Jacobian& outer_in, const Jacobian& inner_in) {
  const Jacobian outer = outer_in.layout() == Layout::Numerator ? outer_in : transpose_layout(outer_in);
  const Jacobian inner = inner_in.layout() == Layout::Numerator ? inner_in : transpose_layout(inner_in);
  if (outer.cols() != inner.rows()) {
    throw DimensionMismatch("cannot chain " + std::to_string(outer.rows()) + "x" + std::to_string(outer.cols()) +
                            " with " + std::to_string(inner.rows()) + "x" + std::to_string(inner.cols()));
  }
  if (outer.form() == JacobianForm::Diagonal && inner.form() == JacobianForm::Diagonal) {
    std::vector<Expr> diag;
    for (std::size_t i = 0; i < outer.rows(); ++i) diag.push_back(simplify(mul(outer.at(i, i), inner.at(i, i))));
    return Jacobian::diagonal(std::move(diag));
  }
  const std::size_t m = outer.rows();
  const std::size_t k = outer.cols();
  const std::size_t n = inner.cols();
  std::vector<Expr> grid;
  grid.reserve(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Tangent acc;
      for (std::size_t l = 0; l < k; ++l) {
        Expr a = outer.at(i, l);
        Expr b = inner.at(l, j);
        if (a.is_const(0.0) || b.is_const(0.0)) continue;
        acc = plus(acc, simplify(mul(a, b)));
      }
      grid.push_back(acc ? simplify(*acc) : constant(0.0));
    }
  }
  return Jacobian::from_grid(m, n, std::move(grid));
}

Expr total_derivative(const Expr& f, const Expr& x, std::span<const Binding> intermediates) {
  require_variable(x);
  if (!x.shape().is_scalar()) throw ShapeMismatch("total_derivative needs a scalar variable");
  for (std::size_t i = 0; i < intermediates.size(); ++i) {
    for (std::size_t j = i; j < intermediates.size(); ++j) {
      if (depends_on(intermediates[i].definition, intermediates[j].name)) {
        throw CyclicDefinition("'" + intermediates[i].name + "' refers to '" + intermediates[j].name +
                               "', which is not defined before it");
      }
    }
    if (!intermediates[i].definition.shape().is_scalar()) {
      throw ShapeMismatch("intermediate '" + intermediates[i].name + "' must be scalar");
    }
  }
  // Forward accumulation: du_i/dx = ∂u_i/∂x + Σ_{j<i} ∂u_i/∂u_j du_j/dx.
  auto total = [&](const Expr& g, const std::vector<Expr>& known) {
    Expr acc = derive_scalar(g, x);
    for (std::size_t j = 0; j < known.size(); ++j) {
      Expr partial = derive_scalar(g, var(intermediates[j].name));
      if (partial.is_const(0.0) || known[j].is_const(0.0)) continue;
      acc = simplify(add(acc, mul(partial, known[j])));
    }
    return acc;
  };
  std::vector<Expr> d;
  for (const auto& b : intermediates) d.push_back(total(b.definition, d));
  Expr result = total(f, d);
  for (std::size_t i = intermediates.size(); i-- > 0;) {
    result = substitute(result, {{intermediates[i].name, intermediates[i].definition}});
  }
  return simplify(result);
}

}  // namespace mcalc
