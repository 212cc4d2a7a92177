#include "mcalc/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "numeric.hpp"

namespace mcalc {

int compare(const Expr& a, const Expr& b) {
  auto cmp = [](const auto& x, const auto& y) { return x < y ? -1 : (y < x ? 1 : 0); };
  if (int c = cmp(static_cast<int>(a.op()), static_cast<int>(b.op()))) return c;
  if (int c = cmp(a.shape().size(), b.shape().size())) return c;
  switch (a.op()) {
    case Op::Var:
      if (int c = a.name().compare(b.name())) return c < 0 ? -1 : 1;
      if (int c = cmp(a.component().value_or(0) + a.component().has_value(),
                      b.component().value_or(0) + b.component().has_value())) {
        return c;
      }
      return cmp(a.declared_shape().size(), b.declared_shape().size());
    case Op::Const:
      return cmp(a.value(), b.value());
    case Op::ConstVec: {
      const auto va = a.values();
      const auto vb = b.values();
      for (std::size_t i = 0; i < std::min(va.size(), vb.size()); ++i) {
        if (int c = cmp(va[i], vb[i])) return c;
      }
      return cmp(va.size(), vb.size());
    }
    case Op::Pow:
      if (int c = cmp(a.exponent(), b.exponent())) return c;
      break;
    default:
      break;
  }
  const auto ka = a.children();
  const auto kb = b.children();
  for (std::size_t i = 0; i < std::min(ka.size(), kb.size()); ++i) {
    if (int c = compare(ka[i], kb[i])) return c;
  }
  return cmp(ka.size(), kb.size());
}

namespace {

struct Factor {
  Expr base;
  double exp;
};

struct Term {
  double coef;
  std::vector<Factor> factors;  // product order, unique bases
};

using Poly = std::vector<Term>;

int base_rank(const Expr& b) {
  if (b.is_const()) return -1;
  if (b.is_var()) return 0;
  if (is_unary_call(b.op())) return 1;
  return 2;
}

long component_key(const Expr& v) { return v.component() ? static_cast<long>(*v.component()) : -1; }

// Ordering of bases; `descending_names` flips the variable ordering, which is
// how products list their variables.
int compare_bases(const Expr& a, const Expr& b, bool descending_names) {
  const int ra = base_rank(a);
  const int rb = base_rank(b);
  if (ra != rb) return ra < rb ? -1 : 1;
  if (ra == 0) {
    int c = a.name().compare(b.name());
    if (c == 0) c = component_key(a) < component_key(b) ? -1 : (component_key(a) > component_key(b) ? 1 : 0);
    if (c == 0) return compare(a, b);
    c = c < 0 ? -1 : 1;
    return descending_names ? -c : c;
  }
  if (ra == 1 && a.op() != b.op()) return op_name(a.op()) < op_name(b.op()) ? -1 : 1;
  return compare(a, b);
}

bool product_less(const Factor& a, const Factor& b) {
  const bool na = a.exp < 0;
  const bool nb = b.exp < 0;
  if (na != nb) return nb;
  return compare_bases(a.base, b.base, true) < 0;
}

// Collapse equal bases and order factors for display.
std::vector<Factor> normalize(std::vector<Factor> fs) {
  std::sort(fs.begin(), fs.end(), [](const Factor& a, const Factor& b) { return compare(a.base, b.base) < 0; });
  std::vector<Factor> out;
  for (auto& f : fs) {
    if (!out.empty() && compare(out.back().base, f.base) == 0) {
      out.back().exp += f.exp;
    } else {
      out.push_back(std::move(f));
    }
  }
  std::erase_if(out, [](const Factor& f) { return f.exp == 0.0; });
  std::sort(out.begin(), out.end(), product_less);
  return out;
}

// Ordering of terms inside a sum: constants first, then by ascending
// variable names and exponents.
int compare_monomials(const Term& a, const Term& b) {
  auto key = [](const Term& t) {
    std::vector<Factor> k = t.factors;
    std::sort(k.begin(), k.end(), [](const Factor& x, const Factor& y) {
      int c = compare_bases(x.base, y.base, false);
      return c != 0 ? c < 0 : x.exp < y.exp;
    });
    return k;
  };
  const auto ka = key(a);
  const auto kb = key(b);
  for (std::size_t i = 0; i < std::min(ka.size(), kb.size()); ++i) {
    if (int c = compare_bases(ka[i].base, kb[i].base, false)) return c;
    if (ka[i].exp != kb[i].exp) return ka[i].exp < kb[i].exp ? -1 : 1;
  }
  return ka.size() < kb.size() ? -1 : (ka.size() > kb.size() ? 1 : 0);
}

Poly merge(Poly p) {
  std::stable_sort(p.begin(), p.end(), [](const Term& a, const Term& b) { return compare_monomials(a, b) < 0; });
  Poly out;
  for (auto& t : p) {
    if (!out.empty() && compare_monomials(out.back(), t) == 0) {
      out.back().coef += t.coef;
    } else {
      out.push_back(std::move(t));
    }
  }
  std::erase_if(out, [](const Term& t) { return t.coef == 0.0; });
  return out;
}

Poly negate(Poly p) {
  for (auto& t : p) t.coef = -t.coef;
  return p;
}

Poly scale(Poly p, double c) {
  if (c == 0.0) return {};
  for (auto& t : p) t.coef *= c;
  return p;
}

bool is_integer(double p) { return std::trunc(p) == p; }

Poly canon(const Expr& e);

Expr factor_expr(const Factor& f) { return f.exp == 1.0 ? f.base : pow(f.base, f.exp); }

Expr term_expr(double c, const std::vector<Factor>& fs) {
  if (fs.empty()) return constant(c);
  Expr acc = factor_expr(fs[0]);
  if (c == -1.0) acc = neg(acc);
  else if (c != 1.0) acc = mul(constant(c), acc);
  for (std::size_t i = 1; i < fs.size(); ++i) acc = mul(acc, factor_expr(fs[i]));
  return acc;
}

Expr to_expr(const Poly& p) {
  if (p.empty()) return constant(0.0);
  Expr acc = term_expr(p[0].coef, p[0].factors);
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (p[i].coef < 0) {
      acc = sub(acc, term_expr(-p[i].coef, p[i].factors));
    } else {
      acc = add(acc, term_expr(p[i].coef, p[i].factors));
    }
  }
  return acc;
}

// A single term, turning a genuine sum into an opaque base.
Term as_term(const Poly& p) {
  if (p.size() == 1) return p[0];
  return Term{1.0, {Factor{to_expr(p), 1.0}}};
}

// Back to a polynomial; a plain multiple of an opaque sum is distributed.
Poly lift(Term t) {
  if (t.coef == 0.0) return {};
  if (t.factors.size() == 1 && t.factors[0].exp == 1.0 && base_rank(t.factors[0].base) == 2) {
    return scale(canon(t.factors[0].base), t.coef);
  }
  return {std::move(t)};
}

Poly product(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Term ta = as_term(a);
  Term tb = as_term(b);
  std::vector<Factor> fs = ta.factors;
  fs.insert(fs.end(), tb.factors.begin(), tb.factors.end());
  return lift(Term{ta.coef * tb.coef, normalize(std::move(fs))});
}

Poly constant_poly(double c) {
  if (c == 0.0) return {};
  return {Term{c, {}}};
}

Poly opaque_power(const Expr& base, double p) { return lift(Term{1.0, {Factor{base, p}}}); }

Poly power(const Poly& a, double p) {
  if (p == 0.0) return constant_poly(1.0);
  if (a.empty()) return p > 0 ? Poly{} : opaque_power(constant(0.0), p);
  if (a.size() > 1) return opaque_power(to_expr(a), p);
  const Term& t = a[0];
  if (t.factors.empty()) {
    try {
      double v = detail::apply_unary(Op::Pow, t.coef, p);
      if (std::isfinite(v)) return constant_poly(v);
    } catch (const DomainError&) {
    }
    return opaque_power(constant(t.coef), p);
  }
  const bool all_linear = std::all_of(t.factors.begin(), t.factors.end(), [](const Factor& f) { return f.exp == 1.0; });
  if (is_integer(p) || (t.coef > 0 && all_linear)) {
    const double c = std::pow(t.coef, p);
    if (std::isfinite(c)) {
      std::vector<Factor> fs = t.factors;
      for (auto& f : fs) f.exp *= p;
      return lift(Term{c, normalize(std::move(fs))});
    }
  }
  return opaque_power(to_expr(a), p);
}

Poly call(Op op, const Poly& arg) {
  Expr a = to_expr(arg);
  if (a.is_const()) {
    try {
      double v = detail::apply_unary(op, a.value());
      if (std::isfinite(v)) return constant_poly(v);
    } catch (const DomainError&) {
    }
  }
  return {Term{1.0, {Factor{build(op, {a}), 1.0}}}};
}

Poly canon(const Expr& e) {
  switch (e.op()) {
    case Op::Const: return constant_poly(e.value());
    case Op::Var: return {Term{1.0, {Factor{e, 1.0}}}};
    case Op::Add: {
      Poly p = canon(e.child(0));
      Poly q = canon(e.child(1));
      p.insert(p.end(), q.begin(), q.end());
      return merge(std::move(p));
    }
    case Op::Sub: {
      Poly p = canon(e.child(0));
      Poly q = negate(canon(e.child(1)));
      p.insert(p.end(), q.begin(), q.end());
      return merge(std::move(p));
    }
    case Op::Neg: return negate(canon(e.child(0)));
    case Op::Mul:
    case Op::Hadamard: return product(canon(e.child(0)), canon(e.child(1)));
    case Op::HadamardDiv: return product(canon(e.child(0)), power(canon(e.child(1)), -1.0));
    case Op::Pow: return power(canon(e.child(0)), e.exponent());
    default:
      if (is_unary_call(e.op())) return call(e.op(), canon(e.child(0)));
      throw std::logic_error("canonical: unexpected vector node " + std::string(op_name(e.op())));
  }
}

}  // namespace

Expr canonical(const Expr& e) {
  if (e.shape().is_scalar()) return to_expr(canon(components(e).front()));
  if (e.children().empty()) return e;
  std::vector<Expr> kids;
  for (const auto& c : e.children()) kids.push_back(canonical(c));
  return simplify(with_children(e, std::move(kids)));
}

Jacobian canonical(const Jacobian& j) {
  return j.map([](const Expr& e) { return canonical(e); });
}

bool canonically_equal(const Expr& a, const Expr& b) { return canonical(a) == canonical(b); }

}  // namespace mcalc
