#include "mcalc/evaluator.hpp"

#include <cstdio>

#include "mcalc/differentiator.hpp"
#include "numeric.hpp"

namespace mcalc {

Value eval(const Expr& e, const Env& env, KinkProbe* probe) {
  switch (e.op()) {
    case Op::Var: {
      const Value& v = env.at(e.name());
      if (!(v.shape() == e.declared_shape())) {
        throw ShapeMismatch("variable '" + e.name() + "' is " + e.declared_shape().to_string() + " but bound to " +
                            v.shape().to_string());
      }
      if (e.is_component()) return v[*e.component()];
      return v;
    }
    case Op::Const:
      return e.value();
    case Op::ConstVec:
      return Value(std::vector<double>(e.values().begin(), e.values().end()));
    default:
      break;
  }
  std::vector<Value> args;
  args.reserve(e.children().size());
  for (const auto& c : e.children()) args.push_back(eval(c, env, probe));
  if (probe && (e.op() == Op::Max0 || e.op() == Op::Step)) {
    for (double z : args[0].data()) probe->observe(z);
  }
  return detail::apply_op(e, args);
}

Grid eval_jacobian(const Jacobian& j, const Env& env) {
  Grid g(j.rows(), j.cols());
  for (std::size_t r = 0; r < j.rows(); ++r) {
    for (std::size_t c = 0; c < j.cols(); ++c) {
      if (j.form() == JacobianForm::Diagonal && r != c) continue;
      g(r, c) = eval(j.at(r, c), env).scalar();
    }
  }
  return g;
}

namespace {

// Location of one scalar input inside the environment.
struct Slot {
  std::string name;
  std::optional<std::size_t> index;
};

std::vector<Slot> slots_of(std::span<const Expr> wrt) {
  std::vector<Slot> out;
  for (const auto& leaf : input_components(wrt)) out.push_back({leaf.name(), leaf.component()});
  return out;
}

double& slot_ref(Env& env, const Slot& s) {
  Value& v = env.at(s.name);
  if (s.index) {
    if (v.is_scalar() || *s.index >= v.size()) throw ShapeMismatch("binding of '" + s.name + "' has the wrong shape");
    return v[*s.index];
  }
  if (!v.is_scalar()) throw ShapeMismatch("binding of '" + s.name + "' has the wrong shape");
  return v[0];
}

}  // namespace

FiniteDiff finite_diff(const Expr& e, std::span<const Expr> wrt, const Env& env, std::optional<double> h) {
  if (h && !(*h > 0.0)) throw DomainError("finite difference step must be positive");
  const auto slots = slots_of(wrt);
  const std::size_t m = e.shape().size();
  FiniteDiff out{Grid(m, slots.size()), std::vector<bool>(slots.size(), false), {}};
  Env probe_env = env;
  for (std::size_t j = 0; j < slots.size(); ++j) {
    double& x = slot_ref(probe_env, slots[j]);
    const double x0 = x;
    const double step = h ? *h : 1e-6 * std::max(1.0, std::abs(x0));
    KinkProbe kinks;
    auto probe = [&](double at) {
      x = at;
      try {
        return eval(e, probe_env, &kinks);
      } catch (const DivisionByZero& err) {
        throw DivisionByZero("finite difference in column " + std::to_string(j) + ": " + err.what());
      } catch (const DomainError& err) {
        throw DomainError("finite difference in column " + std::to_string(j) + ": " + err.what());
      }
    };
    const Value plus = probe(x0 + step);
    const Value minus = probe(x0 - step);
    x = x0;
    for (std::size_t i = 0; i < m; ++i) out.estimate(i, j) = (plus[i] - minus[i]) / (2.0 * step);
    out.near_kink[j] = kinks.min_distance <= 10.0 * step;
    out.steps.push_back(step);
  }
  return out;
}

FiniteDiff finite_diff(const Expr& e, const Expr& v, const Env& env, std::optional<double> h) {
  return finite_diff(e, std::span<const Expr>(&v, 1), env, h);
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::PassWithSkips: return "pass-with-skips";
    case Verdict::Fail: return "fail";
  }
  return "?";
}

CheckReport check(const Jacobian& symbolic, const Expr& e, std::span<const Expr> wrt, const Env& env,
                  const CheckOptions& options) {
  const FiniteDiff fd = finite_diff(e, wrt, env, options.h);
  if (symbolic.rows() != fd.estimate.rows() || symbolic.cols() != fd.estimate.cols()) {
    throw DimensionMismatch("symbolic Jacobian is " + std::to_string(symbolic.rows()) + "x" +
                            std::to_string(symbolic.cols()) + " but the expression has " +
                            std::to_string(fd.estimate.rows()) + "x" + std::to_string(fd.estimate.cols()) +
                            " partials");
  }
  CheckReport report;
  report.form = symbolic.form();
  report.tol_abs = options.tol_abs;
  report.tol_rel = options.tol_rel;
  bool failed = false;
  for (std::size_t i = 0; i < symbolic.rows(); ++i) {
    for (std::size_t j = 0; j < symbolic.cols(); ++j) {
      const std::string where = "entry (" + std::to_string(i) + ", " + std::to_string(j) + "): ";
      double s = 0.0;
      try {
        s = eval(symbolic.at(i, j), env).scalar();
      } catch (const DivisionByZero& err) {
        throw DivisionByZero(where + err.what());
      } catch (const DomainError& err) {
        throw DomainError(where + err.what());
      }
      const double n = fd.estimate(i, j);
      const double abs_err = std::abs(s - n);
      const double scale = std::max(std::abs(s), std::abs(n));
      const double rel_err = scale > 0.0 ? abs_err / scale : 0.0;
      const bool skipped = fd.near_kink[j];
      report.entries.push_back({i, j, s, n, abs_err, rel_err, skipped});
      if (skipped) {
        report.skipped.push_back(report.entries.size() - 1);
        continue;
      }
      report.max_abs_err = std::max(report.max_abs_err, abs_err);
      report.max_rel_err = std::max(report.max_rel_err, rel_err);
      // NaN errors fail both comparisons.
      if (!(abs_err <= options.tol_abs || rel_err <= options.tol_rel)) failed = true;
    }
  }
  report.verdict = failed ? Verdict::Fail : (report.skipped.empty() ? Verdict::Pass : Verdict::PassWithSkips);
  return report;
}

CheckReport check(const Expr& e, std::span<const Expr> wrt, const Env& env, const CheckOptions& options) {
  if (wrt.size() == 1) return check(jacobian(e, wrt[0]), e, wrt, env, options);
  return check(jacobian(std::span<const Expr>(&e, 1), wrt), e, wrt, env, options);
}

CheckReport check(const Expr& e, const Expr& v, const Env& env, const CheckOptions& options) {
  return check(e, std::span<const Expr>(&v, 1), env, options);
}

std::string render(const CheckReport& report) {
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return std::string(buf);
  };
  std::vector<std::vector<std::string>> rows = {{"entry", "symbolic", "numeric", "abs_err", "rel_err", ""}};
  for (const auto& e : report.entries) {
    rows.push_back({"(" + std::to_string(e.row) + "," + std::to_string(e.col) + ")", num(e.symbolic), num(e.numeric),
                    num(e.abs_err), num(e.rel_err), e.skipped ? "skipped (near kink)" : ""});
  }
  std::vector<std::size_t> width(rows[0].size(), 0);
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  std::string out;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t c = 0; c < r.size(); ++c) {
      line += r[c];
      if (c + 1 < r.size()) line += std::string(width[c] - r[c].size() + 2, ' ');
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  out += "max_abs_err " + num(report.max_abs_err) + "  max_rel_err " + num(report.max_rel_err) + "  skipped " +
         std::to_string(report.skipped.size()) + "  representation " + std::string(form_name(report.form)) +
         "  verdict " + std::string(verdict_name(report.verdict)) + "\n";
  return out;
}

}  // namespace mcalc
