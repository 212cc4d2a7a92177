// mcalc: command-line front end.
//
// Exit status: 0 on success or a passing check, 1 on a failing check or a
// diverged training run, 2 on usage, parse, shape or I/O errors.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mcalc/canonical.hpp"
#include "mcalc/differentiator.hpp"
#include "mcalc/evaluator.hpp"
#include "mcalc/neuron.hpp"
#include "mcalc/parser.hpp"
#include "mcalc/tape.hpp"

using namespace mcalc;

namespace {

struct Options {
  std::vector<std::string> expressions;
  std::vector<std::string> vecs;
  std::vector<std::string> binds;
  std::string wrt;
  std::optional<double> h;
  double tol_abs = 1e-7;
  double tol_rel = 1e-4;
  double eta = 0.05;
  int epochs = 200;
  std::uint64_t seed = 42;
  bool fold_bias = false;
  double init_bias = 0.01;
  std::string data;
  std::string output;
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string num(const Value& v) {
  if (v.is_scalar()) return num(v.scalar());
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
  return s + "]";
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& text, const std::string& context) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError("bad number '" + text + "' in " + context);
}

// Declarations from --vec, then vector bindings not declared explicitly.
struct Context {
  Declarations decls;
  Env env;
};

Context context(const Options& o) {
  Context c;
  for (const auto& v : o.vecs) {
    auto colon = v.find(':');
    if (colon == std::string::npos) throw UsageError("--vec expects name:n, got '" + v + "'");
    const std::string name = v.substr(0, colon);
    const double n = parse_double(v.substr(colon + 1), "--vec " + v);
    if (n < 1 || n != static_cast<double>(static_cast<std::size_t>(n))) {
      throw UsageError("--vec length must be a positive integer");
    }
    c.decls[name] = Shape::vector(static_cast<std::size_t>(n));
  }
  for (const auto& b : o.binds) {
    auto eq = b.find('=');
    if (eq == std::string::npos) throw UsageError("--bind expects name=value, got '" + b + "'");
    const std::string name = b.substr(0, eq);
    std::string text = b.substr(eq + 1);
    Value value = 0.0;
    if (!text.empty() && text.front() == '[') {
      if (text.back() != ']') throw UsageError("unterminated vector in --bind " + b);
      std::vector<double> xs;
      for (const auto& part : split(text.substr(1, text.size() - 2), ',')) xs.push_back(parse_double(part, "--bind " + b));
      if (xs.empty()) throw UsageError("empty vector in --bind " + b);
      value = Value(std::move(xs));
    } else {
      value = parse_double(text, "--bind " + b);
    }
    auto declared = c.decls.find(name);
    if (declared != c.decls.end() && !(declared->second == value.shape())) {
      throw ShapeMismatch("'" + name + "' is declared " + declared->second.to_string() + " but bound to " +
                          value.shape().to_string());
    }
    if (value.shape().is_vector()) c.decls[name] = value.shape();
    c.env.bind(name, value);
  }
  return c;
}

Expr parse_one(const Options& o, const Context& c) {
  if (o.expressions.size() != 1) throw UsageError("expected exactly one expression");
  return parse(o.expressions.front(), c.decls);
}

// Differentiation variables from --wrt, or the single free variable.
std::vector<Expr> wrt_vars(const Options& o, const Context& c, std::span<const Expr> exprs) {
  std::map<std::string, Shape> free;
  for (const auto& e : exprs) {
    for (const auto& [name, shape] : free_vars(e)) free.emplace(name, shape);
  }
  std::vector<std::string> names = split(o.wrt, ',');
  if (names.empty()) {
    if (free.size() != 1) throw UsageError("--wrt is required when the expression has " + std::to_string(free.size()) + " variables");
    names.push_back(free.begin()->first);
  }
  std::vector<Expr> out;
  for (const auto& name : names) {
    Expr v = parse(name, c.decls);
    if (!v.is_var()) throw UsageError("--wrt expects variable names, got '" + name + "'");
    if (!free.count(v.name()) && !c.decls.count(v.name())) {
      throw UsageError("'" + name + "' is not a variable of the expression");
    }
    out.push_back(v);
  }
  return out;
}

int cmd_diff(const Options& o) {
  const Context c = context(o);
  const Expr e = parse_one(o, c);
  const auto vars = wrt_vars(o, c, std::span<const Expr>(&e, 1));
  if (vars.size() != 1) throw UsageError("diff takes one variable; use grad or jacobian for several");
  std::cout << render(canonical(jacobian(e, vars.front()))) << "\n";
  return 0;
}

int cmd_grad(const Options& o) {
  const Context c = context(o);
  const Expr e = parse_one(o, c);
  const auto vars = wrt_vars(o, c, std::span<const Expr>(&e, 1));
  std::cout << render(canonical(gradient(e, vars))) << "\n";
  return 0;
}

int cmd_jacobian(const Options& o) {
  const Context c = context(o);
  if (o.expressions.empty()) throw UsageError("expected an expression");
  std::vector<Expr> outs;
  for (const auto& text : o.expressions) outs.push_back(parse(text, c.decls));
  const auto vars = wrt_vars(o, c, outs);
  const Jacobian j = outs.size() == 1 && vars.size() == 1 ? jacobian(outs.front(), vars.front()) : jacobian(outs, vars);
  std::cout << render(canonical(j)) << "\n";
  return 0;
}

int cmd_eval(const Options& o) {
  const Context c = context(o);
  std::cout << num(eval(parse_one(o, c), c.env)) << "\n";
  return 0;
}

int cmd_check(const Options& o) {
  const Context c = context(o);
  const Expr e = parse_one(o, c);
  const auto vars = wrt_vars(o, c, std::span<const Expr>(&e, 1));
  const CheckReport report = check(e, vars, c.env, {o.tol_abs, o.tol_rel, o.h});
  std::cout << render(report);
  return report.passed() ? 0 : 1;
}

int cmd_tape(const Options& o) {
  const Context c = context(o);
  std::cout << render(lower(parse_one(o, c)));
  return 0;
}

int cmd_dot(const Options& o) {
  const Context c = context(o);
  const std::string graph = to_dot(lower(parse_one(o, c)));
  if (o.output.empty()) {
    std::cout << graph;
    return 0;
  }
  std::ofstream out(o.output);
  if (!out || !(out << graph)) throw Error("cannot write '" + o.output + "'");
  return 0;
}

int cmd_train(const Options& o) {
  const Dataset d = o.data.empty() ? fixture(o.seed) : load_csv(o.data);
  TrainConfig cfg{o.eta, o.epochs, o.seed, o.fold_bias, o.init_bias};
  const TrainResult r = train(d, cfg);
  for (std::size_t k = 0; k < r.trace.size(); ++k) std::cout << "epoch " << k + 1 << " loss " << num(r.trace[k]) << "\n";
  std::cout << "w = " << num(Value(r.model.w)) << " b = " << num(r.model.b) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbolic matrix calculus and automatic differentiation"};
  app.require_subcommand(1);
  Options o;

  auto add_expr = [&](CLI::App* sub, bool many = false) {
    if (many) {
      sub->add_option("expr", o.expressions, "Expressions (stacked into one Jacobian)")->required();
    } else {
      sub->add_option("expr", o.expressions, "Expression")->required()->expected(1);
    }
    sub->add_option("--vec", o.vecs, "Declare a vector variable, name:n");
  };
  auto add_wrt = [&](CLI::App* sub) { sub->add_option("--wrt", o.wrt, "Variables, comma separated"); };
  auto add_bind = [&](CLI::App* sub) { sub->add_option("--bind", o.binds, "name=value or name=[v1,...,vn]"); };

  CLI::App* diff = app.add_subcommand("diff", "Derivative with respect to one variable");
  add_expr(diff);
  add_wrt(diff);
  CLI::App* grad = app.add_subcommand("grad", "Gradient of a scalar expression");
  add_expr(grad);
  add_wrt(grad);
  CLI::App* jac = app.add_subcommand("jacobian", "Jacobian in numerator layout");
  add_expr(jac, true);
  add_wrt(jac);
  CLI::App* ev = app.add_subcommand("eval", "Evaluate an expression");
  add_expr(ev);
  add_bind(ev);
  CLI::App* chk = app.add_subcommand("check", "Compare the symbolic Jacobian with finite differences");
  add_expr(chk);
  add_wrt(chk);
  add_bind(chk);
  chk->set_help_flag("--help", "Print this help message and exit");
  chk->add_option("--h", o.h, "Finite-difference step (default 1e-6 * max(1, |v|))");
  chk->add_option("--tol-abs", o.tol_abs, "Absolute tolerance")->capture_default_str();
  chk->add_option("--tol-rel", o.tol_rel, "Relative tolerance")->capture_default_str();
  CLI::App* tp = app.add_subcommand("tape", "Intermediate variables with local partials");
  add_expr(tp);
  CLI::App* dt = app.add_subcommand("dot", "Graphviz DOT of the tape");
  add_expr(dt);
  dt->add_option("-o,--output", o.output, "Output file (default: standard output)");
  CLI::App* tr = app.add_subcommand("train", "Train a single ReLU neuron");
  tr->add_option("--data", o.data, "CSV with header x1,...,xn,y");
  tr->add_option("--seed", o.seed, "Seed for the built-in fixture")->capture_default_str();
  tr->add_option("--eta", o.eta, "Learning rate")->capture_default_str();
  tr->add_option("--epochs", o.epochs, "Number of full-batch steps")->capture_default_str();
  tr->add_flag("--fold-bias", o.fold_bias, "Train the bias as an extra weight");
  tr->add_option("--init-bias", o.init_bias, "Starting bias")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "diff") return cmd_diff(o);
    if (name == "grad") return cmd_grad(o);
    if (name == "jacobian") return cmd_jacobian(o);
    if (name == "eval") return cmd_eval(o);
    if (name == "check") return cmd_check(o);
    if (name == "tape") return cmd_tape(o);
    if (name == "dot") return cmd_dot(o);
    if (name == "train") return cmd_train(o);
  } catch (const Diverged& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
