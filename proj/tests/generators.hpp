#pragma once

// Random expressions and environments for the property suites.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "mcalc/env.hpp"
#include "mcalc/expr.hpp"
#include "mcalc/parser.hpp"

namespace gen {

struct Options {
  std::vector<std::string> scalars = {"x", "y", "z"};
  std::vector<std::string> vectors = {"u", "v"};
  std::size_t length = 3;
  /// Keep every operator inside its domain for any real inputs: ln, division
  /// and non-integer powers see arguments of the form a^2 + 1, exp sees sin(a).
  bool safe = false;
  /// Allow max0 and step.
  bool kinks = true;
};

inline mcalc::Declarations declarations(const Options& o) {
  mcalc::Declarations d;
  for (const auto& v : o.vectors) d[v] = mcalc::Shape::vector(o.length);
  return d;
}

class Generator {
 public:
  Generator(std::uint64_t seed, Options options = {}) : rng_(seed), o_(std::move(options)) {}

  std::mt19937_64& rng() { return rng_; }
  const Options& options() const { return o_; }

  /// Scalar expression whose tree depth stays within `budget` + 1 (the
  /// extra level is an implicit Expand).
  mcalc::Expr scalar(int budget) {
    using namespace mcalc;
    if (budget <= 1 || pick(4) == 0) return scalar_leaf();
    const int d = budget - 1;
    switch (pick(o_.vectors.empty() ? 11 : 13)) {
      case 0: return add(scalar(d), scalar(d));
      case 1: return sub(scalar(d), scalar(d));
      case 2: return mul(scalar(d), scalar(d));
      case 3: return neg(scalar(d));
      case 4: return sin(scalar(d));
      case 5: return cos(scalar(d));
      case 6: return log_of(scalar(d - 1));
      case 7: return exp_of(scalar(d - 1));
      case 8: return power(scalar(d - 1));
      case 9: return o_.kinks ? max0(scalar(d)) : add(scalar(d), scalar(d));
      case 10: return o_.kinks && pick(3) == 0 ? step(scalar(d)) : mul(scalar(d), scalar(d));
      case 11: return sum(vector(d));
      default: return dot(vector(d), vector(d));
    }
  }

  mcalc::Expr vector(int budget) {
    using namespace mcalc;
    if (budget <= 1 || pick(4) == 0) return vector_leaf();
    const int d = budget - 1;
    switch (pick(11)) {
      case 0: return add(vector(d), pick(3) ? vector(d) : scalar(d - 1));
      case 1: return sub(pick(3) ? vector(d) : scalar(d - 1), vector(d));
      case 2: return mul(scalar(d - 1), vector(d));
      case 3: return hadamard(vector(d), vector(d));
      case 4: return divide(vector(d), vector(d - 2));
      case 5: return neg(vector(d));
      case 6: return sin(vector(d));
      case 7: return cos(vector(d));
      case 8: return power(vector(d - 1));
      case 9: return o_.kinks ? max0(vector(d)) : exp_of(vector(d - 1));
      default: return log_of(vector(d - 1));
    }
  }

  /// Either kind, with a random vector/scalar split.
  mcalc::Expr any(int budget) { return !o_.vectors.empty() && pick(2) ? vector(budget) : scalar(budget); }

  /// Bindings for every variable in the options, uniform in [lo, hi].
  mcalc::Env env(double lo = -2.0, double hi = 2.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    mcalc::Env e;
    for (const auto& s : o_.scalars) e.bind(s, dist(rng_));
    for (const auto& v : o_.vectors) {
      std::vector<double> xs(o_.length);
      for (double& x : xs) x = dist(rng_);
      e.bind(v, mcalc::Value(std::move(xs)));
    }
    return e;
  }

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

 private:
  mcalc::Expr scalar_leaf() {
    using namespace mcalc;
    const std::size_t k = pick(6);
    if (k < 2) return constant(kConstants[pick(std::size(kConstants))]);
    if (k == 2 && !o_.vectors.empty()) {
      return element(o_.vectors[pick(o_.vectors.size())], pick(o_.length), o_.length);
    }
    return var(o_.scalars[pick(o_.scalars.size())]);
  }

  mcalc::Expr vector_leaf() {
    using namespace mcalc;
    return var(o_.vectors[pick(o_.vectors.size())], Shape::vector(o_.length));
  }

  // a^2 + 1, strictly positive.
  mcalc::Expr positive(const mcalc::Expr& a) { return mcalc::add(mcalc::pow(a, 2.0), mcalc::constant(1.0)); }

  mcalc::Expr log_of(const mcalc::Expr& a) { return mcalc::ln(o_.safe ? positive(a) : a); }
  mcalc::Expr exp_of(const mcalc::Expr& a) { return mcalc::exp(o_.safe ? mcalc::sin(a) : a); }

  mcalc::Expr divide(const mcalc::Expr& a, const mcalc::Expr& b) {
    return mcalc::hadamard_div(a, o_.safe ? positive(b) : b);
  }

  mcalc::Expr power(const mcalc::Expr& a) {
    const double p = kExponents[pick(std::size(kExponents))];
    const bool integral = p == std::floor(p) && p > 0;
    return mcalc::pow(o_.safe && !integral ? positive(a) : a, p);
  }

  static constexpr double kConstants[] = {0.5, 1, 2, 3, 0.25, 1.5, 7};
  static constexpr double kExponents[] = {2, 3, -1, 0.5, -2};

  std::mt19937_64 rng_;
  Options o_;
};

/// |a - b| <= tol * max(1, |a|, |b|).
inline bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace gen
