#pragma once

// Numeric evaluation and the finite-difference gradient check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcalc/env.hpp"
#include "mcalc/expr.hpp"
#include "mcalc/jacobian.hpp"

namespace mcalc {

/// Records how close evaluation came to the kink of max0 (and step).
struct KinkProbe {
  double min_distance = std::numeric_limits<double>::infinity();
  void observe(double z) { min_distance = std::min(min_distance, std::abs(z)); }
};

/// Throws UnboundVariable, ShapeMismatch for a binding of the wrong shape,
/// DomainError / DivisionByZero outside an operator's domain.
Value eval(const Expr& e, const Env& env, KinkProbe* probe = nullptr);

/// Dense row-major matrix of doubles.
class Grid {
 public:
  Grid(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<const double> data() const { return data_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

Grid eval_jacobian(const Jacobian& j, const Env& env);

struct FiniteDiff {
  Grid estimate;
  /// Per input component: some probe came within 10h of a max0 kink.
  std::vector<bool> near_kink;
  std::vector<double> steps;
};

/// Central differences of `e` with respect to the components of `wrt`.
/// Without `h` each component j uses 1e-6 * max(1, |v_j|).
FiniteDiff finite_diff(const Expr& e, std::span<const Expr> wrt, const Env& env, std::optional<double> h = {});
FiniteDiff finite_diff(const Expr& e, const Expr& v, const Env& env, std::optional<double> h = {});

enum class Verdict { Pass, PassWithSkips, Fail };
std::string_view verdict_name(Verdict v);

struct CheckEntry {
  std::size_t row;
  std::size_t col;
  double symbolic;
  double numeric;
  double abs_err;
  double rel_err;
  bool skipped;
};

struct CheckReport {
  std::vector<CheckEntry> entries;
  double max_abs_err = 0.0;  // over entries that were not skipped
  double max_rel_err = 0.0;
  std::vector<std::size_t> skipped;  // indices into entries
  Verdict verdict = Verdict::Pass;
  JacobianForm form = JacobianForm::Dense;
  double tol_abs = 0.0;
  double tol_rel = 0.0;

  bool passed() const { return verdict != Verdict::Fail; }
};

struct CheckOptions {
  double tol_abs = 1e-7;
  double tol_rel = 1e-4;
  std::optional<double> h;
};

/// Compares the symbolic Jacobian against finite differences. Evaluation
/// errors are rethrown with the failing entry in the message.
CheckReport check(const Expr& e, const Expr& v, const Env& env, const CheckOptions& options = {});
CheckReport check(const Expr& e, std::span<const Expr> wrt, const Env& env, const CheckOptions& options = {});
/// Same comparison for an already-computed Jacobian.
CheckReport check(const Jacobian& symbolic, const Expr& e, std::span<const Expr> wrt, const Env& env,
                  const CheckOptions& options = {});

/// Aligned text table, one line per entry, followed by a summary line.
std::string render(const CheckReport& report);

}  // namespace mcalc
