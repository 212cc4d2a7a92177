#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mcalc/expr.hpp"

namespace mcalc {

enum class Layout { Numerator, Denominator };

enum class JacobianForm { Dense, Diagonal, RowVector, ColVector, Scalar };

/// Symbolic matrix of partial derivatives.
///
/// In numerator layout an m-output, n-input Jacobian has m rows and n columns;
/// the denominator layout is its transpose. Only the non-trivial entries are
/// stored: a Diagonal keeps its n diagonal expressions and reports Const 0
/// for every off-diagonal position.
class Jacobian {
 public:
  static Jacobian dense(std::size_t rows, std::size_t cols, std::vector<Expr> row_major);
  static Jacobian diagonal(std::vector<Expr> diag);
  static Jacobian row(std::vector<Expr> entries);
  static Jacobian column(std::vector<Expr> entries);
  static Jacobian scalar(Expr entry);
  static Jacobian identity(std::size_t n);
  /// Picks Scalar, RowVector, ColVector or Dense from the dimensions.
  static Jacobian from_grid(std::size_t rows, std::size_t cols, std::vector<Expr> row_major);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Layout layout() const { return layout_; }
  JacobianForm form() const { return form_; }
  std::span<const Expr> entries() const { return entries_; }

  /// Entry at (i, j) in this Jacobian's own layout.
  Expr at(std::size_t i, std::size_t j) const;
  /// Same matrix as a Dense grid.
  Jacobian materialize() const;
  /// Applies `f` to every stored entry.
  Jacobian map(const std::function<Expr(const Expr&)>& f) const;

  bool is_identity() const;

  friend Jacobian transpose_layout(const Jacobian& j);
  friend bool operator==(const Jacobian&, const Jacobian&) = default;

 private:
  Jacobian(std::size_t rows, std::size_t cols, JacobianForm form, std::vector<Expr> entries)
      : rows_(rows), cols_(cols), form_(form), entries_(std::move(entries)) {}

  std::size_t rows_;
  std::size_t cols_;
  Layout layout_ = Layout::Numerator;
  JacobianForm form_;
  std::vector<Expr> entries_;
};

/// Flips between numerator and denominator layout. Involutive.
Jacobian transpose_layout(const Jacobian& j);

std::string_view form_name(JacobianForm form);

/// Text rendering: `diag(a, b)` for diagonals, `[a, b]` for rows, an aligned
/// bracketed grid otherwise.
std::string render(const Jacobian& j);

}  // namespace mcalc
