#include "mcalc/jacobian.hpp"

#include <algorithm>

#include "mcalc/parser.hpp"

namespace mcalc {

Jacobian Jacobian::dense(std::size_t rows, std::size_t cols, std::vector<Expr> row_major) {
  if (rows == 0 || cols == 0 || row_major.size() != rows * cols) {
    throw DimensionMismatch("dense Jacobian needs rows*cols entries");
  }
  for (const auto& e : row_major) {
    if (!e.shape().is_scalar()) throw ShapeMismatch("Jacobian entries must be scalar");
  }
  return Jacobian(rows, cols, JacobianForm::Dense, std::move(row_major));
}

Jacobian Jacobian::diagonal(std::vector<Expr> diag) {
  const std::size_t n = diag.size();
  if (n == 0) throw DimensionMismatch("empty diagonal");
  return Jacobian(n, n, JacobianForm::Diagonal, std::move(diag));
}

Jacobian Jacobian::row(std::vector<Expr> entries) {
  const std::size_t n = entries.size();
  if (n == 0) throw DimensionMismatch("empty row");
  return Jacobian(1, n, JacobianForm::RowVector, std::move(entries));
}

Jacobian Jacobian::column(std::vector<Expr> entries) {
  const std::size_t m = entries.size();
  if (m == 0) throw DimensionMismatch("empty column");
  return Jacobian(m, 1, JacobianForm::ColVector, std::move(entries));
}

Jacobian Jacobian::scalar(Expr entry) { return Jacobian(1, 1, JacobianForm::Scalar, {std::move(entry)}); }

Jacobian Jacobian::identity(std::size_t n) { return diagonal(std::vector<Expr>(n, constant(1.0))); }

Jacobian Jacobian::from_grid(std::size_t rows, std::size_t cols, std::vector<Expr> row_major) {
  if (row_major.size() != rows * cols || rows == 0 || cols == 0) {
    throw DimensionMismatch("grid needs rows*cols entries");
  }
  if (rows == 1 && cols == 1) return scalar(std::move(row_major[0]));
  if (rows == 1) return row(std::move(row_major));
  if (cols == 1) return column(std::move(row_major));
  return dense(rows, cols, std::move(row_major));
}

Expr Jacobian::at(std::size_t i, std::size_t j) const {
  if (i >= rows_ || j >= cols_) throw DimensionMismatch("Jacobian index out of range");
  switch (form_) {
    case JacobianForm::Dense: return entries_[i * cols_ + j];
    case JacobianForm::Diagonal: return i == j ? entries_[i] : constant(0.0);
    case JacobianForm::RowVector: return entries_[j];
    case JacobianForm::ColVector: return entries_[i];
    case JacobianForm::Scalar: return entries_[0];
  }
  return entries_[0];
}

Jacobian Jacobian::materialize() const {
  std::vector<Expr> grid;
  grid.reserve(rows_ * cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) grid.push_back(at(i, j));
  }
  Jacobian out(rows_, cols_, JacobianForm::Dense, std::move(grid));
  out.layout_ = layout_;
  return out;
}

Jacobian Jacobian::map(const std::function<Expr(const Expr&)>& f) const {
  Jacobian out = *this;
  for (auto& e : out.entries_) e = f(e);
  return out;
}

bool Jacobian::is_identity() const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      if (!at(i, j).is_const(i == j ? 1.0 : 0.0)) return false;
    }
  }
  return true;
}

Jacobian transpose_layout(const Jacobian& j) {
  Jacobian out = j;
  out.layout_ = j.layout_ == Layout::Numerator ? Layout::Denominator : Layout::Numerator;
  out.rows_ = j.cols_;
  out.cols_ = j.rows_;
  switch (j.form_) {
    case JacobianForm::Dense:
      for (std::size_t r = 0; r < j.rows_; ++r) {
        for (std::size_t c = 0; c < j.cols_; ++c) out.entries_[c * j.rows_ + r] = j.entries_[r * j.cols_ + c];
      }
      break;
    case JacobianForm::RowVector: out.form_ = JacobianForm::ColVector; break;
    case JacobianForm::ColVector: out.form_ = JacobianForm::RowVector; break;
    default: break;
  }
  return out;
}

std::string_view form_name(JacobianForm form) {
  switch (form) {
    case JacobianForm::Dense: return "dense";
    case JacobianForm::Diagonal: return "diagonal";
    case JacobianForm::RowVector: return "row";
    case JacobianForm::ColVector: return "column";
    case JacobianForm::Scalar: return "scalar";
  }
  return "?";
}

std::string render(const Jacobian& j) {
  auto join = [](std::span<const Expr> es) {
    std::string s;
    for (std::size_t i = 0; i < es.size(); ++i) s += (i ? ", " : "") + pretty_print(es[i]);
    return s;
  };
  switch (j.form()) {
    case JacobianForm::Scalar: return pretty_print(j.entries()[0]);
    case JacobianForm::Diagonal: return "diag(" + join(j.entries()) + ")";
    case JacobianForm::RowVector: return "[" + join(j.entries()) + "]";
    default: break;
  }
  std::vector<std::string> cells;
  std::vector<std::size_t> width(j.cols(), 0);
  for (std::size_t r = 0; r < j.rows(); ++r) {
    for (std::size_t c = 0; c < j.cols(); ++c) {
      cells.push_back(pretty_print(j.at(r, c)));
      width[c] = std::max(width[c], cells.back().size());
    }
  }
  std::string out;
  for (std::size_t r = 0; r < j.rows(); ++r) {
    out += "[ ";
    for (std::size_t c = 0; c < j.cols(); ++c) {
      const std::string& cell = cells[r * j.cols() + c];
      out += cell;
      if (c + 1 < j.cols()) out += std::string(width[c] - cell.size() + 2, ' ');
    }
    std::size_t pad = width[j.cols() - 1] - cells[r * j.cols() + j.cols() - 1].size();
    out += std::string(pad, ' ') + " ]";
    if (r + 1 < j.rows()) out += '\n';
  }
  return out;
}

}  // namespace mcalc
