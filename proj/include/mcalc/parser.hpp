#pragma once

// Text format for expressions.
//
//   expr   := term (("+" | "-") term)*
//   term   := unary (("*" | "(*)" | "(/)") unary)*
//   unary  := "-" unary | factor
//   factor := atom ("^" ["-"] number)?
//   atom   := number | ident | call | "(" expr ")"
//   call   := name "(" expr ("," expr)? ")"
//
// "*" multiplies scalars or scales a vector by a scalar; "(*)" and "(/)" are
// element-wise product and division (U+2297 and U+2298 are accepted too).
// Identifiers default to scalars unless declared as vectors; `x_3` names the
// third element of a declared vector `x`.

#include <map>
#include <string>
#include <string_view>

#include "mcalc/expr.hpp"

namespace mcalc {

using Declarations = std::map<std::string, Shape>;

struct SourceExpr {
  std::string text;
  Declarations declarations;
};

Expr parse(std::string_view text, const Declarations& declarations = {});
inline Expr parse(const SourceExpr& src) { return parse(src.text, src.declarations); }

/// Minimal-parenthesis rendering that parses back to the same tree.
/// Expand nodes are implicit in the text; constant vectors print as
/// `[a, b, ...]`, which the parser does not accept.
std::string pretty_print(const Expr& e);

/// Shortest decimal text that reads back to exactly `v`.
std::string format_number(double v);

}  // namespace mcalc
