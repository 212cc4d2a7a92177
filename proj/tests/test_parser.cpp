#include <gtest/gtest.h>

#include "generators.hpp"
#include "mcalc/parser.hpp"

using namespace mcalc;

namespace {

const Declarations kWX = {{"w", Shape::vector(3)}, {"x", Shape::vector(3)}};

std::size_t syntax_error_at(const std::string& text, const Declarations& d = {}) {
  try {
    parse(text, d);
  } catch (const SyntaxError& e) {
    return e.position();
  }
  ADD_FAILURE() << "no SyntaxError for '" << text << "'";
  return std::string::npos;
}

}  // namespace

TEST(Parse, ProductChain) {
  const Expr x = var("x");
  const Expr y = var("y");
  EXPECT_EQ(parse("3*x^2*y"), mul(mul(constant(3), pow(x, 2)), y));
}

TEST(Parse, NeuronAffine) {
  const Expr w = var("w", Shape::vector(3));
  const Expr x = var("x", Shape::vector(3));
  EXPECT_EQ(parse("sum(w (*) x) + b", kWX), add(sum(hadamard(w, x)), var("b")));
  EXPECT_EQ(parse("sum(w ⊗ x) + b", kWX), parse("sum(w (*) x) + b", kWX));
  EXPECT_EQ(parse("w ⊘ x", kWX), parse("w (/) x", kWX));
}

TEST(Parse, Precedence) {
  EXPECT_EQ(parse("-x^2"), neg(pow(var("x"), 2)));
  EXPECT_EQ(parse("a - b - c"), sub(sub(var("a"), var("b")), var("c")));
  EXPECT_EQ(parse("a + b * c"), add(var("a"), mul(var("b"), var("c"))));
  EXPECT_EQ(parse("x^-1"), pow(var("x"), -1));
  EXPECT_EQ(parse("x^0.5"), pow(var("x"), 0.5));
}

TEST(Parse, Elements) {
  EXPECT_EQ(parse("x_2", kWX), element("x", 1, 3));
  EXPECT_THROW(parse("x_4", kWX), SyntaxError);
  // Undeclared names with underscores are plain scalars.
  EXPECT_EQ(parse("x_2"), var("x_2"));
}

TEST(Parse, UnbalancedParenAtEnd) { EXPECT_EQ(syntax_error_at("sin(x^2"), 7u); }

TEST(Parse, Errors) {
  EXPECT_EQ(syntax_error_at(""), 0u);
  EXPECT_EQ(syntax_error_at("x +"), 3u);
  EXPECT_EQ(syntax_error_at("x $ y"), 2u);
  EXPECT_EQ(syntax_error_at("(x))"), 3u);
  EXPECT_EQ(syntax_error_at("3x"), 1u);
  EXPECT_THROW(parse("tan(x)"), UnknownFunction);
  EXPECT_THROW(parse("x + y", {{"x", Shape::vector(2)}, {"y", Shape::vector(3)}}), ShapeMismatch);
  EXPECT_THROW(parse("sin(x, y)"), ArityError);
  EXPECT_THROW(parse("dot(x)"), ArityError);
}

TEST(Parse, LeftmostError) {
  // Both "$" and the missing paren are errors; the first one wins.
  EXPECT_EQ(syntax_error_at("sin($ + (y"), 4u);
}

TEST(PrettyPrint, Examples) {
  EXPECT_EQ(pretty_print(parse("3*x^2*y")), "3 * x^2 * y");
  const Expr w = var("w", Shape::vector(3));
  const Expr x = var("x", Shape::vector(3));
  EXPECT_EQ(pretty_print(add(sum(hadamard(w, x)), var("b"))), "sum(w (*) x) + b");
  EXPECT_EQ(pretty_print(neg(add(var("x"), var("y")))), "-(x + y)");
  EXPECT_EQ(pretty_print(sub(var("a"), sub(var("b"), var("c")))), "a - (b - c)");
  EXPECT_EQ(pretty_print(pow(pow(var("x"), 2), 3)), "(x^2)^3");
  EXPECT_EQ(pretty_print(constant_vec({1, 2.5})), "[1, 2.5]");
}

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(3), "3");
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(-2.5), "-2.5");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

// parse(pretty_print(e)) == e on fuzzed trees of depth <= 8.
TEST(RoundTripProperty, Fuzzed) {
  gen::Generator g(2024);
  const Declarations decls = gen::declarations(g.options());
  for (int trial = 0; trial < 2000; ++trial) {
    const Expr e = g.any(7);
    ASSERT_LE(depth(e), 8u);
    const std::string text = pretty_print(e);
    ASSERT_EQ(parse(text, decls), e) << text;
  }
}

TEST(RoundTripProperty, Deterministic) {
  const std::string text = "ln(sin(x^3)^2) - -y * (z + 1)^-2";
  EXPECT_EQ(parse(text), parse(text));
  EXPECT_EQ(pretty_print(parse(text)), text);
}
