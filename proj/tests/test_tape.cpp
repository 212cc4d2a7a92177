#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "golden_corpus.hpp"
#include "mcalc/canonical.hpp"
#include "mcalc/differentiator.hpp"
#include "mcalc/evaluator.hpp"
#include "mcalc/parser.hpp"
#include "mcalc/tape.hpp"
#include "oracles.hpp"

using namespace mcalc;

namespace {

std::vector<std::string> lines(const Tape& t) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < t.size(); ++i) out.push_back(t.entries[i].id + " = " + pretty_print(entry_expr(t, i)));
  return out;
}

const Declarations kWX = {{"w", Shape::vector(3)}, {"x", Shape::vector(3)}};

}  // namespace

TEST(Lower, NestedChain) {
  EXPECT_EQ(lines(lower(parse("ln(sin(x^3)^2)"))),
            (std::vector<std::string>{"u1 = x^3", "u2 = sin(u1)", "u3 = u2^2", "u4 = ln(u3)"}));
}

TEST(Lower, FanOut) {
  EXPECT_EQ(lines(lower(parse("x + x^2"))), (std::vector<std::string>{"u1 = x^2", "u2 = x + u1"}));
}

TEST(Lower, BareVariableIsAlias) {
  const Tape t = lower(var("x"));
  ASSERT_EQ(t.size(), 1u);
  EXPECT_TRUE(t.entries[0].alias);
  EXPECT_EQ(lines(t), (std::vector<std::string>{"u1 = x"}));
}

TEST(Lower, RebuildEqualsSimplified) {
  gen::Generator g(3);
  for (int trial = 0; trial < 500; ++trial) {
    const Expr e = g.any(6);
    ASSERT_EQ(rebuild(lower(e)), simplify(e)) << pretty_print(e);
  }
}

TEST(Render, NestedChainTable) {
  EXPECT_EQ(render(lower(parse("ln(sin(x^3)^2)"))),
            "u1 = x^3   ∂u1/∂x = 3 * x^2\n"
            "u2 = sin(u1)   ∂u2/∂u1 = cos(u1)\n"
            "u3 = u2^2   ∂u3/∂u2 = 2 * u2\n"
            "u4 = ln(u3)   ∂u4/∂u3 = u3^-1\n");
}

TEST(Render, FanOutListsEachOperand) {
  EXPECT_EQ(render(lower(parse("x + x^2"))), "u1 = x^2   ∂u1/∂x = 2 * x\nu2 = x + u1   ∂u2/∂x = 1   ∂u2/∂u1 = 1\n");
}

TEST(ForwardMode, NestedChainClosedForm) {
  const Tape t = lower(parse("ln(sin(x^3)^2)"));
  const double x = 0.5;
  const DerivRecord r = forward_mode(t, Env().bind("x", x), var("x"));
  const double closed = 6 * x * x * std::cos(x * x * x) / std::sin(x * x * x);
  EXPECT_NEAR(r.tangent.scalar(), closed, 1e-12);
  EXPECT_NEAR(r.value().scalar(), std::log(std::pow(std::sin(x * x * x), 2)), 1e-15);
}

TEST(ForwardMode, Examples) {
  EXPECT_EQ(forward_mode(lower(parse("x + x^2")), Env().bind("x", 1), var("x")).tangent.scalar(), 3.0);
  EXPECT_EQ(forward_mode(lower(constant(7)), Env().bind("x", 1), var("x")).tangent.scalar(), 0.0);
}

TEST(ForwardMode, VectorSeedSelectsComponent) {
  const Tape t = lower(parse("w (*) x", kWX));
  const Env env = Env().bind("w", {1, 2, 3}).bind("x", {4, 5, 6});
  const DerivRecord r = forward_mode(t, env, element("w", 1, 3));
  EXPECT_EQ(r.tangent, Value(std::vector<double>{0, 5, 0}));
  EXPECT_THROW(forward_mode(t, env, var("w", Shape::vector(3))), ShapeMismatch);
}

TEST(ReverseMode, PartialsOfF) {
  const DerivRecord r = reverse_mode(lower(parse("3*x^2*y")), Env().bind("x", 2).bind("y", 3));
  EXPECT_EQ(r.adjoints.at("x").scalar(), 36.0);
  EXPECT_EQ(r.adjoints.at("y").scalar(), 12.0);
}

TEST(ReverseMode, NeuronAffine) {
  const Env env = Env().bind("w", {0.5, -1, 2}).bind("x", {3, 4, -5}).bind("b", 0.25);
  const DerivRecord r = reverse_mode(lower(parse("sum(w (*) x) + b", kWX)), env);
  EXPECT_EQ(r.adjoints.at("w"), env.at("x"));
  EXPECT_EQ(r.adjoints.at("x"), env.at("w"));
  EXPECT_EQ(r.adjoints.at("b").scalar(), 1.0);
}

TEST(ReverseMode, FanOutSumsPaths) {
  EXPECT_EQ(reverse_mode(lower(parse("x + x^2")), Env().bind("x", 1)).adjoints.at("x").scalar(), 3.0);
  // x * x^2 at x = 2: paths give x^2 + x * 2x = 4 + 8.
  EXPECT_EQ(reverse_mode(lower(parse("x * x^2")), Env().bind("x", 2)).adjoints.at("x").scalar(), 12.0);
}

TEST(ReverseMode, RequiresScalarResult) {
  EXPECT_THROW(reverse_mode(lower(parse("w + x", kWX)), Env().bind("w", {1, 2, 3}).bind("x", {1, 2, 3})),
               ShapeMismatch);
}

TEST(ReverseMode, DomainErrorNamesEntry) {
  try {
    reverse_mode(lower(parse("ln(sin(x))")), Env().bind("x", 0));
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("u2"), std::string::npos) << e.what();
  }
}

TEST(SymbolicBacksub, Examples) {
  const Expr x = var("x");
  EXPECT_EQ(pretty_print(canonical(symbolic_backsub(lower(parse("sin(x^2)")), x))), "2 * x * cos(x^2)");
  EXPECT_EQ(pretty_print(canonical(symbolic_backsub(lower(parse("ln(sin(x^3)^2)")), x))),
            "6 * x^2 * cos(x^3) * sin(x^3)^-1");
  EXPECT_EQ(symbolic_backsub(lower(x), x), constant(1));
}

TEST(Dot, FanOutHasTwoEdgesFromX) {
  const std::string g = to_dot(lower(parse("x + x^2")));
  std::size_t edges = 0;
  for (std::size_t p = g.find("\"leaf:x\" ->"); p != std::string::npos; p = g.find("\"leaf:x\" ->", p + 1)) ++edges;
  EXPECT_EQ(edges, 2u) << g;
}

TEST(Dot, SinSquareChain) {
  const std::string g = to_dot(lower(parse("sin(x^2)")));
  EXPECT_NE(g.find("u1 [label=\"u1 = sqr\"]"), std::string::npos) << g;
  EXPECT_NE(g.find("u2 [label=\"u2 = sin\"]"), std::string::npos) << g;
  EXPECT_NE(g.find("\"leaf:x\" -> u1"), std::string::npos) << g;
  EXPECT_NE(g.find("u1 -> u2"), std::string::npos) << g;
}

class GoldenModes : public ::testing::TestWithParam<golden::Case> {};

TEST_P(GoldenModes, AgreeOverTwentyEnvironments) {
  const oracle::ModeOutcome m = oracle::mode_agreement(GetParam(), 20);
  EXPECT_TRUE(m.forward_reverse.ok) << m.forward_reverse.failure;
  EXPECT_TRUE(m.backsub.ok) << m.backsub.failure;
}

INSTANTIATE_TEST_SUITE_P(Corpus, GoldenModes, ::testing::ValuesIn(golden::corpus()),
                         [](const auto& info) { return info.param.name; });

// Backsub against derive_scalar on fuzzed scalar expressions.
TEST(BacksubProperty, MatchesDeriveScalar) {
  gen::Options o;
  o.safe = true;
  o.kinks = false;
  gen::Generator g(77, o);
  const Expr x = var("x");
  for (int trial = 0; trial < 200; ++trial) {
    const Expr e = g.scalar(5);
    const Expr a = symbolic_backsub(lower(e), x);
    const Expr b = derive_scalar(e, x);
    for (int k = 0; k < 10; ++k) {
      const Env env = g.env();
      const double va = eval(a, env).scalar();
      const double vb = eval(b, env).scalar();
      if (!std::isfinite(vb)) continue;
      ASSERT_TRUE(gen::close(va, vb, 1e-12)) << pretty_print(e) << ": " << va << " vs " << vb;
    }
  }
}

// Forward sweeps per component against one reverse sweep on fuzzed scalars.
TEST(ModeProperty, Fuzzed) {
  gen::Options o;
  o.safe = true;
  o.kinks = false;
  gen::Generator g(91, o);
  for (int trial = 0; trial < 200; ++trial) {
    const Expr e = g.scalar(5);
    const Tape t = lower(e);
    std::vector<Expr> leaves;
    for (const auto& s : o.scalars) leaves.push_back(var(s));
    for (const auto& v : o.vectors) {
      for (std::size_t i = 0; i < o.length; ++i) leaves.push_back(element(v, i, o.length));
    }
    for (int k = 0; k < 5; ++k) {
      const Env env = g.env();
      const DerivRecord rev = reverse_mode(t, env);
      for (const auto& leaf : leaves) {
        const double f = forward_mode(t, env, leaf).tangent.scalar();
        auto it = rev.adjoints.find(leaf.name());
        const double r = it == rev.adjoints.end() ? 0.0
                         : leaf.is_component()    ? it->second[*leaf.component()]
                                                  : it->second.scalar();
        ASSERT_TRUE(gen::close(f, r, 1e-10)) << pretty_print(e) << " d/d" << pretty_print(leaf);
      }
    }
  }
}
