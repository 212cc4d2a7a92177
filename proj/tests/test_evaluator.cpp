#include <gtest/gtest.h>

#include <cmath>

#include "golden_corpus.hpp"
#include "oracles.hpp"
#include "mcalc/differentiator.hpp"
#include "mcalc/evaluator.hpp"
#include "mcalc/parser.hpp"

using namespace mcalc;

namespace {

const Declarations kWX2 = {{"w", Shape::vector(2)}, {"x", Shape::vector(2)}};

}  // namespace

TEST(Eval, Examples) {
  EXPECT_EQ(eval(parse("3*x^2*y"), Env().bind("x", 2).bind("y", 3)).scalar(), 36.0);
  EXPECT_EQ(eval(parse("sum(w (*) x)", kWX2), Env().bind("w", {1, 2}).bind("x", {3, 4})).scalar(), 11.0);
  EXPECT_THROW(eval(var("x"), Env()), UnboundVariable);
}

TEST(Eval, VectorResultAndElements) {
  const Env env = Env().bind("w", {1, 2}).bind("x", {3, 4}).bind("z", 10);
  EXPECT_EQ(eval(parse("w * z + x", kWX2), env), Value(std::vector<double>{13, 24}));
  EXPECT_EQ(eval(parse("x_2 - w_1", kWX2), env).scalar(), 3.0);
}

TEST(Eval, Errors) {
  EXPECT_THROW(eval(parse("w (/) x", kWX2), Env().bind("w", {1, 2}).bind("x", {3, 0})), DivisionByZero);
  EXPECT_THROW(eval(parse("ln(x)"), Env().bind("x", 0)), DomainError);
  EXPECT_THROW(eval(parse("ln(x)"), Env().bind("x", -1)), DomainError);
  EXPECT_THROW(eval(parse("x"), Env().bind("x", {1, 2})), ShapeMismatch);
  EXPECT_THROW(eval(parse("sum(x)", kWX2), Env().bind("x", {1, 2, 3})), ShapeMismatch);
}

TEST(Eval, SecantExperiment) {
  const Expr y = parse("x + x^2");
  const double y1 = eval(y, Env().bind("x", 1)).scalar();
  const double y2 = eval(y, Env().bind("x", 2)).scalar();
  EXPECT_EQ(y1, 2.0);
  EXPECT_EQ(y2, 6.0);
  EXPECT_EQ(y2 - y1, 4.0);
}

TEST(Eval, KinkProbe) {
  KinkProbe probe;
  eval(parse("max0(x - 1) + max0(y)"), Env().bind("x", 1.25).bind("y", -3), &probe);
  EXPECT_EQ(probe.min_distance, 0.25);
}

TEST(EvalJacobian, Examples) {
  const Declarations dx = {{"x", Shape::vector(2)}};
  Grid g = eval_jacobian(Jacobian::diagonal({parse("x_1", dx), parse("x_2", dx)}), Env().bind("x", {5, 7}));
  EXPECT_EQ(std::vector<double>(g.data().begin(), g.data().end()), (std::vector<double>{5, 0, 0, 7}));
  g = eval_jacobian(Jacobian::row({parse("6*y*x"), parse("3*x^2")}), Env().bind("x", 2).bind("y", 3));
  EXPECT_EQ(std::vector<double>(g.data().begin(), g.data().end()), (std::vector<double>{36, 12}));
  g = eval_jacobian(Jacobian::identity(3), Env());
  EXPECT_EQ(std::vector<double>(g.data().begin(), g.data().end()), (std::vector<double>{1, 0, 0, 0, 1, 0, 0, 0, 1}));
}

TEST(FiniteDiff, SinSquare) {
  const FiniteDiff fd = finite_diff(parse("sin(x^2)"), var("x"), Env().bind("x", 1));
  EXPECT_NEAR(fd.estimate(0, 0), 2 * std::cos(1.0), 1e-6);
}

TEST(FiniteDiff, SumIsOnes) {
  const Declarations d = {{"x", Shape::vector(3)}};
  const FiniteDiff fd = finite_diff(parse("sum(x)", d), var("x", Shape::vector(3)), Env().bind("x", {0.3, -1.2, 4}));
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(fd.estimate(0, j), 1.0, 1e-9);
  EXPECT_EQ(fd.steps[2], 4e-6);
}

TEST(FiniteDiff, KinkFlagged) {
  const FiniteDiff fd = finite_diff(parse("max0(z)"), var("z"), Env().bind("z", 0));
  EXPECT_TRUE(fd.near_kink[0]);
}

TEST(FiniteDiff, SecondOrder) {
  // Halving h cuts the error by about 4.
  const Expr e = parse("sin(x^2)");
  const double exact = 2 * std::cos(1.0);
  const Env env = Env().bind("x", 1);
  const double e1 = std::abs(finite_diff(e, var("x"), env, 1e-2).estimate(0, 0) - exact);
  const double e2 = std::abs(finite_diff(e, var("x"), env, 5e-3).estimate(0, 0) - exact);
  EXPECT_NEAR(e1 / e2, 4.0, 0.1);
}

TEST(Check, NestedChain) {
  const CheckReport r = check(parse("ln(sin(x^3)^2)"), var("x"), Env().bind("x", 0.5));
  EXPECT_EQ(r.verdict, Verdict::Pass);
  EXPECT_EQ(r.form, JacobianForm::Scalar);
  const double x = 0.5;
  EXPECT_NEAR(r.entries[0].symbolic, 6 * x * x * std::cos(x * x * x) / std::sin(x * x * x), 1e-12);
}

TEST(Check, HadamardUsesDiagonal) {
  const Declarations d = {{"w", Shape::vector(5)}, {"x", Shape::vector(5)}};
  const CheckReport r = check(parse("w (*) x", d), var("w", Shape::vector(5)),
                              Env().bind("w", {1, -2, 3, 0.5, 4}).bind("x", {0.1, 2, -3, 7, 1.5}));
  EXPECT_EQ(r.verdict, Verdict::Pass);
  EXPECT_EQ(r.form, JacobianForm::Diagonal);
  EXPECT_EQ(r.entries.size(), 25u);
}

TEST(Check, KinkSkipped) {
  const CheckReport r = check(parse("max0(z)"), var("z"), Env().bind("z", 0));
  EXPECT_EQ(r.verdict, Verdict::PassWithSkips);
  EXPECT_EQ(r.skipped.size(), r.entries.size());
  EXPECT_EQ(verdict_name(r.verdict), "pass-with-skips");
}

TEST(Check, DetectsWrongDerivative) {
  const Jacobian wrong = Jacobian::scalar(parse("3*x"));
  const std::vector<Expr> wrt = {var("x")};
  const CheckReport r = check(wrong, parse("x^2"), wrt, Env().bind("x", 1.5));
  EXPECT_EQ(r.verdict, Verdict::Fail);
  EXPECT_NEAR(r.max_abs_err, 1.5, 1e-6);
}

TEST(Check, DomainErrorNamesEntry) {
  // (x^2)^0.5 is defined everywhere, its derivative is not at 0.
  try {
    check(parse("(x^2)^0.5"), var("x"), Env().bind("x", 0));
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("entry (0, 0)"), std::string::npos) << e.what();
  }
  // Probes that leave the domain name the column.
  try {
    check(parse("ln(x)"), var("x"), Env().bind("x", 0));
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("column 0"), std::string::npos) << e.what();
  }
}

TEST(Check, RenderSummary) {
  const std::string text = render(check(parse("x^2"), var("x"), Env().bind("x", 2)));
  EXPECT_NE(text.find("representation scalar"), std::string::npos) << text;
  EXPECT_NE(text.find("verdict pass"), std::string::npos) << text;
}

// Every golden expression agrees with finite differences at 20 random points.
class GoldenOracle : public ::testing::TestWithParam<golden::Case> {};

TEST_P(GoldenOracle, TwentyEnvironments) {
  const oracle::Outcome o = oracle::finite_difference(GetParam(), 20);
  EXPECT_TRUE(o.ok) << o.failure;
  EXPECT_GT(o.compared, 0u);
}

INSTANTIATE_TEST_SUITE_P(Corpus, GoldenOracle, ::testing::ValuesIn(golden::corpus()),
                         [](const auto& info) { return info.param.name; });
