#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "boundcount/expr.hpp"
#include "support/fd.hpp"
#include "support/random_ast.hpp"

namespace ex = boundcount::expr;

namespace {

double eval(const char* text, double r = 0.0, const ex::Bindings& b = {}) {
  return ex::evaluate(ex::parse(text), r, b);
}

std::size_t error_offset(const char* text) {
  try {
    ex::parse(text);
  } catch (const ex::ParseError& e) {
    return e.offset();
  }
  return std::string::npos;
}

}  // namespace

TEST(ExprParse, PrecedenceAndAssociativity) {
  EXPECT_EQ(eval("2+3*4"), 14.0);
  EXPECT_EQ(eval("(2+3)*4"), 20.0);
  EXPECT_EQ(eval("2^3^2"), 512.0);
  EXPECT_EQ(eval("-2^2"), -4.0);
  EXPECT_EQ(eval("2^-1"), 0.5);
  EXPECT_EQ(eval("8/4/2"), 1.0);
  EXPECT_EQ(eval("10-4-3"), 3.0);
  EXPECT_EQ(eval("--3"), 3.0);
  EXPECT_EQ(eval("+3"), 3.0);
  EXPECT_DOUBLE_EQ(eval("1.5e-3*2E3"), 3.0);
}

TEST(ExprParse, VariablesAndFunctions) {
  const ex::Bindings b{{"g", 3.0}, {"R", 2.0}};
  EXPECT_DOUBLE_EQ(eval("-g^2/R^2*exp(-r/R)", 1.0, b), -9.0 / 4.0 * std::exp(-0.5));
  EXPECT_DOUBLE_EQ(eval("pow(r, 3)", 2.0), 8.0);
  EXPECT_DOUBLE_EQ(eval("min(r, 1) + max(r, 1)", 3.0), 4.0);
  EXPECT_DOUBLE_EQ(eval("abs(-r)+sqrt(r*r)", 2.5), 5.0);
  EXPECT_DOUBLE_EQ(eval("log(exp(r))", 0.7), 0.7);
  EXPECT_DOUBLE_EQ(eval("sin(r)^2+cos(r)^2", 1.3), 1.0);
}

TEST(ExprParse, ErrorOffsets) {
  EXPECT_EQ(error_offset("1+"), 2u);
  EXPECT_EQ(error_offset("(1+2"), 4u);
  EXPECT_EQ(error_offset("foo(1)"), 0u);
  EXPECT_NE(error_offset("pow(1)"), std::string::npos);
  EXPECT_NE(error_offset("1 2"), std::string::npos);
  EXPECT_NE(error_offset("1+#"), std::string::npos);
  EXPECT_NE(error_offset(""), std::string::npos);
}

TEST(ExprParse, ParseErrorIsAConfigError) {
  EXPECT_THROW(ex::parse("exp("), boundcount::ConfigError);
}

TEST(ExprEvaluate, DomainErrors) {
  EXPECT_THROW(eval("log(-r)", 1.0), ex::DomainError);
  EXPECT_THROW(eval("sqrt(-r)", 1.0), ex::DomainError);
  EXPECT_THROW(eval("1/(r-1)", 1.0), ex::DomainError);
  EXPECT_THROW(eval("(-r)^0.5", 1.0), ex::DomainError);
  EXPECT_THROW(eval("a*r", 1.0), ex::DomainError);
  EXPECT_EQ(eval("(-r)^3", 2.0), -8.0);
}

TEST(ExprPrint, RoundTripsRandomTrees) {
  boundcount::testing::RandomAst gen(7);
  for (int i = 0; i < 50; ++i) {
    const ex::Ast a = gen.tree();
    const ex::Ast b = ex::parse(ex::print(a));
    EXPECT_TRUE(ex::equal(a, b)) << ex::print(a);
    EXPECT_EQ(ex::print(a), ex::print(b));
  }
}

TEST(ExprParse, NegatedLiteralsFoldButPowersDoNot) {
  EXPECT_TRUE(ex::equal(ex::parse("-2.5"), ex::make_constant(-2.5)));
  EXPECT_EQ(ex::parse("-2^2")->kind, ex::Node::Kind::unary);
  EXPECT_EQ(ex::parse("-(2)")->kind, ex::Node::Kind::unary);
  EXPECT_EQ(eval("(-2)^2"), 4.0);
}

TEST(ExprPrint, ConstantsSurviveExactly) {
  const ex::Ast a = ex::make_constant(0.1 + 0.2);
  const ex::Ast b = ex::parse(ex::print(a));
  EXPECT_EQ(ex::evaluate(b, 0.0, {}), 0.1 + 0.2);
}

TEST(ExprFreeVariables, CollectsNamesExceptNothingElse) {
  const auto vars = ex::free_variables(ex::parse("-g^2*exp(-r/R)+alpha*pow(r,2)"));
  EXPECT_EQ(vars, (std::set<std::string>{"R", "alpha", "g", "r"}));
}

TEST(ExprDerivatives, KnownForms) {
  const ex::Dual2 d = ex::eval_with_derivatives(ex::parse("r^3"), 2.0, {});
  EXPECT_DOUBLE_EQ(d.v, 8.0);
  EXPECT_DOUBLE_EQ(d.d, 12.0);
  EXPECT_DOUBLE_EQ(d.dd, 12.0);

  const ex::Dual2 e = ex::eval_with_derivatives(ex::parse("exp(-r)/r"), 1.5, {});
  const double v = std::exp(-1.5) / 1.5;
  EXPECT_NEAR(e.d, -v * (1.0 + 1.0 / 1.5), 1e-15);
  EXPECT_NEAR(e.dd, v * (1.0 + 2.0 / 1.5 + 2.0 / (1.5 * 1.5)), 1e-15);
}

TEST(ExprDerivatives, BranchRules) {
  // min/max follow the active branch, ties go left; abs'(0) = 0.
  EXPECT_EQ(ex::eval_with_derivatives(ex::parse("min(r, 2*r)"), 1.0, {}).d, 1.0);
  EXPECT_EQ(ex::eval_with_derivatives(ex::parse("max(r, 2*r)"), 1.0, {}).d, 2.0);
  EXPECT_EQ(ex::eval_with_derivatives(ex::parse("min(2*r, r+1)"), 1.0, {}).d, 2.0);
  EXPECT_EQ(ex::eval_with_derivatives(ex::parse("abs(r-1)"), 1.0, {}).d, 0.0);
  EXPECT_EQ(ex::eval_with_derivatives(ex::parse("abs(r-1)"), 0.5, {}).d, -1.0);
}

TEST(ExprDerivatives, AgreeWithDifferenceQuotients) {
  boundcount::testing::RandomAst gen(99);
  std::mt19937 rng(100);
  std::uniform_real_distribution<double> radius(0.2, 5.0);
  for (int t = 0; t < 10; ++t) {
    const ex::Ast ast = gen.tree();
    auto f = [&](double r) { return ex::evaluate(ast, r, {}); };
    auto df = [&](double r) { return ex::eval_with_derivatives(ast, r, {}).d; };
    for (int i = 0; i < 20; ++i) {
      const double r = radius(rng);
      const ex::Dual2 d = ex::eval_with_derivatives(ast, r, {});
      EXPECT_NEAR(d.v, f(r), 1e-14 * std::max(1.0, std::abs(d.v)));
      EXPECT_NEAR(d.d, boundcount::testing::fd_first(f, r, 0.1), 1e-6 * std::max(1.0, std::abs(d.d)))
          << ex::print(ast) << " at r=" << r;
      EXPECT_NEAR(d.dd, boundcount::testing::fd_first(df, r, 0.1), 1e-6 * std::max(1.0, std::abs(d.dd)))
          << ex::print(ast) << " at r=" << r;
    }
  }
}

TEST(ExprBuilders, FunctionTableArity) {
  const auto& fns = ex::functions();
  EXPECT_EQ(fns.at("pow"), 2);
  EXPECT_EQ(fns.at("exp"), 1);
  EXPECT_EQ(fns.count("tan"), 0u);
}
