#include <gtest/gtest.h>

#include <cmath>

#include "ermakov/errors.hpp"
#include "ermakov/expr.hpp"
#include "ermakov/quadrature.hpp"
#include "support/random_expr.hpp"

using namespace ermakov;

TEST(Parse, PrecedenceShape) {
  const Expr e = parse("sin(theta)^2 + 1/2");
  ASSERT_EQ(e.kind(), Expr::Kind::Binary);
  EXPECT_EQ(e.binary_op(), BinaryOp::Add);
  const Expr& lhs = e.lhs();
  ASSERT_EQ(lhs.kind(), Expr::Kind::Binary);
  EXPECT_EQ(lhs.binary_op(), BinaryOp::Pow);
  EXPECT_EQ(lhs.lhs().kind(), Expr::Kind::Unary);
  EXPECT_EQ(lhs.lhs().unary_op(), UnaryOp::Sin);
  EXPECT_EQ(e.rhs().binary_op(), BinaryOp::Div);
}

TEST(Parse, EmptyInputFailsAtZero) {
  try {
    parse("");
    FAIL() << "expected ParseError";
  } catch (const ParseError& err) {
    EXPECT_EQ(err.offset(), 0u);
    EXPECT_FALSE(err.expected().empty());
  }
}

TEST(Parse, ArithmeticValue) {
  EXPECT_DOUBLE_EQ(parse("2*alpha - r^3").eval({{"alpha", 1.0}, {"r", 1.0}}), 1.0);
  EXPECT_DOUBLE_EQ(parse("2*alpha - r^3").eval({{"alpha", 0.0}, {"r", 1.0}}), -1.0);
}

TEST(Parse, PowerIsRightAssociativeAndAboveUnaryMinus) {
  EXPECT_DOUBLE_EQ(parse("2^3^2").eval({}), 512.0);
  EXPECT_DOUBLE_EQ(parse("-2^2").eval({}), -4.0);
  EXPECT_DOUBLE_EQ(parse("2^-1").eval({}), 0.5);
  EXPECT_DOUBLE_EQ(parse("8/4/2").eval({}), 1.0);
  EXPECT_DOUBLE_EQ(parse("8-4-2").eval({}), 2.0);
}

TEST(Parse, NumbersWithExponents) {
  EXPECT_DOUBLE_EQ(parse("1.5e3").eval({}), 1500.0);
  EXPECT_DOUBLE_EQ(parse("2E-2").eval({}), 0.02);
  EXPECT_DOUBLE_EQ(parse("1e+2").eval({}), 100.0);
  EXPECT_DOUBLE_EQ(parse(".5").eval({}), 0.5);
}

TEST(Parse, ErrorsCarryOffsets) {
  try {
    parse("1 + * 2");
    FAIL();
  } catch (const ParseError& err) {
    EXPECT_EQ(err.offset(), 4u);
  }
  try {
    parse("sin(theta");
    FAIL();
  } catch (const ParseError& err) {
    EXPECT_EQ(err.offset(), 9u);
  }
  EXPECT_THROW(parse("1 2"), ParseError);
  EXPECT_THROW(parse("()"), ParseError);
}

TEST(Parse, UnknownFunction) {
  try {
    parse("1 + cosh(r)");
    FAIL();
  } catch (const UnknownFunctionError& err) {
    EXPECT_EQ(err.name(), "cosh");
    EXPECT_EQ(err.offset(), 4u);
  }
}

TEST(Eval, Examples) {
  EXPECT_DOUBLE_EQ(parse("sin(theta)^2+1/2").eval({{"theta", 0.0}}), 0.5);
  EXPECT_THROW(parse("1/r").eval({{"r", 0.0}}), DomainError);
  EXPECT_NEAR(parse("exp(ln(t))").eval({{"t", 2.5}}), 2.5, 1e-15);
}

TEST(Eval, UnboundVariableIsNamed) {
  try {
    parse("r + theta").eval({{"r", 1.0}});
    FAIL();
  } catch (const UnboundVariableError& err) {
    EXPECT_EQ(err.name(), "theta");
  }
}

TEST(Eval, DomainErrors) {
  EXPECT_THROW(parse("ln(r)").eval({{"r", 0.0}}), DomainError);
  EXPECT_THROW(parse("ln(r)").eval({{"r", -1.0}}), DomainError);
  EXPECT_THROW(parse("sqrt(r)").eval({{"r", -1e-300}}), DomainError);
  EXPECT_THROW(parse("r^(-1)").eval({{"r", 0.0}}), DomainError);
  EXPECT_THROW(parse("r^0.5").eval({{"r", -2.0}}), DomainError);
  EXPECT_DOUBLE_EQ(parse("r^3").eval({{"r", -2.0}}), -8.0);
}

TEST(Eval, BitIdenticalRepeats) {
  const Expr e = parse("sin(theta)*exp(r)/sqrt(1+alpha^2) - ln(2+t)");
  const Bindings b{{"theta", 0.3}, {"r", 1.7}, {"alpha", -0.4}, {"t", 2.0}};
  const double a = e.eval(b);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(e.eval(b), a);
}

TEST(Print, MinimalParentheses) {
  EXPECT_EQ(print(parse("(a+b)*c")), "(a + b)*c");
  EXPECT_EQ(print(parse("a-(b-c)")), "a - (b - c)");
  EXPECT_EQ(print(parse("a-(b+c)")), "a - (b + c)");
  EXPECT_EQ(print(parse("(a^b)^c")), "(a^b)^c");
  EXPECT_EQ(print(parse("a^(b^c)")), "a^b^c");
  EXPECT_EQ(print(parse("(-a)^2")), "(-a)^2");
}

TEST(Print, RoundTripOfRandomTrees) {
  test_support::RandomExpr gen(12345, {"r", "theta", "alpha", "t", "rbar"});
  for (int i = 0; i < 1000; ++i) {
    const Expr e = gen.tree(6);
    const std::string text = print(e);
    const Expr back = parse(text);
    ASSERT_TRUE(back.structurally_equal(e)) << text << " -> " << print(back);
    EXPECT_EQ(print(back), text);
  }
}

TEST(Substitute, ReplacesVariable) {
  const Expr e = parse("1/(2*rbar^2)").substitute("rbar", parse("1/r"));
  EXPECT_NEAR(e.eval({{"r", 3.0}}), 4.5, 1e-14);
  EXPECT_FALSE(e.depends_on("rbar"));
  EXPECT_TRUE(e.depends_on("r"));
  EXPECT_EQ(parse("r*theta + sin(t)").free_variables(), (std::set<std::string>{"r", "t", "theta"}));
}

TEST(Differentiate, Examples) {
  const Expr d = differentiate(parse("alpha^2"), "alpha");
  for (double a : {-2.0, 0.0, 0.7, 3.0}) EXPECT_DOUBLE_EQ(d.eval({{"alpha", a}}), 2 * a);
  const Expr z = differentiate(parse("sin(theta)"), "r");
  EXPECT_EQ(z.eval({{"theta", 0.4}, {"r", 2.0}}), 0.0);
  EXPECT_EQ(z.eval({}), 0.0);
  EXPECT_NEAR(differentiate(parse("1/(2*rbar^2)"), "rbar").eval({{"rbar", 1.0}}), -1.0, 1e-15);
}

TEST(Differentiate, AbsAtZeroIsDomainError) {
  const Expr d = differentiate(parse("abs(r)"), "r");
  EXPECT_DOUBLE_EQ(d.eval({{"r", -2.0}}), -1.0);
  EXPECT_DOUBLE_EQ(d.eval({{"r", 2.0}}), 1.0);
  EXPECT_THROW(d.eval({{"r", 0.0}}), DomainError);
}

TEST(Differentiate, FunctionRules) {
  const Bindings b{{"x", 0.7}};
  struct Case {
    const char* f;
    double df;
  } cases[] = {
      {"sin(x)", std::cos(0.7)},          {"cos(x)", -std::sin(0.7)},
      {"tan(x)", 1 / std::pow(std::cos(0.7), 2)}, {"exp(x)", std::exp(0.7)},
      {"ln(x)", 1 / 0.7},                 {"sqrt(x)", 0.5 / std::sqrt(0.7)},
      {"x^x", std::pow(0.7, 0.7) * (std::log(0.7) + 1)}, {"2^x", std::log(2.0) * std::pow(2.0, 0.7)},
  };
  for (const auto& c : cases) {
    EXPECT_NEAR(differentiate(parse(c.f), "x").eval(b), c.df, 1e-14) << c.f;
  }
}

TEST(Differentiate, CentralDifferenceStepOneMicro) {
  const Expr e = parse("sin(theta)*r^2/(1 + alpha^2) + exp(-t)*alpha");
  Bindings b{{"theta", 0.9}, {"r", 1.3}, {"alpha", -0.6}, {"t", 0.4}};
  for (const char* v : {"theta", "r", "alpha", "t"}) {
    const double sym = differentiate(e, v).eval(b);
    const double x = b.get(v);
    Bindings lo = b, hi = b;
    lo.set(v, x - 1e-6);
    hi.set(v, x + 1e-6);
    const double fd = (e.eval(hi) - e.eval(lo)) / 2e-6;
    EXPECT_LE(std::fabs(sym - fd), 1e-6 * std::fabs(sym)) << v;
  }
}

TEST(Differentiate, RandomTreesAgainstFivePointStencil) {
  test_support::RandomExpr gen(777, {"r", "theta", "alpha", "t"});
  int checked = 0;
  for (int i = 0; checked < 500 && i < 20000; ++i) {
    const Expr e = gen.smooth_tree(4);
    Bindings b{{"r", gen.uniform(0.5, 3.0)},
               {"theta", gen.uniform(-3.0, 3.0)},
               {"alpha", gen.uniform(-2.0, 2.0)},
               {"t", gen.uniform(0.0, 2.0)}};
    int compared = 0;
    for (const char* v : {"r", "theta", "alpha", "t"}) {
      double sym;
      test_support::FdEstimate fd{};
      try {
        if (std::fabs(e.eval(b)) > 1e6) continue;
        sym = differentiate(e, v).eval(b);
        fd = test_support::five_point(e, v, b);
      } catch (const Error&) {
        continue;
      }
      if (!std::isfinite(sym) || !std::isfinite(fd.value) || std::fabs(sym) > 1e6) continue;
      // Skip points where the difference oracle itself has not converged.
      if (fd.error > 1e-7 * std::max(1.0, std::fabs(fd.value))) continue;
      ASSERT_LE(std::fabs(sym - fd.value), 1e-5 * std::max(1.0, std::fabs(sym)))
          << print(e) << " d/d" << v;
      ++compared;
    }
    if (compared > 0) ++checked;
  }
  EXPECT_EQ(checked, 500);
}

TEST(Quadrature, Examples) {
  EXPECT_NEAR(quad_adaptive([](double x) { return x; }, 0.0, 1.0, 1e-10), 0.5, 1e-10);
  EXPECT_NEAR(quad_adaptive([](double x) { return std::cos(x); }, 0.0, M_PI / 2, 1e-12), 1.0, 1e-12);
  const double closed = 0.5 * (std::sqrt(7.0) - 1.0);
  EXPECT_NEAR(quad_adaptive([](double x) { return x / std::sqrt(2 * x * x - 1); }, 1.0, 2.0, 1e-12),
              closed, 1e-12);
}

TEST(Quadrature, Orientation) {
  auto f = [](double x) { return std::exp(x); };
  const double ab = quad_adaptive(f, 0.0, 1.0, 1e-12);
  EXPECT_NEAR(quad_adaptive(f, 1.0, 0.0, 1e-12), -ab, 1e-15);
  EXPECT_EQ(quad_adaptive(f, 0.3, 0.3, 1e-12), 0.0);
}

TEST(Quadrature, Additivity) {
  const double tol = 1e-11;
  auto f = [](double x) { return std::sin(3 * x) / (1 + x * x); };
  for (double b : {0.2, 1.1, 2.7}) {
    const double whole = quad_adaptive(f, -1.0, 3.0, tol);
    const double parts = quad_adaptive(f, -1.0, b, tol) + quad_adaptive(f, b, 3.0, tol);
    EXPECT_LE(std::fabs(whole - parts), 2 * tol);
  }
}

TEST(Quadrature, Failures) {
  EXPECT_THROW(quad_adaptive([](double x) { return 1.0 / x; }, 0.0, 1.0, 1e-10), QuadratureError);
  EXPECT_THROW(quad_adaptive([](double x) { return std::sin(1.0 / (x + 1e-9)); }, 0.0, 1.0, 1e-14,
                             {50}),
               QuadratureError);
}
