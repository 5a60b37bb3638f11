#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "nevang/expr.hpp"

namespace nevang {
namespace {

double rel_err(Complex a, Complex b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

// Random expression generator over the whole grammar, depth-limited.
Expr random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 9);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  switch (pick(rng)) {
    case 0: return Expr::constant({coef(rng), coef(rng)});
    case 1: return Expr::z();
    case 2: return random_expr(rng, depth - 1) + random_expr(rng, depth - 1);
    case 3: return random_expr(rng, depth - 1) - random_expr(rng, depth - 1);
    case 4: return random_expr(rng, depth - 1) * random_expr(rng, depth - 1);
    case 5: return pow(random_expr(rng, depth - 1), std::uniform_int_distribution<unsigned>(0, 3)(rng));
    case 6: return exp(random_expr(rng, depth - 1) * Expr::constant(0.3));
    case 7: return sin(random_expr(rng, depth - 1));
    case 8: return cos(random_expr(rng, depth - 1));
    default: return -random_expr(rng, depth - 1);
  }
}

TEST(ParseExpr, GrammarExamples) {
  EXPECT_EQ(parse_expr("exp(2*z)+1"), exp(Expr::constant(2.0) * Expr::z()) + Expr::constant(1.0));
  EXPECT_EQ(parse_expr("z^3 - (1+2i)*z"), pow(Expr::z(), 3) - Expr::constant({1.0, 2.0}) * Expr::z());
  EXPECT_EQ(parse_expr(" 2.5i "), Expr::constant({0.0, 2.5}));
  EXPECT_EQ(parse_expr("(1+2)"), Expr::constant(1.0) + Expr::constant(2.0));
  EXPECT_EQ(parse_expr("-z^2"), pow(-Expr::z(), 2));
  EXPECT_EQ(parse_expr("1e-3*z"), Expr::constant(1e-3) * Expr::z());
}

TEST(ParseExpr, DivisionRejectedWithOffset) {
  try {
    parse_expr("z/2");
    FAIL() << "division accepted";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 1u);
    EXPECT_NE(std::string(e.what()).find("MeroFn"), std::string::npos);
  }
}

TEST(ParseExpr, SyntaxErrors) {
  EXPECT_THROW(parse_expr(""), ParseError);
  EXPECT_THROW(parse_expr("z +"), ParseError);
  EXPECT_THROW(parse_expr("log(z)"), ParseError);
  EXPECT_THROW(parse_expr("z^-1"), ParseError);
  EXPECT_THROW(parse_expr("exp z"), ParseError);
  EXPECT_THROW(parse_expr("(z"), ParseError);
  EXPECT_THROW(parse_expr("w"), ParseError);
}

TEST(ParseExpr, PrintParseFixedPoint) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 400; ++i) {
    const Expr e = random_expr(rng, 4);
    const std::string text = to_string(e);
    const Expr back = parse_expr(text);
    EXPECT_EQ(back, e) << text;
    EXPECT_EQ(to_string(back), text);
  }
}

TEST(EvalJet, Examples) {
  auto j = eval_jet(parse_expr("exp(z)"), 0.0, 2);
  ASSERT_EQ(j.derivs.size(), 3u);
  for (const Complex& d : j.derivs) EXPECT_NEAR(std::abs(d - Complex(1.0)), 0.0, 1e-15);

  j = eval_jet(parse_expr("z^2"), 3.0, 2);
  EXPECT_EQ(j.derivs[0], Complex(9.0));
  EXPECT_EQ(j.derivs[1], Complex(6.0));
  EXPECT_EQ(j.derivs[2], Complex(2.0));

  j = eval_jet(parse_expr("sin(z)"), 0.0, 3);
  EXPECT_EQ(j.derivs[0], Complex(0.0));
  EXPECT_EQ(j.derivs[1], Complex(1.0));
  EXPECT_EQ(j.derivs[2], Complex(0.0));
  EXPECT_EQ(j.derivs[3], Complex(-1.0));
}

TEST(EvalJet, OrderZeroIsPlainEvaluation) {
  const Expr e = parse_expr("cos(z)*exp(z^2) - (2-1i)*z^3");
  const Complex z{0.3, -0.7};
  const Complex direct = std::cos(z) * std::exp(z * z) - Complex(2, -1) * z * z * z;
  EXPECT_LT(rel_err(eval_jet(e, z, 5).derivs[0], direct), 1e-14);
  EXPECT_LT(rel_err(eval(e, z), direct), 1e-14);
}

TEST(EvalJet, OrderCap) {
  EXPECT_THROW(eval_jet(Expr::z(), 0.0, kMaxJetOrder + 1), InputError);
  EXPECT_NO_THROW(eval_jet(Expr::z(), 0.0, kMaxJetOrder));
}

TEST(EvalJet, MatchesFiniteDifferences) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 60; ++trial) {
    const Expr e = random_expr(rng, 3);
    const Complex z{u(rng), u(rng)};
    const Jet jet = eval_jet(e, z, 3);
    const double h = 1e-3;
    auto f = [&](Complex w) { return eval(e, w); };
    // Five-point stencils along the real axis (holomorphic, so d/dz = d/dx).
    const Complex d1 = (-f(z + 2 * h) + 8.0 * f(z + h) - 8.0 * f(z - h) + f(z - 2 * h)) / (12 * h);
    const Complex d2 = (-f(z + 2 * h) + 16.0 * f(z + h) - 30.0 * f(z) + 16.0 * f(z - h) - f(z - 2 * h)) / (12 * h * h);
    const Complex d3 = (f(z + 2 * h) - 2.0 * f(z + h) + 2.0 * f(z - h) - f(z - 2 * h)) / (2 * h * h * h);
    const double scale = 1.0 + std::abs(jet.derivs[0]) + std::abs(jet.derivs[1]) + std::abs(jet.derivs[2]) + std::abs(jet.derivs[3]);
    EXPECT_LT(std::abs(jet.derivs[1] - d1) / scale, 1e-6) << to_string(e);
    EXPECT_LT(std::abs(jet.derivs[2] - d2) / scale, 1e-5) << to_string(e);
    EXPECT_LT(std::abs(jet.derivs[3] - d3) / scale, 1e-4) << to_string(e);
  }
}

TEST(EvalJet, LinearityAndLeibniz) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Expr f = random_expr(rng, 3);
    const Expr g = random_expr(rng, 3);
    const Complex a{u(rng), u(rng)};
    const Complex b{u(rng), u(rng)};
    const Complex z{u(rng), u(rng)};
    const int m = 5;
    const Jet jf = eval_jet(f, z, m);
    const Jet jg = eval_jet(g, z, m);
    const Jet lin = eval_jet(Expr::constant(a) * f + Expr::constant(b) * g, z, m);
    const Jet prod = eval_jet(f * g, z, m);
    for (int j = 0; j <= m; ++j) {
      const Complex expect_lin = a * jf.derivs[j] + b * jg.derivs[j];
      const double scale = 1.0 + std::abs(a * jf.derivs[j]) + std::abs(b * jg.derivs[j]);
      EXPECT_LT(std::abs(lin.derivs[j] - expect_lin) / scale, 1e-12);
      Complex leibniz{};
      double binom = 1.0;
      double lscale = 1.0;
      for (int i = 0; i <= j; ++i) {
        leibniz += binom * jf.derivs[i] * jg.derivs[j - i];
        lscale += std::abs(binom * jf.derivs[i] * jg.derivs[j - i]);
        binom = binom * (j - i) / (i + 1);
      }
      EXPECT_LT(std::abs(prod.derivs[j] - leibniz) / lscale, 1e-12);
    }
  }
}

TEST(EvalJet, ScaledEvaluationBeyondDoubleRange) {
  const EntireFunction f(parse_expr("1 + exp(z)"));
  const ScaledSeries s = f.taylor(1.0e4, 1);
  EXPECT_NEAR(s.log_abs(0), 1.0e4, 1e-9);
  // g'/g stays exact in scaled form.
  EXPECT_NEAR(std::abs(s.coeffs[1] / s.coeffs[0] - Complex(1.0)), 0.0, 1e-14);
  const ScaledSeries t = EntireFunction(parse_expr("sin(z)")).taylor({0.0, 2000.0}, 1);
  EXPECT_NEAR(t.log_abs(0), 2000.0 - std::log(2.0), 1e-9);
  EXPECT_THROW(eval_jet(parse_expr("exp(z)"), 1.0e4, 1), OverflowError);
  EXPECT_THROW(EntireFunction(parse_expr("exp(exp(z))")).taylor(800.0, 0), OverflowError);
}

TEST(Derivative, SymbolicMatchesJet) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const Expr e = random_expr(rng, 3);
    const Complex z{u(rng), u(rng)};
    const Jet jet = eval_jet(e, z, 2);
    EXPECT_LT(rel_err(eval(derivative(e), z), jet.derivs[1]), 1e-11) << to_string(e);
    EXPECT_LT(rel_err(eval(derivative(e, 2), z), jet.derivs[2]), 1e-10) << to_string(e);
  }
}

TEST(LogPlus, Values) {
  EXPECT_DOUBLE_EQ(log_plus(std::exp(1.0)), 1.0);
  EXPECT_EQ(log_plus(0.5), 0.0);
  EXPECT_EQ(log_plus(1.0), 0.0);
  EXPECT_EQ(log_plus(0.0), 0.0);
}

}  // namespace
}  // namespace nevang
