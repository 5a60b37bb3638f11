#include <cmath>

#include <gtest/gtest.h>

#include "nevang/quadrature.hpp"
#include "nevang/series.hpp"

namespace nevang {
namespace {

TEST(Quadrature, Gk15ExactOnPolynomials) {
  for (int deg = 0; deg <= 22; ++deg) {
    auto f = [deg](double x) { return std::pow(x, deg); };
    const auto r = integrate<double>(f, -1.0, 2.0, QuadratureConfig{});
    const double exact = (std::pow(2.0, deg + 1) - std::pow(-1.0, deg + 1)) / (deg + 1);
    EXPECT_NEAR(r.value, exact, 1e-12 * std::max(1.0, std::abs(exact))) << deg;
  }
}

TEST(Quadrature, EndpointLogSingularity) {
  const auto r = integrate<double>([](double x) { return std::log(x); }, 0.0, 1.0, QuadratureConfig{1e-12, 1e-12});
  EXPECT_NEAR(r.value, -1.0, 1e-10);
}

TEST(Quadrature, InteriorLogSingularityWithGradedCuts) {
  // ∫_0^2 log|x-0.7| dx = 0.7 log 0.7 + 1.3 log 1.3 - 2
  const double exact = 0.7 * std::log(0.7) + 1.3 * std::log(1.3) - 2.0;
  const auto r = integrate<double>([](double x) { return std::log(std::abs(x - 0.7)); }, graded_cuts(0.0, 2.0, {0.7}),
                                   QuadratureConfig{1e-12, 1e-12});
  EXPECT_NEAR(r.value, exact, 1e-10);
  EXPECT_TRUE(r.converged);
}

TEST(Quadrature, ComplexIntegrand) {
  // ∫_0^{2π} e^{ikθ} dθ = 0 for k ≠ 0
  const auto r = integrate<Complex>([](double t) { return std::exp(Complex(0.0, 3.0 * t)); }, 0.0, 2.0 * kPi,
                                    QuadratureConfig{1e-13, 1e-13});
  EXPECT_LT(std::abs(r.value), 1e-12);
}

TEST(Quadrature, Deterministic) {
  auto f = [](double x) { return std::sin(50.0 * x) * std::exp(-x) + std::sqrt(x); };
  const auto a = integrate<double>(f, 0.0, 3.0, QuadratureConfig{1e-12, 1e-12});
  const auto b = integrate<double>(f, 0.0, 3.0, QuadratureConfig{1e-12, 1e-12});
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.panels, b.panels);
}

TEST(Quadrature, ThrowsOnDivergence) {
  QuadratureConfig cfg{1e-12, 1e-12, 64};
  EXPECT_THROW(integrate_or_throw([](double x) { return 1.0 / x; }, {0.0, 1.0}, cfg, "1/x"), NumericalError);
}

}  // namespace
}  // namespace nevang
