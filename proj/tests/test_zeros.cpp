#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "nevang/zeros.hpp"

namespace nevang {
namespace {

EntireFunction fn(const char* text) { return EntireFunction(parse_expr(text)); }

TEST(Winding, Examples) {
  EXPECT_EQ(winding_count(fn("z-2"), circle_contour(2.0, 1.0)), 1);
  EXPECT_EQ(winding_count(fn("(z-2)^3"), circle_contour(2.0, 1.0)), 3);
  EXPECT_EQ(winding_count(fn("exp(z)"), circle_contour(0.0, 5.0)), 0);
  EXPECT_EQ(winding_count(fn("sin(z)"), circle_contour(0.0, 10.0)), 7);
  EXPECT_EQ(winding_count(fn("z^2+1"), polygon_contour({{-1, 0.5}, {1, 0.5}, {1, 2}, {-1, 2}})), 1);
  EXPECT_THROW(winding_count(fn("z-1"), circle_contour(0.0, 1.0)), ContourError);
}

TEST(ZerosInRegion, SineZeros) {
  const Sector s(-kPi / 4, kPi / 4);
  const auto zs = zeros_in_region(fn("sin(z)"), RegionSpec::sector_annulus(s, 1.0, 10.0));
  ASSERT_EQ(zs.size(), 3u);
  for (int n = 1; n <= 3; ++n) {
    EXPECT_LT(std::abs(zs[n - 1].location - Complex(n * kPi)), 1e-8);
    EXPECT_EQ(zs[n - 1].multiplicity, 1);
    EXPECT_LT(zs[n - 1].residual, 1e-8);
  }
}

TEST(ZerosInRegion, MultipleZeros) {
  const Sector s(-kPi / 4, kPi / 4);
  auto zs = zeros_in_region(fn("(z-2)^2"), RegionSpec::sector_annulus(s, 1.0, 10.0));
  ASSERT_EQ(zs.size(), 1u);
  EXPECT_EQ(zs[0].multiplicity, 2);
  EXPECT_LT(std::abs(zs[0].location - 2.0), 1e-8);
  zs = zeros_in_region(fn("(z-2)^3"), RegionSpec::sector_annulus(s, 1.0, 10.0));
  ASSERT_EQ(zs.size(), 1u);
  EXPECT_EQ(zs[0].multiplicity, 3);
  EXPECT_LT(std::abs(zs[0].location - 2.0), 1e-8);
  // expanded form, evaluated with cancellation near the root
  zs = zeros_in_region(fn("z^3 - 6*z^2 + 12*z - 8"), RegionSpec::sector_annulus(s, 1.0, 10.0));
  ASSERT_EQ(zs.size(), 1u);
  EXPECT_EQ(zs[0].multiplicity, 3);
  EXPECT_LT(std::abs(zs[0].location - 2.0), 1e-4);
}

TEST(ZerosInRegion, TsujiExample) {
  const Sector s(0.0, kPi);
  const auto zs = zeros_in_region(fn("1+exp(z)"), RegionSpec::tsuji(s, 20.0));
  ASSERT_EQ(zs.size(), 3u);
  for (int m = 0; m < 3; ++m) EXPECT_LT(std::abs(zs[m].location - Complex(0.0, (2 * m + 1) * kPi)), 1e-8);
}

TEST(ZerosInRegion, NonvanishingAndErrors) {
  const Sector s(0.0, kPi);
  EXPECT_TRUE(zeros_in_region(fn("exp(z)"), RegionSpec::sector_annulus(s, 1.0, 50.0)).empty());
  ZeroLocatorConfig bad;
  bad.tol = 1e-3;
  EXPECT_THROW(zeros_in_region(fn("z-2"), RegionSpec::sector_annulus(s, 1.0, 5.0), bad), InputError);
  EXPECT_THROW(RegionSpec::tsuji(s, 1.0), InputError);
  EXPECT_THROW(RegionSpec::sector_annulus(s, 3.0, 2.0), InputError);
}

TEST(ZerosInRegion, WholePlane) {
  const Sector s(0.0, 2.0 * kPi);
  const auto zs = zeros_in_region(fn("sin(z)"), RegionSpec::sector_annulus(s, 1.0, 10.0));
  ASSERT_EQ(zs.size(), 6u);  // ±π, ±2π, ±3π
  for (const auto& z : zs) EXPECT_LT(std::abs(std::sin(z.location)), 1e-8);
}

TEST(ZerosInRegion, BoundaryZeroOnRay) {
  // zero at 2 lies on the ray θ = 0: included in the closed sector
  const auto zs = zeros_in_region(fn("z-2"), RegionSpec::sector_annulus(Sector(0.0, kPi / 2), 1.0, 5.0));
  ASSERT_EQ(zs.size(), 1u);
  EXPECT_LT(std::abs(zs[0].location - 2.0), 1e-10);
}

TEST(ZerosInRegion, PolynomialGroundTruth) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> rad(std::log(1.2), std::log(9.0));
  std::uniform_real_distribution<double> ang(-kPi / 3 + 0.01, kPi / 3 - 0.01);
  std::uniform_int_distribution<int> mult(1, 3);
  const Sector s(-kPi / 3, kPi / 3);
  for (int trial = 0; trial < 12; ++trial) {
    std::vector<std::pair<Complex, int>> roots;
    int degree = 0;
    while (degree < 8) {
      const int m = std::min(mult(rng), 8 - degree);
      const Complex a = std::polar(std::exp(rad(rng)), ang(rng));
      bool far = true;
      for (const auto& [b, mb] : roots) far = far && std::abs(a - b) > 1e-2;
      if (!far) continue;
      roots.push_back({a, m});
      degree += m;
      if (roots.size() >= 4) break;
    }
    Expr e = Expr::constant(1.0);
    for (const auto& [a, m] : roots) e = e * pow(Expr::z() - Expr::constant(a), static_cast<unsigned>(m));
    const auto zs = zeros_in_region(EntireFunction(e), RegionSpec::sector_annulus(s, 1.0, 10.0));
    ASSERT_EQ(zs.size(), roots.size()) << to_string(e);
    for (const auto& [a, m] : roots) {
      bool found = false;
      for (const auto& z : zs) {
        if (std::abs(z.location - a) < 1e-8) {
          EXPECT_EQ(z.multiplicity, m);
          found = true;
        }
      }
      EXPECT_TRUE(found) << a;
    }
  }
}

TEST(ZerosInRegion, TsujiSubsetAndMonotone) {
  const Sector s(0.1, 2.5);
  const EntireFunction g = fn("sin(z) - 0.5*z");
  std::vector<ZeroRecord> prev;
  for (double r : {5.0, 12.0, 25.0}) {
    const auto ann = zeros_in_region(g, RegionSpec::sector_annulus(s, 1.0, r));
    const auto xi = zeros_in_region(g, RegionSpec::tsuji(s, r));
    for (const auto& z : xi) {
      bool in = false;
      for (const auto& a : ann) in = in || (std::abs(a.location - z.location) < 1e-9 && a.multiplicity == z.multiplicity);
      EXPECT_TRUE(in);
    }
    EXPECT_GE(xi.size(), prev.size());
    prev = xi;
  }
}

TEST(ZerosInRegion, Deterministic) {
  const Sector s(0.0, kPi);
  const auto a = zeros_in_region(fn("1 + (1+exp(z))^7*exp(z)"), RegionSpec::tsuji(s, 30.0));
  const auto b = zeros_in_region(fn("1 + (1+exp(z))^7*exp(z)"), RegionSpec::tsuji(s, 30.0));
  ASSERT_EQ(a.size(), b.size());
  EXPECT_GT(a.size(), 10u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].location, b[i].location);
}

}  // namespace
}  // namespace nevang
