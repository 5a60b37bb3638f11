#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "nevang/projective.hpp"

namespace nevang {
namespace {

TEST(Sector, Construction) {
  const Sector s(0.0, kPi);
  EXPECT_DOUBLE_EQ(s.k(), 1.0);
  EXPECT_DOUBLE_EQ(Sector(0.0, 2.0 * kPi).k(), 0.5);
  EXPECT_THROW(Sector(1.0, 1.0), InputError);
  EXPECT_THROW(Sector(0.0, 2.0 * kPi + 0.1), InputError);
  EXPECT_THROW(Sector(0.0, std::nan("")), InputError);
}

TEST(Sector, ClosedAndOpen) {
  const Sector s(-kPi / 4, kPi / 4);
  EXPECT_TRUE(s.in_open(2.0));
  EXPECT_TRUE(s.in_closed(std::polar(3.0, -kPi / 4), 1e-12));
  EXPECT_FALSE(s.in_open(std::polar(3.0, -kPi / 4 - 1e-3)));
  EXPECT_FALSE(s.in_closed(-1.0));
}

TEST(Xi, Examples) {
  const Sector s(0.0, kPi);
  EXPECT_TRUE(xi_contains(s, 10.0, {0.0, 5.0}));
  EXPECT_TRUE(xi_contains(s, 10.0, {0.0, 10.0}));
  EXPECT_FALSE(xi_contains(s, 10.0, {0.0, 0.5}));
  EXPECT_FALSE(xi_contains(s, 10.0, {0.0, 11.0}));
  EXPECT_FALSE(xi_contains(s, 10.0, {0.0, -5.0}));
  EXPECT_FALSE(xi_contains(s, 10.0, 5.0));  // on the boundary ray
  EXPECT_THROW(xi_contains(s, 1.0, {0.0, 5.0}), InputError);
  for (int i = 1; i < 50; ++i) {
    const double phi = kPi * i / 50.0;
    const Complex z = s.tsuji_point(10.0, phi);
    if (std::abs(z) > 1.0) {
      EXPECT_TRUE(xi_contains(s, 10.0, z)) << phi;
    }
  }
}

TEST(Xi, MonotoneAndBounded) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ang(-4.0, 4.0);
  std::uniform_real_distribution<double> mod(0.0, 3.0);
  std::uniform_real_distribution<double> width(0.2, 2.0 * kPi);
  for (int i = 0; i < 4000; ++i) {
    const double a = ang(rng);
    const Sector s(a, a + width(rng));
    const Complex z = std::polar(std::exp(mod(rng)), ang(rng));
    const double r = 1.0 + std::exp(mod(rng));
    if (xi_contains(s, r, z)) {
      EXPECT_GT(std::abs(z), 1.0);
      EXPECT_LE(std::abs(z), r * (1.0 + 1e-12));
      EXPECT_TRUE(xi_contains(s, 2.0 * r, z));
      EXPECT_TRUE(s.in_open(z));
    }
  }
}

TEST(Xi, WholePlane) {
  const Sector s(0.0, 2.0 * kPi);
  EXPECT_TRUE(xi_contains(s, 10.0, {-5.0, 0.0}));
  EXPECT_FALSE(xi_contains(s, 10.0, {5.0, 0.0}));
  EXPECT_TRUE(xi_contains(s, 10.0, std::polar(4.9, kPi / 2)));  // 10 sin²(π/4) = 5
  EXPECT_FALSE(xi_contains(s, 10.0, std::polar(5.1, kPi / 2)));
}

TEST(Curve, SupLogNorm) {
  const Curve f = Curve::parse({"1", "exp(z)"});
  EXPECT_EQ(f.dim(), 1);
  EXPECT_NEAR(sup_log_norm(f, 3.0), 3.0, 1e-14);
  EXPECT_NEAR(sup_log_norm(f, -3.0), 0.0, 1e-14);
  EXPECT_NEAR(sup_log_norm(f, 5000.0), 5000.0, 1e-9);
  EXPECT_THROW(Curve::parse({"0", "0*z"}), DegenerateError);
  EXPECT_THROW(Curve::parse({"z"}), InputError);
  EXPECT_THROW(sup_log_norm(Curve::parse({"z", "z^2"}), 0.0), DegenerateError);
}

TEST(Curve, ReducedCheck) {
  const Sector s(-kPi / 4, kPi / 4);
  const ReducedVerdict bad = reduced_check(Curve::parse({"z-2", "(z-2)*exp(z)"}), s, 10.0, 64);
  EXPECT_FALSE(bad.pass);
  ASSERT_TRUE(bad.witness.has_value());
  EXPECT_LT(std::abs(*bad.witness - Complex(2.0)), 1e-8);
  EXPECT_TRUE(reduced_check(Curve::parse({"sin(z)", "cos(z)"}), s, 10.0, 64).pass);
  EXPECT_TRUE(reduced_check(Curve::parse({"z", "z^2"}), s, 10.0, 64).pass);
  EXPECT_THROW(reduced_check(Curve::parse({"1", "z"}), s, 10.0, 10), InputError);
}

TEST(HomogForm, ParseAndPrint) {
  const HomogForm q = parse_homog("x0*x1 - x2^2");
  EXPECT_EQ(q.n_vars(), 3);
  EXPECT_EQ(q.degree(), 2);
  EXPECT_EQ(q.monomials().size(), 2u);
  EXPECT_EQ(homog_eval(q, {2.0, 3.0, 1.0}), Complex(5.0));
  EXPECT_THROW(parse_homog("x0 + x1^2"), InputError);
  EXPECT_THROW(parse_homog("x0 - x0"), InputError);
  EXPECT_THROW(parse_homog("x0 + x3", 2), ParseError);
  EXPECT_THROW(parse_homog("x0*exp(x1)"), ParseError);
  EXPECT_EQ(parse_homog("x1", 3).n_vars(), 3);
  EXPECT_EQ(parse_homog(to_string(q), 3), q);
  EXPECT_EQ(parse_homog("(x0+x1)^2"), parse_homog("x0^2 + 2*x0*x1 + x1^2"));
}

TEST(HomogForm, JsonRoundTrip) {
  const HomogForm q = parse_homog("(1+2i)*x0^3 - 0.5*x1*x2^2 + x2^3");
  EXPECT_EQ(homog_from_json(to_json(q)), q);
  EXPECT_THROW(homog_from_json(nlohmann::json{{"n_vars", 2}}), InputError);
  nlohmann::json bad = {{"n_vars", 2}, {"degree", 2}, {"monomials", {{{"c", 1.0}, {"e", {1, 0}}}}}};
  EXPECT_THROW(homog_from_json(bad), InputError);
}

TEST(Compose, EvaluatesAndDetectsDegeneracy) {
  const Curve f = Curve::parse({"1", "z", "z^2"});
  EXPECT_THROW(compose(parse_homog("x0*x2 - x1^2"), f), DegenerateError);
  const Composition c = compose(parse_homog("x0*x1 - x2^2"), f);
  const Complex z{0.3, 1.1};
  EXPECT_LT(std::abs(eval(c.expr, z) - (z - z * z * z * z)), 1e-14);
  EXPECT_THROW(compose(parse_homog("x0*x1"), f), InputError);
}

TEST(GeneralPosition, Hyperplanes) {
  EXPECT_TRUE(hyperplanes_general_position({{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}}, 1));
  EXPECT_FALSE(hyperplanes_general_position({{1.0, 0.0}, {2.0, 0.0}, {0.0, 1.0}}, 1));
  EXPECT_THROW(hyperplanes_general_position({{1.0, 0.0}}, 1), InputError);
  EXPECT_TRUE(hyperplanes_general_position({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}}, 2));
  EXPECT_FALSE(hyperplanes_general_position({{1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {1, 1, 1}}, 2));
}

TEST(GeneralPosition, Hypersurfaces) {
  const auto bad = hypersurfaces_general_position_sampled({parse_homog("x0", 2), parse_homog("x0^2", 2)}, 1, 8);
  EXPECT_FALSE(bad.pass);
  ASSERT_EQ(bad.witness.size(), 2u);
  EXPECT_LT(std::abs(bad.witness[0]), 1e-8);
  EXPECT_EQ(bad.witness[1], Complex(1.0));
  EXPECT_TRUE(hypersurfaces_general_position_sampled({parse_homog("x0^3", 2), parse_homog("x1^3", 2)}, 1, 8).pass);
  // (0:0:1) lies on all three.
  EXPECT_FALSE(hypersurfaces_general_position_sampled(
                   {parse_homog("x0*x2 - x1^2"), parse_homog("x0", 3), parse_homog("x1", 3)}, 2, 8)
                   .pass);
  EXPECT_TRUE(hypersurfaces_general_position_sampled(
                  {parse_homog("x0^2", 3), parse_homog("(x0+x1)*x1", 3), parse_homog("(x0+x1+x2)*x2")}, 2, 8)
                  .pass);
}

TEST(Constructions, Target) {
  const std::vector<HyperplaneVec> hs = {{1.0, 0.0}, {1.0, 1.0}};
  const std::vector<HomogForm> qs = {parse_homog("x0", 2), parse_homog("x1", 2)};
  const HomogForm p = build_hypersurface_target(hs, qs, 2);
  EXPECT_EQ(p.degree(), 3);
  EXPECT_EQ(p, parse_homog("x0^3 + x0^2*x1 + 2*x0*x1^2 + x1^3"));
  EXPECT_FALSE(hypersurface_degree_ok(1, 1, 3));
  EXPECT_TRUE(hypersurface_degree_ok(1, 1, 4));
  EXPECT_THROW(build_hypersurface_target(hs, {parse_homog("x0", 2), parse_homog("x1^2")}, 2), InputError);
}

TEST(Constructions, FCurve) {
  const Curve f = Curve::parse({"1", "exp(z)"});
  const Curve F = build_F_curve(f, {parse_homog("x0", 2), parse_homog("x1", 2)}, 1);
  const Complex z{0.4, -0.2};
  EXPECT_LT(std::abs(eval(F.component(0), z) - 1.0), 1e-15);
  EXPECT_LT(std::abs(eval(F.component(1), z) - std::exp(2.0 * z)), 1e-14);
}

}  // namespace
}  // namespace nevang
