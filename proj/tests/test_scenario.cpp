#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "nevang/scenario.hpp"

namespace nevang {
namespace {

json minimal() {
  return json::parse(R"js({
    "schema": 1,
    "sector": {"alpha": 0, "beta": "pi"},
    "curves": {"f": ["1", "exp(z)"]},
    "targets": {"sum": "x0 + x1"},
    "grid": {"r_min": 10, "r_max": 100, "count": 4},
    "table": {"curve": "f", "target": "sum", "functionals": ["T", "m", "N"]},
    "checks": [{"kind": "fmt_tsuji", "params": {"curve": "f", "target": "sum"}}]
  })js");
}

std::string error_of(const json& raw) {
  try {
    parse_scenario(raw);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

TEST(Scenario, ParsesMinimal) {
  const Scenario sc = parse_scenario(minimal());
  EXPECT_EQ(sc.checks.size(), 1u);
  EXPECT_EQ(sc.checks[0].name, "fmt_tsuji");
  EXPECT_DOUBLE_EQ(sc.sector.beta(), kPi);
  EXPECT_EQ(sc.grid.count, 4);
  EXPECT_EQ(sc.hash.size(), 16u);
}

TEST(Scenario, Angles) {
  EXPECT_DOUBLE_EQ(detail::parse_angle(json("-pi/4"), "a"), -kPi / 4);
  EXPECT_DOUBLE_EQ(detail::parse_angle(json("3*pi/2"), "a"), 1.5 * kPi);
  EXPECT_DOUBLE_EQ(detail::parse_angle(json("0.5"), "a"), 0.5);
  EXPECT_DOUBLE_EQ(detail::parse_angle(json(1.25), "a"), 1.25);
  EXPECT_THROW(detail::parse_angle(json("tau"), "a"), InputError);
  EXPECT_THROW(detail::parse_angle(json("pi/0"), "a"), InputError);
}

TEST(Scenario, FieldDiagnostics) {
  json j = minimal();
  j["schema"] = 2;
  EXPECT_NE(error_of(j).find("schema"), std::string::npos);

  j = minimal();
  j["grid"]["r_min"] = 0.5;
  EXPECT_NE(error_of(j).find("grid"), std::string::npos);

  j = minimal();
  j["checks"][0]["params"]["curve"] = "g";
  EXPECT_NE(error_of(j).find("checks[0].params.curve"), std::string::npos);

  j = minimal();
  j["checks"][0]["kind"] = "nonsense";
  EXPECT_NE(error_of(j).find("checks[0].kind"), std::string::npos);

  j = minimal();
  j["curves"]["f"] = {"1", "exp(z"};
  EXPECT_NE(error_of(j), "");

  j = minimal();
  j["sector"]["beta"] = "pi/8";
  j["sector"]["alpha"] = "pi/4";
  EXPECT_NE(error_of(j).find("sector"), std::string::npos);
}

TEST(Table, UnknownFunctionalNamesField) {
  json j = minimal();
  j["table"]["functionals"] = {"T", "Q"};
  const Scenario sc = parse_scenario(j);
  try {
    compute_table(sc, *sc.table);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("table.functionals[1]"), std::string::npos);
  }
}

TEST(Table, ExpCharacteristicAndRoundTrip) {
  const Scenario sc = parse_scenario(minimal());
  const Table t = compute_table(sc, *sc.table);
  ASSERT_EQ(t.rows.size(), 4u);
  EXPECT_EQ(t.columns, (std::vector<std::string>{"r", "T", "m", "N"}));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double r = t.rows[i][0];
    EXPECT_NEAR(t.rows[i][1], std::log(r) / (2 * kPi), 0.05 * t.rows[i][1] + 0.02);
    if (i) {
      EXPECT_GT(t.rows[i][1], t.rows[i - 1][1]);
    }
  }
  const std::string csv = to_csv(t);
  const Table back = parse_csv(csv);
  EXPECT_EQ(back.columns, t.columns);
  ASSERT_EQ(back.rows.size(), t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    for (std::size_t k = 0; k < t.rows[i].size(); ++k) EXPECT_EQ(back.rows[i][k], t.rows[i][k]);
  }
  EXPECT_EQ(to_csv(back), csv);
}

TEST(Table, ThreadsDoNotChangeBytes) {
  Scenario a = parse_scenario(minimal());
  Scenario b = parse_scenario(minimal());
  b.cfg.threads = 3;
  EXPECT_EQ(to_csv(compute_table(a, *a.table)), to_csv(compute_table(b, *b.table)));
  EXPECT_EQ(to_json(run_check(a, a.checks[0])).dump(), to_json(run_check(b, b.checks[0])).dump());
}

TEST(Csv, Errors) {
  EXPECT_THROW(parse_csv(""), InputError);
  EXPECT_THROW(parse_csv("r,T\n1,2\n3\n"), InputError);
  EXPECT_THROW(parse_csv("r,T\n1,x\n"), InputError);
}

TEST(Csv, ShortestRoundTrip) {
  EXPECT_EQ(format_double(10.0), "10");
  EXPECT_EQ(format_double(0.1), "0.1");
  for (double x : {kPi, 1e-300, 123456789.125, -2.5e17}) EXPECT_EQ(std::stod(format_double(x)), x);
}

}  // namespace
}  // namespace nevang
