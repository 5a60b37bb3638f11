// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [scenario-dir]
//
// Exit status is 0 when every criterion passes, or when the only failures are
// listed as known gaps (printed with the measured numbers that explain them).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nevang/scenario.hpp"

#ifndef NEVANG_SCENARIO_DIR
#define NEVANG_SCENARIO_DIR "scenarios"
#endif

namespace {

using namespace nevang;

struct Outcome {
  bool ok = false;
  std::string detail;
  std::string known_gap;  // nonempty: failure explained by the oracle itself
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Output of one pass over the scenario set: bytes per file, reports by name.
struct Run {
  std::map<std::string, std::string> bytes;
  std::map<std::string, DefectReport> reports;
};

Run run_all(const std::filesystem::path& dir, int threads) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  Run run;
  for (const auto& p : files) {
    Scenario sc = load_scenario(p.string());
    sc.cfg.threads = threads;
    std::string stream;
    for (const CheckSpec& c : sc.checks) {
      const DefectReport rep = run_check(sc, c);
      nlohmann::ordered_json j = to_json(rep);
      j["name"] = c.name;
      stream += j.dump() + "\n";
      run.reports[c.name] = rep;
    }
    run.bytes[p.stem().string() + ".jsonl"] = stream;
    if (sc.table) run.bytes[p.stem().string() + ".csv"] = to_csv(compute_table(sc, *sc.table));
  }
  return run;
}

const DefectReport& report(const Run& run, const std::string& name) {
  const auto it = run.reports.find(name);
  if (it == run.reports.end()) throw InputError("acceptance scenario set has no check named " + name);
  return it->second;
}

bool bounded(const DefectReport& r, double slope, double range_cap = -1) {
  return r.verdict == Verdict::Pass && std::abs(r.fit.b) <= slope && (range_cap < 0 || r.range <= range_cap);
}

// ---------------------------------------------------------------------------

Outcome zero_locator() {
  const Sector s(-kPi / 4, kPi / 4);
  Outcome o;
  const auto zs = zeros_in_region(EntireFunction(parse_expr("sin(z)")), RegionSpec::sector_annulus(s, 1.0, 10.0));
  bool ok = zs.size() == 3;
  double worst = 0;
  for (std::size_t i = 0; ok && i < zs.size(); ++i) {
    worst = std::max(worst, std::abs(zs[i].location - Complex((i + 1) * kPi, 0.0)));
    ok = zs[i].multiplicity == 1;
  }
  ok = ok && worst <= 1e-8;
  const auto cube = zeros_in_region(EntireFunction(parse_expr("(z - 2)^3")), RegionSpec::sector_annulus(s, 1.0, 10.0));
  ok = ok && cube.size() == 1 && cube[0].multiplicity == 3 && std::abs(cube[0].location - 2.0) <= 1e-8;
  o.ok = ok;
  o.detail = "sin: " + std::to_string(zs.size()) + " zeros, max error " + fmt("%.2g", worst) +
             "; (z-2)^3: " + std::to_string(cube.size()) + " zero, multiplicity " +
             (cube.empty() ? std::string("-") : std::to_string(cube[0].multiplicity));
  return o;
}

// Random polynomial with known roots (some repeated), as an expression.
struct RandomPoly {
  std::string text;
  std::vector<ZeroRecord> roots;
};

RandomPoly random_poly(std::mt19937_64& rng, int max_mult) {
  std::uniform_real_distribution<double> logmod(std::log(1.3), std::log(25.0));
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  std::uniform_int_distribution<int> count(2, 6), mult(1, max_mult);
  RandomPoly p;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    const Complex a = std::polar(std::exp(logmod(rng)), ang(rng));
    const int m = mult(rng);
    p.roots.push_back({a, m, 0.0});
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s(z - (%.17g + %.17gi))^%d", i ? "*" : "", a.real(), a.imag(), m);
    p.text += buf;
  }
  return p;
}

Outcome integral_vs_sum() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> start(-kPi, kPi), width(0.4, 2 * kPi);
  const QuadratureConfig qc{1e-13, 1e-13};
  double worst = 0;
  bool located = true;
  for (int trial = 0; trial < 20; ++trial) {
    const RandomPoly p = random_poly(rng, 2);
    const double a = start(rng);
    const Sector s(a, a + width(rng));
    const double r = 30.0;
    auto zs = zeros_in_region(EntireFunction(parse_expr(p.text)), RegionSpec::sector_annulus(s, 1.0, r));
    // oracle: direct summation over the known roots
    for (const Truncation tr : {Truncation::none(), Truncation::at(1)}) {
      const double c_oracle = counting_C_sum(p.roots, s, r, tr);
      const double n_oracle = counting_N_sum(p.roots, s, r, tr);
      const double c_int = counting_C_integral(zs, s, r, tr, qc);
      const double n_int = counting_N_integral(zs, s, r, tr, qc);
      const double c_sum = counting_C_sum(zs, s, r, tr);
      const double n_sum = counting_N_sum(zs, s, r, tr);
      for (auto [x, y] : {std::pair{c_int, c_oracle}, {n_int, n_oracle}, {c_sum, c_oracle}, {n_sum, n_oracle}}) {
        const double e = std::abs(x - y) / std::max(std::abs(y), 1e-12);
        if (y == 0.0 && x == 0.0) continue;
        worst = std::max(worst, e);
      }
    }
    int expected = 0;
    for (const ZeroRecord& z : p.roots) expected += in_closed_annulus(s, 1.0, r, z.location);
    located = located && static_cast<int>(zs.size()) == expected;
  }
  return {worst <= 1e-6 && located, "20 polynomials, max relative difference " + fmt("%.2g", worst), ""};
}

Outcome carleman(const Run& run) {
  bool ok = true;
  std::string d;
  for (const char* name : {"carleman_z_upper", "carleman_z_minus_2_upper", "carleman_z_quarter", "carleman_z_minus_2_quarter"}) {
    const DefectReport& r = report(run, name);
    ok = ok && bounded(r, 0.02, 1.0) && r.radii.size() == 24;
    d += fmt("slope %.2g", r.fit.b) + fmt(" range %.2g; ", r.range);
  }
  const DefectReport& up = report(run, "carleman_z_upper");
  const double rhs = up.find_series("rhs")->back();
  const double err = rel(rhs, 2.0 / kPi);
  ok = ok && err <= 0.02;
  return {ok, d + "rhs(1e3) = " + fmt("%.5f", rhs) + fmt(" vs 2/pi (%.2g rel)", err), ""};
}

Outcome fmt_tsuji(const Run& run) {
  bool ok = true;
  double worst = 0;
  for (const char* name : {"fmt_tsuji_x0", "fmt_tsuji_x1", "fmt_tsuji_sum"}) {
    const DefectReport& r = report(run, name);
    ok = ok && bounded(r, 0.02);
    worst = std::max(worst, std::abs(r.fit.b));
  }
  const double T = char_T_tsuji(Curve::parse({"1", "exp(z)"}), Sector(0.0, kPi), 100.0);
  const double oracle = std::log(100.0) / (2 * kPi);
  ok = ok && rel(T, oracle) <= 0.05;
  return {ok, fmt("max |slope| %.2g; ", worst) + fmt("T(100) = %.6f", T) + fmt(" vs log r/2pi = %.6f", oracle), ""};
}

Outcome fmt_angular(const Run& run) {
  bool ok = true;
  double worst = 0;
  for (const char* name : {"fmt_angular_x0", "fmt_angular_x1", "fmt_angular_sum"}) {
    const DefectReport& r = report(run, name);
    ok = ok && bounded(r, 0.02);
    worst = std::max(worst, std::abs(r.fit.b));
  }
  return {ok, fmt("max |slope| %.2g", worst), ""};
}

Outcome smt_tsuji(const Run& run) {
  const DefectReport& r = report(run, "smt_tsuji_exp");
  int good = 0;
  for (double d : r.defect) good += d >= -1e-6;
  const double frac = static_cast<double>(good) / r.defect.size();
  const double stab = r.find_value("stability_envelope").value_or(1.0);
  const bool slack_ok =
      r.verdict == Verdict::Pass && r.defect.size() == 24 && frac >= 0.9 && *r.lambda <= 5.0 && stab < 0.2;

  // near-tight comparison at the top of the grid
  const double R = r.radii.back();
  const double T = r.find_series("T")->back();
  const double N1 = r.find_series("counting_sum_1")->back();
  double harmonic = 0;  // zeros of 1 + e^z at (2m+1)πi, all on the bisector
  for (int m = 0; (2 * m + 1) * kPi < R; ++m) harmonic += 1.0 / ((2 * m + 1) * kPi) - 1.0 / R;
  const double gap = rel(N1, T);
  const bool near_ok = gap <= 0.10;

  Outcome o;
  o.ok = slack_ok && near_ok;
  o.detail = fmt("slack >= -1e-6 at %.0f%%", 100 * frac) + fmt(", lambda %.3g", *r.lambda) + fmt(", mu %.3g", *r.mu) +
             fmt(", stability %.2g", stab) + fmt("; sum N1(1e3) = %.4f", N1) + fmt(" vs T = %.4f", T) +
             fmt(" (%.1f%% apart)", 100 * gap);
  // the locator reproduces the harmonic sum; the gap is the oracle's own
  // (log r - 0.874)/2π against log r/2π, about 12.7% at r = 1e3
  if (slack_ok && !near_ok && rel(N1, harmonic) <= 1e-6 && rel(T, std::log(R) / (2 * kPi)) <= 1e-3) {
    o.known_gap = fmt("harmonic-sum oracle gives %.4f", harmonic) +
                  ", so the 10% comparison cannot hold at r = 1e3; it first holds near r = 6300";
  }
  return o;
}

Outcome hypersurface(const Run& run) {
  const DefectReport& r = report(run, "hypersurface_smt_n7");
  const DefectReport& neg = report(run, "hypersurface_smt_n3");
  const double eps = r.find_value("epsilon").value_or(1e9);
  const double gp = r.find_value("general_position_residual").value_or(0.0);
  const bool ok = r.verdict == Verdict::Pass && eps <= 0.2 && gp > 0 && neg.verdict == Verdict::HypothesisViolated;
  return {ok,
          std::string("n=7 ") + verdict_name(r.verdict) + fmt(", epsilon %.3g", eps) +
              fmt(", general-position residual %.2g", gp) + "; n=3 " + verdict_name(neg.verdict),
          ""};
}

Outcome wronskian() {
  const Curve f = Curve::parse({"1", "z", "z^2"});
  bool exact = true;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int i = 0; i < 100; ++i) exact = exact && wronskian_value(f, {u(rng), u(rng)}) == Complex(2.0, 0.0);
  const DefectReport a = check_wronskian_identities(Curve::parse({"exp(z)", "z*exp(2*z)", "sin(z) + 2"}),
                                                    std::vector<HyperplaneVec>{{1, 2, 0}, {0, 1, 1}, {1, 0, 3}}, 100);
  const DefectReport b = check_wronskian_identities(f, std::vector<HyperplaneVec>{{1, 2, 0}, {0, 1, 1}, {1, 0, 3}}, 100);
  double fac = 0, forms = 0;
  bool ok = exact;
  for (const DefectReport* r : {&a, &b}) {
    fac = std::max(fac, r->find_value("factorization_max_rel").value_or(1));
    forms = std::max(forms, r->find_value("forms_max_rel").value_or(1));
    ok = ok && r->verdict == Verdict::Pass && r->find_value("skipped").value_or(1) == 0;
  }
  ok = ok && fac <= 1e-8 && forms <= 1e-8;
  return {ok, std::string("W(1,z,z^2) == 2 at 100 points: ") + (exact ? "yes" : "no") +
                  fmt("; factorization %.2g", fac) + fmt(", linear forms %.2g", forms),
          ""};
}

// Zeros with multiplicities replaced, for termwise multiples δ·𝔑¹.
std::vector<ZeroRecord> with_multiplicity(std::vector<ZeroRecord> zs, int m) {
  for (auto& z : zs) z.multiplicity = m;
  return zs;
}

Outcome truncation() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> start(-kPi, kPi), width(0.4, 2 * kPi), rad(3.0, 40.0);
  int violations = 0, comparisons = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const RandomPoly p = random_poly(rng, 4);
    const double a = start(rng);
    const Sector s(a, a + width(rng));
    const double r = rad(rng);
    const Curve f = Curve::parse({"1", p.text});
    const HomogForm q = parse_homog("x1", 2);
    CurveTarget t(f, q, s);
    const auto& zs = t.zeros(r);
    auto check = [&](bool c) {
      ++comparisons;
      violations += !c;
    };
    const double Nfull = counting_N_tsuji(t, r), Cfull = counting_C(t, r);
    double Nprev = 0, Cprev = 0;
    const double N1 = counting_N_tsuji(t, r, Truncation::at(1)), C1 = counting_C(t, r, Truncation::at(1));
    for (int d = 1; d <= 6; ++d) {
      const double Nd = counting_N_tsuji(t, r, Truncation::at(d)), Cd = counting_C(t, r, Truncation::at(d));
      check(Nd >= Nprev && Cd >= Cprev);  // monotone in δ
      check(Nd <= Nfull && Cd <= Cfull);  // capped by the full count
      check(Nd >= N1 && Cd >= C1);
      check(Nd <= counting_N_sum(with_multiplicity(zs, d), s, r) && Cd <= counting_C_sum(with_multiplicity(zs, d), s, r));
      Nprev = Nd;
      Cprev = Cd;
    }
    // above the largest multiplicity truncation changes nothing
    check(counting_N_tsuji(t, r, Truncation::at(4)) == Nfull && counting_C(t, r, Truncation::at(4)) == Cfull);
  }
  return {violations == 0, "50 scenarios, " + std::to_string(comparisons) + " exact comparisons, " +
                               std::to_string(violations) + " violations", ""};
}

Outcome logderiv(const Run& run) {
  bool ok = true;
  double worst = 1;
  for (const char* fn : {"exp", "sin", "gauss"}) {
    for (const char* v : {"angular", "tsuji"}) {
      const DefectReport& r = report(run, std::string("logderiv_") + fn + "_" + v);
      const double frac = r.find_value("satisfied_fraction").value_or(0);
      worst = std::min(worst, frac);
      ok = ok && r.verdict == Verdict::Pass && frac >= 0.9;
    }
  }
  return {ok, fmt("worst fraction within ratio 10: %.2f", worst), ""};
}

Outcome uniqueness(const Run& run) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> logmod(0.0, std::log(60.0)), ang(-kPi, kPi), rad(2.0, 80.0);
  std::uniform_int_distribution<int> mult(1, 7), count(1, 30), level(1, 5);
  int violations = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ZeroRecord> zs;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) zs.push_back({std::polar(std::exp(logmod(rng)), ang(rng)), mult(rng), 0.0});
    const double a = ang(rng);
    const Sector s(a, a + 0.3 + std::abs(ang(rng)) * 1.9);
    const double r = rad(rng);
    const int N = level(rng);
    violations += !(counting_N_sum(zs, s, r, Truncation::at(N)) <= counting_N_sum(with_multiplicity(zs, N), s, r));
    violations += !(counting_C_sum(zs, s, r, Truncation::at(N)) <= counting_C_sum(with_multiplicity(zs, N), s, r));
  }
  const DefectReport& r = report(run, "uniqueness_chain_n7");
  const bool chain = r.find_value("truncation_chain_holds").value_or(0) == 1.0;
  const bool ok = violations == 0 && chain && bounded(r, 0.02);
  return {ok, std::to_string(violations) + " violations in 400 random comparisons; coincidence scenario " +
                  verdict_name(r.verdict) + fmt(", slope %.2g", r.fit.b),
          ""};
}

Outcome determinism(const Run& first, const Run& again, const Run& threaded) {
  int differ = 0;
  for (const auto& [name, text] : first.bytes) {
    const auto a = again.bytes.find(name), b = threaded.bytes.find(name);
    differ += a == again.bytes.end() || a->second != text;
    differ += b == threaded.bytes.end() || b->second != text;
  }
  return {differ == 0 && first.bytes.size() == again.bytes.size(),
          std::to_string(first.bytes.size()) + " outputs, rerun and 2-thread run, " + std::to_string(differ) +
              " mismatches",
          ""};
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : NEVANG_SCENARIO_DIR;
  const auto t0 = std::chrono::steady_clock::now();
  int hard_failures = 0, known = 0;
  auto line = [&](int n, const char* title, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what(), ""};
    }
    std::printf("criterion %2d %s: %s (%s)\n", n, o.ok ? "PASS" : "FAIL", title, o.detail.c_str());
    if (!o.ok && !o.known_gap.empty()) {
      std::printf("             known gap: %s\n", o.known_gap.c_str());
      ++known;
    } else if (!o.ok) {
      ++hard_failures;
    }
    std::fflush(stdout);
  };

  Run first, again, threaded;
  try {
    first = run_all(dir, 1);
    again = run_all(dir, 1);
    threaded = run_all(dir, 2);
  } catch (const std::exception& e) {
    std::printf("scenario set failed to run: %s\n", e.what());
    return 1;
  }

  line(1, "zero locator exactness", zero_locator);
  line(2, "integral and sum forms of counting functions", integral_vs_sum);
  line(3, "Carleman formula defects", [&] { return carleman(first); });
  line(4, "first main theorem, Tsuji", [&] { return fmt_tsuji(first); });
  line(5, "first main theorem, angular", [&] { return fmt_angular(first); });
  line(6, "second main theorem, Tsuji", [&] { return smt_tsuji(first); });
  line(7, "hypersurface inequality and negative control", [&] { return hypersurface(first); });
  line(8, "Wronskian identities", wronskian);
  line(9, "truncation properties", truncation);
  line(10, "logarithmic derivative bounds", [&] { return logderiv(first); });
  line(11, "uniqueness chain", [&] { return uniqueness(first); });
  line(12, "determinism", [&] { return determinism(first, again, threaded); });

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%d hard failures, %d known gaps, %.0f s\n", hard_failures, known, secs);
  return hard_failures == 0 ? 0 : 1;
}
