#pragma once

// Numerical checks of the main inequalities of angular and Tsuji value
// distribution over a grid of radii.
//
// A check evaluates both sides at each radius and turns the comparison into
// a DefectReport: "= … + O(1)" becomes a boundedness test on the defect (fitted
// slope against log r, magnitude cap); "≤ … + O(log T + log r)" becomes a
// nonnegative envelope fit of λ(log⁺T + log r) + μ plus a satisfaction count
// and an exceptional-measure budget for the points that still fail.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "nevang/errors.hpp"
#include "nevang/nevanlinna.hpp"
#include "nevang/projective.hpp"
#include "nevang/wronskian.hpp"
#include "nevang/zeros.hpp"

namespace nevang {

// ---------------------------------------------------------------------------
// Grid

struct RGrid {
  enum class Spacing { Geometric, Linear };

  double r_min = 10.0;
  double r_max = 1000.0;
  int count = 24;
  Spacing spacing = Spacing::Geometric;

  void validate() const {
    if (!(r_min > 1.0) || !std::isfinite(r_min)) throw InputError("grid r_min must exceed 1");
    if (!std::isfinite(r_max) || r_max < r_min) throw InputError("grid r_max must be finite and at least r_min");
    if (count < 1) throw InputError("grid count must be positive");
    if (count > 1 && !(r_max > r_min)) throw InputError("grid with several points needs r_max > r_min");
  }

  std::vector<double> nominal() const {
    validate();
    std::vector<double> r(count);
    for (int i = 0; i < count; ++i) {
      const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
      r[i] = spacing == Spacing::Geometric ? r_min * std::pow(r_max / r_min, t) : r_min + (r_max - r_min) * t;
    }
    r.back() = r_max;
    return r;
  }
};

inline const char* spacing_name(RGrid::Spacing s) { return s == RGrid::Spacing::Geometric ? "geometric" : "linear"; }

// ---------------------------------------------------------------------------
// Configuration

struct LabConfig {
  double slope_tol = 0.02;
  double bound_cap_per_degree = 50.0;
  std::optional<double> range_cap;  // extra cap on max − min of the defect
  double slack_tol = 1e-6;
  double satisfaction = 0.9;
  double exceptional_fraction = 0.05;
  double lambda_max = 5.0;
  double ratio_bound = 10.0;
  double epsilon_max = 0.2;
  int gp_budget = 32;
  int threads = 1;
  std::uint64_t seed = 0;
  QuadratureConfig quad;
  ZeroLocatorConfig zeros;
};

// ---------------------------------------------------------------------------
// Reports

enum class Verdict { Pass, Fail, Inconclusive, HypothesisViolated };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
    case Verdict::HypothesisViolated: return "hypothesis-violated";
  }
  return "?";
}

struct LinearFit {
  double a = 0.0;  // intercept
  double b = 0.0;  // slope against log r
  double rms = 0.0;
};

struct DefectReport {
  std::string check;
  std::string scenario_hash;
  RGrid grid;
  std::vector<double> radii;  // realized
  std::vector<double> defect;
  LinearFit fit;
  double max_abs = 0.0;
  double range = 0.0;
  std::optional<double> lambda;
  std::optional<double> mu;
  double exceptional_measure = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::vector<std::string> notes;
  std::vector<std::pair<std::string, std::vector<double>>> series;
  std::vector<std::pair<std::string, double>> values;

  const std::vector<double>* find_series(std::string_view name) const {
    for (const auto& [k, v] : series) {
      if (k == name) return &v;
    }
    return nullptr;
  }
  std::optional<double> find_value(std::string_view name) const {
    for (const auto& [k, v] : values) {
      if (k == name) return v;
    }
    return std::nullopt;
  }
};

inline nlohmann::ordered_json to_json(const DefectReport& r) {
  nlohmann::ordered_json j;
  j["check"] = r.check;
  j["scenario_hash"] = r.scenario_hash;
  j["grid"] = {{"r_min", r.grid.r_min},
               {"r_max", r.grid.r_max},
               {"count", r.grid.count},
               {"spacing", spacing_name(r.grid.spacing)},
               {"radii", r.radii}};
  j["defect"] = r.defect;
  j["fit"] = {{"a", r.fit.a}, {"b", r.fit.b}, {"rms", r.fit.rms}};
  j["max_abs"] = r.max_abs;
  j["range"] = r.range;
  j["lambda"] = r.lambda ? nlohmann::ordered_json(*r.lambda) : nlohmann::ordered_json(nullptr);
  j["mu"] = r.mu ? nlohmann::ordered_json(*r.mu) : nlohmann::ordered_json(nullptr);
  j["exceptional_measure"] = r.exceptional_measure;
  j["verdict"] = verdict_name(r.verdict);
  j["notes"] = r.notes;
  nlohmann::ordered_json s = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.series) s[k] = v;
  j["series"] = s;
  nlohmann::ordered_json vals = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.values) vals[k] = v;
  j["values"] = vals;
  return j;
}

// 64-bit FNV-1a, as 16 hex digits.
inline std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[i] = digits[h & 0xF];
  return out;
}

// Least-squares line y ≈ a + b log r.
inline LinearFit fit_log_linear(const std::vector<double>& r, const std::vector<double>& y) {
  LinearFit f;
  const std::size_t n = r.size();
  if (n == 0) return f;
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += std::log(r[i]);
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(r[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (y[i] - my);
  }
  f.b = sxx > 0 ? sxy / sxx : 0.0;
  f.a = my - f.b * mx;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (f.a + f.b * std::log(r[i]));
    ss += e * e;
  }
  f.rms = std::sqrt(ss / n);
  return f;
}

// I(x) = min{k ∈ ℕ : k > x}
inline long long int_ceil_strict(double x) {
  if (!std::isfinite(x)) throw InputError("I(x) needs a finite argument");
  if (x < 0) return 0;
  return static_cast<long long>(std::floor(x)) + 1;
}

// log10 of n^n d^{n²+n} (19 n I(1/ε))^n deg(V)^{n+1} / n!
inline double variety_M_bound_log10(int n, int d, double eps, int deg_v = 1) {
  if (n < 1 || d < 1 || !(eps > 0) || deg_v < 1) throw InputError("M bound needs n, d, deg V ≥ 1 and ε > 0");
  const double I = static_cast<double>(int_ceil_strict(1.0 / eps));
  const double ln = n * std::log(n) + (double(n) * n + n) * std::log(d) + n * std::log(19.0 * n * I) +
                    (n + 1) * std::log(deg_v) - std::lgamma(n + 1.0);
  return ln / std::log(10.0);
}

namespace detail {

// Evaluates fn(i) for i in [0, n) on up to `threads` threads; results land
// by index, and the lowest-index exception is rethrown.
template <class T, class F>
std::vector<T> parallel_map(int n, int threads, F&& fn) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> err(n);
  const int t = std::clamp(threads, 1, std::max(1, n));
  auto work = [&](int w) {
    for (int i = w; i < n; i += t) {
      try {
        out[i] = fn(i);
      } catch (...) {
        err[i] = std::current_exception();
      }
    }
  };
  if (t == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < t; ++w) pool.emplace_back(work, w);
    for (std::thread& th : pool) th.join();
  }
  for (const auto& e : err) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

// Width of each grid point's cell (midpoints to neighbours, clipped to the grid).
inline std::vector<double> cell_widths(const std::vector<double>& r) {
  const std::size_t n = r.size();
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = i == 0 ? r[0] : 0.5 * (r[i - 1] + r[i]);
    const double hi = i + 1 == n ? r[n - 1] : 0.5 * (r[i] + r[i + 1]);
    w[i] = hi - lo;
  }
  return w;
}

// Radius warm-up target: every realized radius stays below this.
inline double warm_radius(const RGrid& g) { return g.r_max * (1.0 + 1e-4); }

// Nudges radii off zeros sitting on |z| = r or on the Ξ boundary.
inline std::vector<double> realize(const std::vector<double>& nominal, const Sector& s,
                                   const std::vector<const std::vector<ZeroRecord>*>& sets, std::vector<std::string>& notes) {
  std::vector<double> out = nominal;
  for (std::size_t i = 0; i < out.size(); ++i) {
    int bumps = 0;
    auto touching = [&](double r) {
      for (const auto* zs : sets) {
        if (contact_radius(*zs, s, r)) return true;
      }
      return false;
    };
    while (touching(out[i]) && bumps < 50) {
      out[i] *= 1.0 + 1e-6;
      ++bumps;
    }
    if (bumps > 0) notes.push_back("radius " + std::to_string(i) + " perturbed off a zero contact");
  }
  return out;
}

inline void fill_stats(DefectReport& rep) {
  rep.fit = fit_log_linear(rep.radii, rep.defect);
  rep.max_abs = 0.0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double d : rep.defect) {
    rep.max_abs = std::max(rep.max_abs, std::abs(d));
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  rep.range = rep.defect.empty() ? 0.0 : hi - lo;
}

// O(1): flat fit and bounded magnitude.
inline void bounded_verdict(DefectReport& rep, double cap, const LabConfig& cfg) {
  fill_stats(rep);
  rep.values.emplace_back("bound_cap", cap);
  if (rep.defect.size() < 3) {
    rep.verdict = Verdict::Inconclusive;
    rep.notes.push_back("fewer than 3 grid points: no slope fit");
    return;
  }
  bool ok = std::abs(rep.fit.b) <= cfg.slope_tol && rep.max_abs <= cap;
  if (cfg.range_cap) ok = ok && rep.range <= *cfg.range_cap;
  rep.verdict = ok ? Verdict::Pass : Verdict::Fail;
}

// Satisfaction rule for ‖-inequalities: violation[i] marks a failing radius.
inline bool satisfied(DefectReport& rep, const std::vector<bool>& violation, const LabConfig& cfg) {
  const auto w = cell_widths(rep.radii);
  int bad = 0;
  rep.exceptional_measure = 0.0;
  for (std::size_t i = 0; i < violation.size(); ++i) {
    if (violation[i]) {
      ++bad;
      rep.exceptional_measure += w[i];
    }
  }
  const double total = rep.radii.back() - rep.radii.front();
  const double frac = violation.empty() ? 1.0 : 1.0 - static_cast<double>(bad) / violation.size();
  rep.values.emplace_back("satisfied_fraction", frac);
  rep.values.emplace_back("exceptional_budget", cfg.exceptional_fraction * total);
  return frac >= cfg.satisfaction && rep.exceptional_measure <= cfg.exceptional_fraction * total;
}

struct Envelope {
  double lambda = 0.0;
  double mu = 0.0;
};

// Least upper envelope: minimise Σ (λ g_i + μ) subject to λ g_i + μ ≥ e_i,
// λ, μ ≥ 0 (g_i > 0). A two-variable LP, solved over its vertex candidates.
inline Envelope envelope_fit(const std::vector<double>& g, const std::vector<double>& e) {
  const std::size_t n = g.size();
  std::vector<Envelope> cand{{0.0, 0.0}};
  for (std::size_t i = 0; i < n; ++i) {
    cand.push_back({0.0, std::max(0.0, e[i])});
    if (g[i] > 0) cand.push_back({std::max(0.0, e[i] / g[i]), 0.0});
    for (std::size_t j = i + 1; j < n; ++j) {
      if (g[j] == g[i]) continue;
      const double lam = (e[j] - e[i]) / (g[j] - g[i]);
      const double mu = e[i] - lam * g[i];
      if (lam >= 0 && mu >= 0) cand.push_back({lam, mu});
    }
  }
  double sg = 0;
  for (double x : g) sg += x;
  Envelope best{0.0, std::numeric_limits<double>::infinity()};
  double best_obj = std::numeric_limits<double>::infinity();
  for (const Envelope& c : cand) {
    bool feasible = true;
    for (std::size_t i = 0; i < n && feasible; ++i) {
      const double scale = std::max({1.0, std::abs(e[i]), c.lambda * g[i]});
      feasible = c.lambda * g[i] + c.mu >= e[i] - 1e-12 * scale;
    }
    if (!feasible) continue;
    const double obj = c.lambda * sg + c.mu * n;
    if (obj < best_obj || (obj == best_obj && c.lambda < best.lambda)) {
      best_obj = obj;
      best = c;
    }
  }
  return best;
}

// ‖ (lhs ≤ rhs0 + O(g)) over the grid: envelope fit, slack, verdict.
inline void slack_verdict(DefectReport& rep, const std::vector<double>& lhs, const std::vector<double>& rhs0,
                          const std::vector<double>& g, const LabConfig& cfg) {
  const std::size_t n = lhs.size();
  std::vector<double> e(n);
  for (std::size_t i = 0; i < n; ++i) e[i] = lhs[i] - rhs0[i];
  const Envelope env = envelope_fit(g, e);
  rep.lambda = env.lambda;
  rep.mu = env.mu;
  rep.defect.assign(n, 0.0);
  std::vector<bool> viol(n);
  for (std::size_t i = 0; i < n; ++i) {
    rep.defect[i] = rhs0[i] + env.lambda * g[i] + env.mu - lhs[i];
    viol[i] = rep.defect[i] < -cfg.slack_tol;
  }
  fill_stats(rep);

  // Stability of the fit under dropping 10% of the grid.
  if (n >= 10) {
    std::mt19937_64 rng(cfg.seed ^ 0x5157ULL);
    const std::size_t drop = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(0.1 * n)));
    double dl = 0, dm = 0, de = 0;
    const double gmax = *std::max_element(g.begin(), g.end());
    const double top = env.lambda * gmax + env.mu;
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<std::size_t> idx(n);
      for (std::size_t i = 0; i < n; ++i) idx[i] = i;
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(n - drop);
      std::sort(idx.begin(), idx.end());
      std::vector<double> gs, es;
      for (std::size_t i : idx) {
        gs.push_back(g[i]);
        es.push_back(e[i]);
      }
      const Envelope sub = envelope_fit(gs, es);
      dl = std::max(dl, std::abs(sub.lambda - env.lambda) / std::max(std::abs(env.lambda), 1e-6));
      dm = std::max(dm, std::abs(sub.mu - env.mu) / std::max(std::abs(env.mu), 1e-6));
      // the envelope itself at the top of the grid; robust when λ or μ is near 0
      de = std::max(de, std::abs(sub.lambda * gmax + sub.mu - top) / std::max(top, 1e-6));
    }
    rep.values.emplace_back("stability_lambda", dl);
    rep.values.emplace_back("stability_mu", dm);
    rep.values.emplace_back("stability_envelope", de);
  }
  const bool sat = satisfied(rep, viol, cfg);
  const bool ok = sat && env.lambda <= cfg.lambda_max && env.mu <= cfg.bound_cap_per_degree;
  rep.verdict = n < 3 ? Verdict::Inconclusive : (ok ? Verdict::Pass : Verdict::Fail);
}

inline DefectReport start(const char* check, const RGrid& grid) {
  DefectReport rep;
  rep.check = check;
  rep.grid = grid;
  grid.validate();
  return rep;
}

inline double log_plus_sum(double t, double r) { return log_plus(t) + std::log(r); }

inline void check_general_position(const std::vector<HyperplaneVec>& hs, int n) {
  if (static_cast<int>(hs.size()) < n + 1) throw InputError("need at least n+1 hyperplanes");
  for (const HyperplaneVec& h : hs) {
    if (static_cast<int>(h.size()) != n + 1) throw InputError("hyperplane dimension does not match the curve");
  }
  if (!hyperplanes_general_position(hs, n)) throw DegenerateError("hyperplanes are not in general position");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// First main theorem

// d·S − (A + B + C)
inline DefectReport check_fmt_angular(const Curve& f, const HomogForm& q, const Sector& s, const RGrid& grid,
                                      const LabConfig& cfg = {}) {
  DefectReport rep = detail::start("fmt_angular", grid);
  CurveTarget t(f, q, s, cfg.zeros);
  t.zeros(detail::warm_radius(grid));
  rep.radii = detail::realize(grid.nominal(), s, {&t.zeros(detail::warm_radius(grid))}, rep.notes);
  struct Row {
    double S, A, B, C;
  };
  const auto rows = detail::parallel_map<Row>(static_cast<int>(rep.radii.size()), cfg.threads, [&](int i) {
    const double r = rep.radii[i];
    return Row{char_S(f, s, r, cfg.quad), proximity_A(t, r, cfg.quad), proximity_B(t, r, cfg.quad), counting_C(t, r)};
  });
  const int d = t.degree();
  std::vector<double> S, A, B, C;
  for (const Row& row : rows) {
    S.push_back(row.S);
    A.push_back(row.A);
    B.push_back(row.B);
    C.push_back(row.C);
    rep.defect.push_back(d * row.S - (row.A + row.B + row.C));
  }
  rep.series = {{"S", S}, {"A", A}, {"B", B}, {"C", C}};
  rep.values.emplace_back("degree", d);
  if (d == 1) rep.notes.push_back("hyperplane target (d = 1)");
  detail::bounded_verdict(rep, cfg.bound_cap_per_degree * d, cfg);
  return rep;
}

// d·𝔗 − (𝔪 + 𝔑)
inline DefectReport check_fmt_tsuji(const Curve& f, const HomogForm& q, const Sector& s, const RGrid& grid,
                                    const LabConfig& cfg = {}) {
  DefectReport rep = detail::start("fmt_tsuji", grid);
  CurveTarget t(f, q, s, cfg.zeros);
  rep.radii = detail::realize(grid.nominal(), s, {&t.zeros(detail::warm_radius(grid))}, rep.notes);
  struct Row {
    double T, m, N;
  };
  const auto rows = detail::parallel_map<Row>(static_cast<int>(rep.radii.size()), cfg.threads, [&](int i) {
    const double r = rep.radii[i];
    return Row{char_T_tsuji(f, s, r, cfg.quad), proximity_m_tsuji(t, r, cfg.quad), counting_N_tsuji(t, r)};
  });
  const int d = t.degree();
  std::vector<double> T, m, N;
  for (const Row& row : rows) {
    T.push_back(row.T);
    m.push_back(row.m);
    N.push_back(row.N);
    rep.defect.push_back(d * row.T - (row.m + row.N));
  }
  rep.series = {{"T", T}, {"m", m}, {"N", N}};
  rep.values.emplace_back("degree", d);
  if (d == 1) rep.notes.push_back("hyperplane target (d = 1)");
  detail::bounded_verdict(rep, cfg.bound_cap_per_degree * d, cfg);
  return rep;
}

// ---------------------------------------------------------------------------
// Scalar identities and logarithmic derivatives

// [C(r,1/f) − C(r,f)] − (ray and arc integrals of log|f|)
inline DefectReport check_carleman(const MeroFn& mf, const Sector& s, const RGrid& grid, const LabConfig& cfg = {}) {
  DefectReport rep = detail::start("carleman", grid);
  ScalarContext c(mf, s, cfg.zeros);
  const double w = detail::warm_radius(grid);
  rep.radii = detail::realize(grid.nominal(), s, {&c.zeros(w), &c.poles(w)}, rep.notes);
  struct Row {
    double lhs, rhs;
  };
  const auto rows = detail::parallel_map<Row>(static_cast<int>(rep.radii.size()), cfg.threads, [&](int i) {
    const double r = rep.radii[i];
    const double lhs = counting_C_sum(c.zeros(r), s, r) - counting_C_sum(c.poles(r), s, r);
    return Row{lhs, carleman_rhs(c, r, cfg.quad)};
  });
  std::vector<double> L, R;
  for (const Row& row : rows) {
    L.push_back(row.lhs);
    R.push_back(row.rhs);
    rep.defect.push_back(row.lhs - row.rhs);
  }
  rep.series = {{"lhs", L}, {"rhs", R}};
  detail::bounded_verdict(rep, cfg.bound_cap_per_degree, cfg);
  return rep;
}

// [𝔑(r,1/f) − 𝔑(r,f)] − (1/2π)∫ log|f| dφ/(r^k sin²φ)
inline DefectReport check_tsuji_jensen(const MeroFn& mf, const Sector& s, const RGrid& grid, const LabConfig& cfg = {}) {
  DefectReport rep = detail::start("tsuji_jensen", grid);
  ScalarContext c(mf, s, cfg.zeros);
  const double w = detail::warm_radius(grid);
  rep.radii = detail::realize(grid.nominal(), s, {&c.zeros(w), &c.poles(w)}, rep.notes);
  struct Row {
    double lhs, rhs;
  };
  const auto rows = detail::parallel_map<Row>(static_cast<int>(rep.radii.size()), cfg.threads, [&](int i) {
    const double r = rep.radii[i];
    const double lhs = counting_N_sum(c.zeros(r), s, r) - counting_N_sum(c.poles(r), s, r);
    return Row{lhs, tsuji_jensen_rhs(c, r, cfg.quad)};
  });
  std::vector<double> L, R;
  for (const Row& row : rows) {
    L.push_back(row.lhs);
    R.push_back(row.rhs);
    rep.defect.push_back(row.lhs - row.rhs);
  }
  rep.series = {{"lhs", L}, {"rhs", R}};
  detail::bounded_verdict(rep, cfg.bound_cap_per_degree, cfg);
  return rep;
}

// Angular: S(r, f^(k)/f) / (log⁺T(r,f) + log r), T the plane characteristic.
// Tsuji:   𝔪(r, f^(k)/f) / (log⁺𝔗(r,f) + log r).
inline DefectReport check_logderiv(const MeroFn& mf, int order, const Sector& s, const RGrid& grid, Variant variant,
                                   const LabConfig& cfg = {}) {
  DefectReport rep = detail::start(variant == Variant::Angular ? "logderiv_angular" : "logderiv_tsuji", grid);
  if (order < 1) throw InputError("derivative order must be positive");
  ScalarContext ratio(mf.log_derivative_ratio(order), s, cfg.zeros);
  ScalarContext base(mf, s, cfg.zeros);
  const double w = detail::warm_radius(grid);
  std::vector<const std::vector<ZeroRecord>*> sets{&ratio.zeros(w), &ratio.poles(w)};
  if (variant == Variant::Tsuji) {
    sets.push_back(&base.zeros(w));
    sets.push_back(&base.poles(w));
  }
  rep.radii = detail::realize(grid.nominal(), s, sets, rep.notes);
  struct Row {
    double num, growth;
  };
  const auto rows = detail::parallel_map<Row>(static_cast<int>(rep.radii.size()), cfg.threads, [&](int i) {
    const double r = rep.radii[i];
    if (variant == Variant::Angular) {
      return Row{S_scalar(ratio, r, cfg.quad), plane_characteristic(mf, r, cfg.quad)};
    }
    return Row{m_tsuji_scalar(ratio, r, cfg.quad), T_tsuji_scalar(base, r, cfg.quad)};
  });
  std::vector<double> num, growth;
  std::vector<bool> viol;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    num.push_back(rows[i].num);
    growth.push_back(rows[i].growth);
    const double q = rows[i].num / detail::log_plus_sum(rows[i].growth, rep.radii[i]);
    rep.defect.push_back(q);
    viol.push_back(!(q <= cfg.ratio_bound));
  }
  rep.series = {{variant == Variant::Angular ? "S_ratio" : "m_ratio", num},
                {variant == Variant::Angular ? "T_plane" : "T_tsuji", growth}};
  rep.values.emplace_back("order", order);
  rep.values.emplace_back("ratio_bound", cfg.ratio_bound);
  detail::fill_stats(rep);
  const bool ok = detail::satisfied(rep, viol, cfg);
  rep.verdict = rep.defect.size() < 3 ? Verdict::Inconclusive : (ok ? Verdict::Pass : Verdict::Fail);
  return rep;
}

// ---------------------------------------------------------------------------
// Second main theorem for hyperplanes

namespace detail {

inline std::vector<CurveTarget> hyperplane_targets(const Curve& f, const std::vector<HyperplaneVec>& hs, const Sector& s,
                                                   const LabConfig& cfg) {
  std::vector<CurveTarget> ts;
  ts.reserve(hs.size());
  for (const HyperplaneVec& h : hs) ts.emplace_back(f, HomogForm::linear(h), s, cfg.zeros);
  return ts;
}

inline std::vector<double> realize_targets(const RGrid& grid, const Sector& s, std::vector<CurveTarget>& ts,
                                           std::vector<std::string>& notes) {
  std::vector<const std::vector<ZeroRecord>*> sets;
  for (CurveTarget& t : ts) sets.push_back(&t.zeros(warm_radius(grid)));
  return realize(grid.nominal(), s, sets, notes);
}

}  // namespace detail

// slack = Σ C^n(r,H_j) + λ(log⁺T_f + log r) + μ − (q−n−1) S(r)
inline DefectReport check_smt_angular(const Curve& f, const std::vector<HyperplaneVec>& hs, const Sector& s,
                                      const RGrid& grid, const LabConfig& cfg = {}) {
  DefectReport rep = detail::start("smt_angular", grid);
  const int n = f.dim();
  detail::check_general_position(hs, n);
  if (!linearly_nondegenerate(f)) throw DegenerateError("curve is linearly degenerate (Wronskian vanishes identically)");
  auto ts = detail::hyperplane_targets(f, hs, s, cfg);
  rep.radii = detail::realize_targets(grid, s, ts, rep.notes);
  const int q = static_cast<int>(hs.size());
  struct Row {
    double S, C, Tf;
  };
  const auto rows = detail::parallel_map<Row>(static_cast<int>(rep.radii.size()), cfg.threads, [&](int i) {
    const double r = rep.radii[i];
    double C = 0;
    for (CurveTarget& t : ts) C += counting_C(t, r, Truncation::at(n));
    return Row{char_S(f, s, r, cfg.quad), C, char_cartan_plane(f, r, cfg.quad).value};
  });
  std::vector<double> lhs, rhs0, g, S, Tf;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    S.push_back(rows[i].S);
    Tf.push_back(rows[i].Tf);
    lhs.push_back((q - n - 1) * rows[i].S);
    rhs0.push_back(rows[i].C);
    g.push_back(detail::log_plus_sum(rows[i].Tf, rep.radii[i]));
  }
  rep.series = {{"lhs", lhs}, {"counting_sum", rhs0}, {"S", S}, {"T_plane", Tf}};
  rep.values.emplace_back("q", q);
  rep.values.emplace_back("n", n);
  detail::slack_verdict(rep, lhs, rhs0, g, cfg);
  return rep;
}

// slack = Σ 𝔑^n(r,H_j) + λ(log⁺𝔗 + log r) + μ − (q−n−1) 𝔗(r)
inline DefectReport check_smt_tsuji(const Curve& f, const std::vector<HyperplaneVec>& hs, const Sector& s,
                                    const RGrid& grid, const LabConfig& cfg = {}) {
  DefectReport rep = detail::start("smt_tsuji", grid);
  const int n = f.dim();
  detail::check_general_position(hs, n);
  if (!linearly_nondegenerate(f)) throw DegenerateError("curve is linearly degenerate (Wronskian vanishes identically)");
  auto ts = detail::hyperplane_targets(f, hs, s, cfg);
  rep.radii = detail::realize_targets(grid, s, ts, rep.notes);
  const int q = static_cast<int>(hs.size());
  struct Row {
    double T, N, N1;
  };
  const auto rows = detail::parallel_map<Row>(static_cast<int>(rep.radii.size()), cfg.threads, [&](int i) {
    const double r = rep.radii[i];
    double N = 0, N1 = 0;
    for (CurveTarget& t : ts) {
      N += counting_N_tsuji(t, r, Truncation::at(n));
      N1 += counting_N_tsuji(t, r, Truncation::at(1));
    }
    return Row{char_T_tsuji(f, s, r, cfg.quad), N, N1};
  });
  std::vector<double> lhs, rhs0, g, T, N1;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    T.push_back(rows[i].T);
    N1.push_back(rows[i].N1);
    lhs.push_back((q - n - 1) * rows[i].T);
    rhs0.push_back(rows[i].N);
    g.push_back(detail::log_plus_sum(rows[i].T, rep.radii[i]));
  }
  rep.series = {{"lhs", lhs}, {"counting_sum", rhs0}, {"T", T}, {"counting_sum_1", N1}};
  rep.values.emplace_back("q", q);
  rep.values.emplace_back("n", n);
  detail::slack_verdict(rep, lhs, rhs0, g, cfg);
  return rep;
}

// ---------------------------------------------------------------------------
// The hypersurface D = {Σ H_i^n Q_i = 0}

// (n − (d+N+1)N) 𝔗 + Σ (𝔑(D_i) − 𝔑^N(D_i)) ≤ 𝔑^N(D) + ε 𝔗
inline DefectReport check_hypersurface_smt(const Curve& f, const std::vector<HyperplaneVec>& hs, const std::vector<HomogForm>& qs,
                               int n, const Sector& s, const RGrid& grid, const LabConfig& cfg = {}) {
  DefectReport rep = detail::start("hypersurface_smt", grid);
  const int N = f.dim();
  if (static_cast<int>(hs.size()) != N + 1 || static_cast<int>(qs.size()) != N + 1) {
    throw InputError("need N+1 hyperplanes and N+1 forms for a curve into P^N");
  }
  const HomogForm D = build_hypersurface_target(hs, qs, n);
  const int d = qs.front().degree();
  rep.values.emplace_back("N", N);
  rep.values.emplace_back("d", d);
  rep.values.emplace_back("n", n);
  rep.notes.push_back("D = " + to_string(D));
  rep.notes.push_back("algebraic nondegeneracy of f is assumed, not verified");

  bool hypothesis = hypersurface_degree_ok(N, d, n);
  if (!hypothesis) {
    rep.notes.push_back("n = " + std::to_string(n) + " does not exceed N(d+N+1) = " + std::to_string(N * (d + N + 1)));
  }
  std::vector<HomogForm> combined;
  for (int i = 0; i <= N; ++i) combined.push_back(pow(HomogForm::linear(hs[i]), n) * qs[i]);
  const GeneralPositionVerdict gp = hypersurfaces_general_position_sampled(combined, N, cfg.gp_budget, cfg.seed);
  rep.values.emplace_back("general_position_residual", gp.best_residual);
  rep.notes.push_back("general position of H_i^n Q_i: " + gp.note);
  if (!gp.pass) hypothesis = false;

  CurveTarget tD(f, D, s, cfg.zeros);
  std::vector<CurveTarget> tDi;
  for (const HomogForm& q : qs) tDi.emplace_back(f, q, s, cfg.zeros);
  std::vector<const std::vector<ZeroRecord>*> sets{&tD.zeros(detail::warm_radius(grid))};
  for (CurveTarget& t : tDi) sets.push_back(&t.zeros(detail::warm_radius(grid)));
  rep.radii = detail::realize(grid.nominal(), s, sets, rep.notes);

  struct Row {
    double T, ND, excess;
  };
  const auto rows = detail::parallel_map<Row>(static_cast<int>(rep.radii.size()), cfg.threads, [&](int i) {
    const double r = rep.radii[i];
    double excess = 0;
    for (CurveTarget& t : tDi) {
      const std::vector<ZeroRecord>& zs = t.zeros(r);
      excess += counting_N_sum(zs, s, r) - counting_N_sum(zs, s, r, Truncation::at(std::max(N, 1)));
    }
    return Row{char_T_tsuji(f, s, r, cfg.quad), counting_N_tsuji(tD, r, Truncation::at(std::max(N, 1))), excess};
  });
  const double coef = n - (d + N + 1) * N;
  std::vector<double> T, lhs, rhs, eps;
  double eps_max = 0;
  for (const Row& row : rows) {
    const double l = coef * row.T + row.excess;
    T.push_back(row.T);
    lhs.push_back(l);
    rhs.push_back(row.ND);
    rep.defect.push_back(row.ND - l);
    const double e = row.T > 0 ? std::max(0.0, (l - row.ND) / row.T) : (l > row.ND ? INFINITY : 0.0);
    eps.push_back(e);
    eps_max = std::max(eps_max, e);
  }
  rep.series = {{"T", T}, {"lhs", lhs}, {"rhs", rhs}, {"epsilon", eps}};
  rep.values.emplace_back("epsilon", eps_max);
  rep.values.emplace_back("epsilon_max", cfg.epsilon_max);

  // F = (Q_i(f) f_i^n): its Tsuji characteristic should be about (n+d) times f's.
  try {
    const Curve F = build_F_curve(f, qs, n);
    const double r = rep.radii.back();
    rep.values.emplace_back("T_F_over_T_f", char_T_tsuji(F, s, r, cfg.quad) / T.back());
  } catch (const NumericalError& e) {
    rep.notes.push_back(std::string("F-curve characteristic skipped: ") + e.what());
  }

  detail::fill_stats(rep);
  if (!hypothesis) {
    rep.verdict = Verdict::HypothesisViolated;
  } else {
    rep.verdict = rep.defect.size() < 3 ? Verdict::Inconclusive : (eps_max <= cfg.epsilon_max ? Verdict::Pass : Verdict::Fail);
  }
  return rep;
}

namespace detail {

// max_{a<b} |f_a g_b − f_b g_a| with both vectors normalised to sup-norm 1.
inline double projective_mismatch(const Curve& f, const Curve& g, Complex z) {
  auto unit = [&](const Curve& c) {
    const auto s = c.taylor(z, 0);
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& x : s) top = std::max(top, x.log_abs(0));
    std::vector<Complex> v;
    for (const auto& x : s) {
      v.push_back(x.is_zero() ? Complex{} : std::polar(std::exp(x.log_abs(0) - top), std::arg(x.coeffs[0])));
    }
    return v;
  };
  const auto a = unit(f), b = unit(g);
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) worst = std::max(worst, std::abs(a[i] * b[j] - a[j] * b[i]));
  }
  return worst;
}

}  // namespace detail

// Steps of the uniqueness argument: 𝔑^N_f(D) ≤ N 𝔑¹_f(D) and
// 𝔑¹_f(D) ≤ 𝔑(r, 1/(f_i/f_j − g_i/g_j)) + O(1) when f = g on f^{-1}(D).
inline DefectReport check_uniqueness_chain(const Curve& f, const Curve& g, const std::vector<HyperplaneVec>& hs,
                                           const std::vector<HomogForm>& qs, int n, int i, int j, const Sector& s,
                                           const RGrid& grid, const LabConfig& cfg = {}) {
  DefectReport rep = detail::start("uniqueness_chain", grid);
  const int N = f.dim();
  if (g.dim() != N) throw InputError("f and g must map into the same projective space");
  if (i < 0 || j < 0 || i > N || j > N || i == j) throw InputError("indices i, j must be distinct component indices");
  const HomogForm D = build_hypersurface_target(hs, qs, n);
  const int d = qs.front().degree();
  bool hypothesis = n > N * (d + N + 3);
  if (!hypothesis) {
    rep.notes.push_back("n = " + std::to_string(n) + " does not exceed N(d+N+3) = " + std::to_string(N * (d + N + 3)));
  }

  using detail::mul_s;
  std::optional<MeroFn> h;
  try {
    h.emplace(detail::sub_s(mul_s(f.component(i), g.component(j)), mul_s(f.component(j), g.component(i))),
              mul_s(f.component(j), g.component(j)));
  } catch (const DegenerateError&) {
    throw DegenerateError("proportional pair: f_i g_j − f_j g_i vanishes identically");
  }
  CurveTarget tD(f, D, s, cfg.zeros);
  ScalarContext hc(*h, s, cfg.zeros);
  const double w = detail::warm_radius(grid);
  const std::vector<ZeroRecord>& all = tD.zeros(w);
  hc.zeros(w);

  std::vector<ZeroRecord> verified;
  int excluded = 0;
  for (const ZeroRecord& z : all) {
    if (detail::projective_mismatch(f, g, z.location) < 1e-8) {
      verified.push_back(z);
    } else {
      ++excluded;
      if (excluded <= 10) rep.notes.push_back("f ≠ g at zero " + detail::format_constant(z.location) + "; excluded");
    }
  }
  rep.values.emplace_back("zeros_located", static_cast<double>(all.size()));
  rep.values.emplace_back("zeros_excluded", excluded);
  rep.radii = detail::realize(grid.nominal(), s, {&all, &hc.zeros(w), &hc.poles(w)}, rep.notes);

  const int trunc = std::max(N, 1);
  std::vector<double> NN, N1, Nh;
  bool chain_ok = true;
  for (double r : rep.radii) {
    const double a = counting_N_sum(verified, s, r, Truncation::at(trunc));
    const double b = counting_N_sum(verified, s, r, Truncation::at(1));
    const double c = counting_N_sum(hc.zeros(r), s, r);
    NN.push_back(a);
    N1.push_back(b);
    Nh.push_back(c);
    if (a > trunc * b * (1.0 + 1e-14)) chain_ok = false;
    rep.defect.push_back(c - b);
  }
  rep.series = {{"N_trunc_N", NN}, {"N_trunc_1", N1}, {"N_h", Nh}};
  rep.values.emplace_back("truncation_chain_holds", chain_ok ? 1.0 : 0.0);
  detail::fill_stats(rep);
  const double cap = cfg.bound_cap_per_degree;
  const double lo = rep.defect.empty() ? 0.0 : *std::min_element(rep.defect.begin(), rep.defect.end());
  const bool ok = chain_ok && rep.fit.b >= -cfg.slope_tol && lo >= -cap;
  if (!hypothesis) rep.verdict = Verdict::HypothesisViolated;
  else rep.verdict = rep.defect.size() < 3 ? Verdict::Inconclusive : (ok ? Verdict::Pass : Verdict::Fail);
  return rep;
}

// (q(1−ε/3) − (n+1) − ε/3) 𝔗 ≤ Σ d_l^{-1} 𝔑^M(Q_l) + O(log 𝔗 + log r), V = P^n.
inline DefectReport check_smt_variety(const Curve& f, const std::vector<HomogForm>& qs, int M, double eps,
                                      const Sector& s, const RGrid& grid, const LabConfig& cfg = {}) {
  DefectReport rep = detail::start("smt_variety", grid);
  const int n = f.dim();
  if (M < 1) throw InputError("truncation level M must be a positive integer");
  if (!(eps > 0)) throw InputError("epsilon must be positive");
  const int q = static_cast<int>(qs.size());
  if (q <= n) throw InputError("need more than n hypersurfaces");
  long long lcm = 1;
  for (const HomogForm& Q : qs) lcm = std::lcm(lcm, static_cast<long long>(Q.degree()));
  const double mlog = variety_M_bound_log10(n, static_cast<int>(lcm), eps);
  rep.values.emplace_back("M", M);
  rep.values.emplace_back("epsilon", eps);
  rep.values.emplace_back("I_inv_eps", static_cast<double>(int_ceil_strict(1.0 / eps)));
  rep.values.emplace_back("M_bound_log10", mlog);
  if (std::log10(static_cast<double>(M)) < mlog) rep.notes.push_back("M is below the stated lower bound (desk-scale M)");
  rep.notes.push_back("algebraic nondegeneracy of f is assumed, not verified");

  const GeneralPositionVerdict gp = hypersurfaces_general_position_sampled(qs, n, cfg.gp_budget, cfg.seed);
  rep.notes.push_back("general position: " + gp.note);

  std::vector<CurveTarget> ts;
  for (const HomogForm& Q : qs) ts.emplace_back(f, Q, s, cfg.zeros);
  rep.radii = detail::realize_targets(grid, s, ts, rep.notes);
  struct Row {
    double T, N;
  };
  const auto rows = detail::parallel_map<Row>(static_cast<int>(rep.radii.size()), cfg.threads, [&](int i) {
    const double r = rep.radii[i];
    double N = 0;
    for (CurveTarget& t : ts) N += counting_N_tsuji(t, r, Truncation::at(M)) / t.degree();
    return Row{char_T_tsuji(f, s, r, cfg.quad), N};
  });
  const double coef = q * (1.0 - eps / 3.0) - (n + 1) - eps / 3.0;
  std::vector<double> lhs, rhs0, g, T;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    T.push_back(rows[k].T);
    lhs.push_back(coef * rows[k].T);
    rhs0.push_back(rows[k].N);
    g.push_back(detail::log_plus_sum(rows[k].T, rep.radii[k]));
  }
  rep.series = {{"lhs", lhs}, {"counting_sum", rhs0}, {"T", T}};
  detail::slack_verdict(rep, lhs, rhs0, g, cfg);
  if (!gp.pass) rep.verdict = Verdict::HypothesisViolated;
  return rep;
}

// ---------------------------------------------------------------------------
// Wronskian identities at random points of |z| ≤ 3

namespace detail {

inline double rel_diff(const ScaledValue& a, const ScaledValue& b) {
  const double e = std::max(a.exp2, b.exp2);
  const Complex x = ldexp_c(a.mantissa, a.exp2 - e), y = ldexp_c(b.mantissa, b.exp2 - e);
  const double den = std::max(std::abs(x), std::abs(y));
  return den == 0 ? 0.0 : std::abs(x - y) / den;
}

inline ScaledValue scaled_mul(ScaledValue a, const ScaledSeries& s, int power) {
  for (int p = 0; p < power; ++p) {
    a.mantissa *= s.coeffs[0];
    a.exp2 += s.exp2;
  }
  return a;
}

}  // namespace detail

inline DefectReport check_wronskian_identities(const Curve& f, const std::optional<std::vector<HyperplaneVec>>& forms,
                                               int samples, const LabConfig& cfg = {}) {
  DefectReport rep;
  rep.check = "wronskian_identities";
  if (samples < 1) throw InputError("need at least one sample point");
  const int n = f.dim();
  std::vector<EntireFunction> F;
  Complex detL = 1.0;
  if (forms) {
    if (static_cast<int>(forms->size()) != n + 1) throw InputError("need n+1 linear forms");
    for (const HyperplaneVec& L : *forms) {
      if (static_cast<int>(L.size()) != n + 1) throw InputError("linear form dimension does not match the curve");
    }
    detL = detail::determinant(*forms);
    if (std::abs(detL) < 1e-12) throw DegenerateError("linear forms are not independent");
    for (const HyperplaneVec& L : *forms) {
      F.emplace_back([f, L](Complex z, int order) {
        const auto comps = f.taylor(z, order);
        ScaledSeries acc = ScaledSeries::constant(0.0, order);
        for (std::size_t k = 0; k < comps.size(); ++k) {
          if (L[k] != Complex{}) acc = acc + L[k] * comps[k];
        }
        return acc;
      });
    }
  }
  std::vector<EntireFunction> quot;
  quot.emplace_back([](Complex, int order) { return ScaledSeries::constant(1.0, order); });
  for (int k = 1; k <= n; ++k) {
    quot.emplace_back([f, k](Complex z, int order) { return divide(f.function(k).taylor(z, order), f.function(0).taylor(z, order)); });
  }

  std::mt19937_64 rng(cfg.seed ^ 0x3A1ULL);
  std::uniform_real_distribution<double> rad(0.0, 1.0), ang(0.0, 2.0 * kPi);
  std::vector<double> factor_err, forms_err;
  int skipped = 0;
  for (int t = 0; t < samples; ++t) {
    const Complex z = std::polar(3.0 * std::sqrt(rad(rng)), ang(rng));
    const ScaledValue W = wronskian_scaled(f, z);
    const ScaledSeries f0 = f.function(0).taylor(z, 0);
    if (f0.is_zero() || W.mantissa == Complex{}) {
      ++skipped;
      continue;
    }
    const ScaledValue rhs = detail::scaled_mul(wronskian_scaled(quot, z), f0, n + 1);
    factor_err.push_back(detail::rel_diff(W, rhs));
    if (forms) {
      const ScaledValue WF = wronskian_scaled(F, z);
      forms_err.push_back(detail::rel_diff(WF, ScaledValue{W.mantissa * detL, W.exp2}));
    }
  }
  rep.series = {{"factorization_rel_err", factor_err}};
  if (forms) rep.series.emplace_back("forms_rel_err", forms_err);
  const double le = factor_err.empty() ? 0.0 : *std::max_element(factor_err.begin(), factor_err.end());
  const double fe = forms_err.empty() ? 0.0 : *std::max_element(forms_err.begin(), forms_err.end());
  rep.values = {{"samples", samples}, {"skipped", skipped}, {"factorization_max_rel", le}};
  if (forms) {
    rep.values.emplace_back("forms_max_rel", fe);
    rep.values.emplace_back("forms_constant_re", detL.real());
    rep.values.emplace_back("forms_constant_im", detL.imag());
  }
  rep.defect = factor_err;
  rep.max_abs = std::max(le, fe);
  const bool ok = !factor_err.empty() && le <= 1e-8 && fe <= 1e-8;
  rep.verdict = ok ? Verdict::Pass : Verdict::Fail;
  if (skipped > 0) rep.notes.push_back(std::to_string(skipped) + " sample points hit a zero of f_0 or of W");
  return rep;
}

}  // namespace nevang
