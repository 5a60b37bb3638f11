#pragma once

// Angular (A, B, C, S) and Tsuji (m, N, T) functionals of holomorphic curves
// and meromorphic functions, truncated counting functions, Wronskian counting,
// the plane Cartan characteristic and the max-over-K proximity integral.
//
// Every integrand is a log-modulus built from scaled jets, so nothing is ever
// exponentiated; |e^z| at |z| = 1e3 is just the number 1e3 here.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nevang/errors.hpp"
#include "nevang/expr.hpp"
#include "nevang/projective.hpp"
#include "nevang/quadrature.hpp"
#include "nevang/wronskian.hpp"
#include "nevang/zeros.hpp"

namespace nevang {

// Multiplicity cap δ; delta == 0 means untruncated.
struct Truncation {
  int delta = 0;

  static Truncation none() { return {}; }
  static Truncation at(int d) {
    if (d < 1) throw InputError("truncation level must be a positive integer");
    return {d};
  }
  int weight(int multiplicity) const { return delta > 0 ? std::min(multiplicity, delta) : multiplicity; }
};

// ---------------------------------------------------------------------------
// Zero cache: zeros of one function in one sector, located once per radius range.

class ZeroCache {
 public:
  ZeroCache(EntireFunction g, const Sector& s, ZeroLocatorConfig cfg = {}) : g_(std::move(g)), s_(s), cfg_(cfg) {}

  // Zeros with 1 ≤ |z| ≤ r (plus a thin margin), sorted by (|z|, arg).
  const std::vector<ZeroRecord>& upto(double r) {
    if (!(r > 1.0)) throw InputError("radius must exceed 1");
    if (r * (1.0 + 1e-5) > covered_) {
      const double hi = r * (1.0 + 1e-3);
      std::vector<ZeroRecord> fresh = locate_zeros_raw(g_, s_, covered_, hi, cfg_);
      for (const ZeroRecord& z : fresh) {
        const bool dup = std::any_of(zeros_.begin(), zeros_.end(), [&](const ZeroRecord& y) {
          return std::abs(y.location - z.location) < 1e-7 * std::max(1.0, std::abs(z.location));
        });
        if (!dup) zeros_.push_back(z);
      }
      detail::sort_zeros(zeros_);
      covered_ = hi;
    }
    return zeros_;
  }

  const Sector& sector() const { return s_; }
  const EntireFunction& function() const { return g_; }

 private:
  EntireFunction g_;
  Sector s_;
  ZeroLocatorConfig cfg_;
  double covered_ = 1.0;
  std::vector<ZeroRecord> zeros_;
};

// ---------------------------------------------------------------------------
// Counting sums

namespace detail {

// sin k(ψ − α) for a point of the closed sector (boundary rays give 0, not rounding noise).
inline double sector_sine(const Sector& s, Complex z) {
  double rel = s.whole_plane() ? s.relative_angle(z) : s.signed_relative_angle(z);
  rel = std::clamp(rel, 0.0, s.width());
  return std::max(0.0, std::sin(s.k() * rel));
}

}  // namespace detail

// 2 Σ_{1 ≤ ρ ≤ r, α ≤ ψ ≤ β} w (ρ^{-k} − ρ^k r^{-2k}) sin k(ψ − α)
inline double counting_C_sum(const std::vector<ZeroRecord>& zs, const Sector& s, double r, Truncation tr = {}) {
  const double k = s.k();
  double sum = 0.0;
  for (const ZeroRecord& z : zs) {
    if (!in_closed_annulus(s, 1.0, r, z.location)) continue;
    const double rho = std::abs(z.location);
    sum += tr.weight(z.multiplicity) * (std::pow(rho, -k) - std::pow(rho, k) * std::pow(r, -2.0 * k)) *
           detail::sector_sine(s, z.location);
  }
  return 2.0 * sum;
}

// Σ_{a ∈ Ξ(α,β;r)} w (sin k(θ − α) / |a|^k − r^{-k})
inline double counting_N_sum(const std::vector<ZeroRecord>& zs, const Sector& s, double r, Truncation tr = {}) {
  const double k = s.k();
  double sum = 0.0;
  for (const ZeroRecord& z : zs) {
    if (!xi_contains(s, r, z.location)) continue;
    const double term = std::sin(k * s.relative_angle(z.location)) * std::pow(std::abs(z.location), -k) - std::pow(r, -k);
    sum += tr.weight(z.multiplicity) * std::max(0.0, term);
  }
  return sum;
}

// c(t) = Σ_{1 ≤ ρ ≤ t, closed sector} w sin k(ψ − α)
inline double c_small(const std::vector<ZeroRecord>& zs, const Sector& s, double t, Truncation tr = {}) {
  double sum = 0.0;
  if (t < 1.0) return 0.0;
  for (const ZeroRecord& z : zs) {
    if (in_closed_annulus(s, 1.0, t, z.location)) sum += tr.weight(z.multiplicity) * detail::sector_sine(s, z.location);
  }
  return sum;
}

// 𝔫(t) = weighted number of zeros in Ξ(α,β;t)
inline double n_small(const std::vector<ZeroRecord>& zs, const Sector& s, double t, Truncation tr = {}) {
  if (!(t > 1.0)) return 0.0;
  double sum = 0.0;
  for (const ZeroRecord& z : zs) {
    if (xi_contains(s, t, z.location)) sum += tr.weight(z.multiplicity);
  }
  return sum;
}

// C via 2k ∫_1^r c(t)(t^{-k-1} + t^{k-1} r^{-2k}) dt, by quadrature in u = log t
// with cuts at the jumps of c.
inline double counting_C_integral(const std::vector<ZeroRecord>& zs, const Sector& s, double r, Truncation tr,
                                  const QuadratureConfig& cfg) {
  const double k = s.k();
  const double ur = std::log(r);
  std::vector<double> cuts{0.0, ur};
  for (const ZeroRecord& z : zs) {
    const double u = std::log(std::abs(z.location));
    if (u > 0.0 && u < ur) cuts.push_back(u);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    // c is constant on the open piece; sample it at the midpoint
    const double c = c_small(zs, s, std::exp(0.5 * (cuts[i] + cuts[i + 1])), tr);
    if (c == 0.0) continue;
    auto w = [&](double u) { return 2.0 * k * c * (std::exp(-k * u) + std::exp(k * u - 2.0 * k * ur)); };
    total += integrate<double>(w, cuts[i], cuts[i + 1], cfg).value;
  }
  return total;
}

// 𝔑 via k ∫_1^r 𝔫(t) t^{-k-1} dt, cuts where zeros enter Ξ(t).
inline double counting_N_integral(const std::vector<ZeroRecord>& zs, const Sector& s, double r, Truncation tr,
                                  const QuadratureConfig& cfg) {
  const double k = s.k();
  const double ur = std::log(r);
  std::vector<double> cuts{0.0, ur};
  for (const ZeroRecord& z : zs) {
    const double rel = s.relative_angle(z.location);
    if (!(rel > 0.0 && rel < s.width())) continue;
    const double sn = std::sin(k * rel);
    if (!(sn > 0.0)) continue;
    const double u = std::log(std::abs(z.location)) - std::log(sn) / k;  // t at which z enters Ξ(t)
    if (u > 0.0 && u < ur) cuts.push_back(u);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double n = n_small(zs, s, std::exp(0.5 * (cuts[i] + cuts[i + 1])), tr);
    if (n == 0.0) continue;
    auto w = [&](double u) { return k * n * std::exp(-k * u); };
    total += integrate<double>(w, cuts[i], cuts[i + 1], cfg).value;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Boundary integrals of a log integrand L(z)

using LogIntegrand = std::function<double(Complex)>;

namespace detail {

inline void add_cut(std::vector<double>& pts, double x) { pts.push_back(x); }

// Parameter values where located zeros/poles sit on (or within pad of) each path.
inline std::vector<double> ray_singularities(const std::vector<const std::vector<ZeroRecord>*>& sets, double theta,
                                             double r, double pad) {
  std::vector<double> out;
  for (const auto* zs : sets) {
    for (const ZeroRecord& z : *zs) {
      const double t = std::abs(z.location);
      if (t < 1.0 - 1e-9 || t > r * (1.0 + 1e-9)) continue;
      const double d = std::abs(std::remainder(std::arg(z.location) - theta, 2.0 * kPi));
      if (d < pad) add_cut(out, std::log(std::max(t, 1.0)));
    }
  }
  return out;
}

inline std::vector<double> arc_singularities(const std::vector<const std::vector<ZeroRecord>*>& sets, const Sector& s,
                                             double r, double pad) {
  std::vector<double> out;
  for (const auto* zs : sets) {
    for (const ZeroRecord& z : *zs) {
      if (std::abs(std::abs(z.location) - r) > pad * r) continue;
      if (!s.in_closed(z.location, pad)) continue;
      const double rel = s.whole_plane() ? s.relative_angle(z.location) : s.signed_relative_angle(z.location);
      add_cut(out, s.alpha() + std::clamp(rel, 0.0, s.width()));
    }
  }
  return out;
}

// Tsuji curve parametrized by v with cot φ = sinh v, φ ∈ (0, π).
inline Complex tsuji_point_v(const Sector& s, double r, double v) {
  const double phi = std::atan2(1.0, std::sinh(v));
  return std::polar(r * std::pow(1.0 / std::cosh(v), 1.0 / s.k()), s.alpha() + phi / s.k());
}

inline std::vector<double> tsuji_singularities(const std::vector<const std::vector<ZeroRecord>*>& sets, const Sector& s,
                                               double r, double pad) {
  std::vector<double> out;
  for (const auto* zs : sets) {
    for (const ZeroRecord& z : *zs) {
      const double rel = s.relative_angle(z.location);
      if (!(rel > 0.0 && rel < s.width())) continue;
      const double bound = s.xi_bound(r, rel);
      if (std::abs(std::abs(z.location) - bound) > pad * r) continue;
      const double phi = s.k() * rel;
      add_cut(out, std::asinh(std::cos(phi) / std::sin(phi)));
    }
  }
  return out;
}

inline std::vector<double> uniform_with(double a, double b, int pieces, const std::vector<double>& singular) {
  std::vector<double> cuts = graded_cuts(a, b, singular);
  for (int i = 1; i < pieces; ++i) cuts.push_back(a + (b - a) * i / pieces);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

}  // namespace detail

struct ZeroSets {
  std::vector<const std::vector<ZeroRecord>*> sets;
};

// (k/π) ∫_1^r (t^{-k} − t^k r^{-2k}) [L(t e^{iα}) + L(t e^{iβ})] dt/t
inline double ray_integral(const LogIntegrand& L, const Sector& s, double r, const ZeroSets& sing,
                           const QuadratureConfig& cfg) {
  const double k = s.k();
  const double ur = std::log(r);
  double total = 0.0;
  for (double theta : {s.alpha(), s.beta()}) {
    const Complex dir = std::polar(1.0, theta);
    auto f = [&](double u) {
      const double w = std::exp(-k * u) - std::exp(k * (u - 2.0 * ur));
      return w == 0.0 ? 0.0 : w * L(std::exp(u) * dir);
    };
    const auto cuts = detail::uniform_with(0.0, ur, 16, detail::ray_singularities(sing.sets, theta, r, cfg.singularity_pad));
    total += integrate_or_throw(f, cuts, cfg, "ray integral");
  }
  return k / kPi * total;
}

// (2k / (π r^k)) ∫_α^β L(r e^{iφ}) sin k(φ − α) dφ
inline double arc_integral(const LogIntegrand& L, const Sector& s, double r, const ZeroSets& sing,
                           const QuadratureConfig& cfg) {
  const double k = s.k();
  auto f = [&](double phi) {
    const double w = std::sin(k * (phi - s.alpha()));
    return w <= 0.0 ? 0.0 : w * L(std::polar(r, phi));
  };
  const auto cuts =
      detail::uniform_with(s.alpha(), s.beta(), 64, detail::arc_singularities(sing.sets, s, r, cfg.singularity_pad));
  return 2.0 * k / (kPi * std::pow(r, k)) * integrate_or_throw(f, cuts, cfg, "arc integral");
}

// (1/2π) ∫_{arcsin r^{-k}}^{π − arcsin r^{-k}} L(z(φ)) dφ / (r^k sin²φ), with cot φ = sinh v.
inline double tsuji_integral(const LogIntegrand& L, const Sector& s, double r, const ZeroSets& sing,
                             const QuadratureConfig& cfg) {
  const double rk = std::pow(r, s.k());
  const double V = std::acosh(rk);
  auto f = [&](double v) { return std::cosh(v) * L(detail::tsuji_point_v(s, r, v)); };
  const auto cuts = detail::uniform_with(-V, V, 64, detail::tsuji_singularities(sing.sets, s, r, cfg.singularity_pad));
  return integrate_or_throw(f, cuts, cfg, "Tsuji boundary integral") / (2.0 * kPi * rk);
}

// ---------------------------------------------------------------------------
// Curve functionals with respect to a hypersurface D = {Q = 0}

class CurveTarget {
 public:
  CurveTarget(const Curve& f, const HomogForm& q, const Sector& s, ZeroLocatorConfig zcfg = {})
      : f_(f), comp_(compose(q, f)), zeros_(comp_.fn, s, zcfg) {}

  const Curve& curve() const { return f_; }
  const HomogForm& form() const { return comp_.form; }
  const Composition& composition() const { return comp_; }
  const Sector& sector() const { return zeros_.sector(); }
  int degree() const { return comp_.form.degree(); }

  const std::vector<ZeroRecord>& zeros(double r) { return zeros_.upto(r); }

  // d log‖f(z)‖ − log|Q(f)(z)|
  double log_ratio(Complex z) const { return degree() * sup_log_norm(f_, z) - comp_.fn.log_abs(z); }

 private:
  Curve f_;
  Composition comp_;
  ZeroCache zeros_;
};

inline double counting_C(CurveTarget& t, double r, Truncation tr = {}) {
  return counting_C_sum(t.zeros(r), t.sector(), r, tr);
}

inline double counting_N_tsuji(CurveTarget& t, double r, Truncation tr = {}) {
  return counting_N_sum(t.zeros(r), t.sector(), r, tr);
}

inline double proximity_A(CurveTarget& t, double r, const QuadratureConfig& cfg = {}) {
  return ray_integral([&](Complex z) { return t.log_ratio(z); }, t.sector(), r, {{&t.zeros(r)}}, cfg);
}

inline double proximity_B(CurveTarget& t, double r, const QuadratureConfig& cfg = {}) {
  return arc_integral([&](Complex z) { return t.log_ratio(z); }, t.sector(), r, {{&t.zeros(r)}}, cfg);
}

inline double proximity_m_tsuji(CurveTarget& t, double r, const QuadratureConfig& cfg = {}) {
  return tsuji_integral([&](Complex z) { return t.log_ratio(z); }, t.sector(), r, {{&t.zeros(r)}}, cfg);
}

// Convenience forms that locate zeros for a single radius.
inline double counting_C(const Curve& f, const HomogForm& q, const Sector& s, double r, Truncation tr = {},
                         ZeroLocatorConfig zcfg = {}) {
  CurveTarget t(f, q, s, zcfg);
  return counting_C(t, r, tr);
}
inline double counting_N_tsuji(const Curve& f, const HomogForm& q, const Sector& s, double r, Truncation tr = {},
                               ZeroLocatorConfig zcfg = {}) {
  CurveTarget t(f, q, s, zcfg);
  return counting_N_tsuji(t, r, tr);
}
inline double proximity_A(const Curve& f, const HomogForm& q, const Sector& s, double r, const QuadratureConfig& cfg = {}) {
  CurveTarget t(f, q, s);
  return proximity_A(t, r, cfg);
}
inline double proximity_B(const Curve& f, const HomogForm& q, const Sector& s, double r, const QuadratureConfig& cfg = {}) {
  CurveTarget t(f, q, s);
  return proximity_B(t, r, cfg);
}
inline double proximity_m_tsuji(const Curve& f, const HomogForm& q, const Sector& s, double r,
                                const QuadratureConfig& cfg = {}) {
  CurveTarget t(f, q, s);
  return proximity_m_tsuji(t, r, cfg);
}

// S: the A + B integrals with |Q(f)| replaced by 1 and d = 1.
inline double char_S(const Curve& f, const Sector& s, double r, const QuadratureConfig& cfg = {}) {
  const LogIntegrand L = [&](Complex z) { return sup_log_norm(f, z); };
  return ray_integral(L, s, r, {}, cfg) + arc_integral(L, s, r, {}, cfg);
}

inline double char_T_tsuji(const Curve& f, const Sector& s, double r, const QuadratureConfig& cfg = {}) {
  return tsuji_integral([&](Complex z) { return sup_log_norm(f, z); }, s, r, {}, cfg);
}

// ---------------------------------------------------------------------------
// Meromorphic functions f = num / den

class MeroFn {
 public:
  explicit MeroFn(Expr num, Expr den = Expr::constant(1.0))
      : num_expr_(std::move(num)), den_expr_(std::move(den)), num_(num_expr_), den_(den_expr_) {
    if (vanishes(den_)) throw DegenerateError("denominator vanishes identically");
    if (vanishes(num_)) throw DegenerateError("numerator vanishes identically");
  }

  static MeroFn parse(std::string_view num, std::string_view den = "1") { return MeroFn(parse_expr(num), parse_expr(den)); }

  const Expr& num_expr() const { return num_expr_; }
  const Expr& den_expr() const { return den_expr_; }
  const EntireFunction& num() const { return num_; }
  const EntireFunction& den() const { return den_; }
  bool is_entire() const { return den_expr_.kind() == Expr::Kind::Constant; }

  double log_abs(Complex z) const { return num_.log_abs(z) - den_.log_abs(z); }

  // f^(k)/f. For f = N/D, f^(k) = P_k / D^{k+1} with P_0 = N and
  // P_{j+1} = P_j' D − (j+1) P_j D', so f^(k)/f = P_k / (N D^k).
  MeroFn log_derivative_ratio(int k) const {
    if (k < 1) throw InputError("derivative order must be positive");
    if (is_entire()) {
      auto [a, b] = cancel_common_factors(derivative(num_expr_, k), num_expr_);
      return MeroFn(a, b);
    }
    Expr p = num_expr_;
    const Expr dd = derivative(den_expr_);
    for (int j = 0; j < k; ++j) {
      p = detail::sub_s(detail::mul_s(derivative(p), den_expr_),
                        detail::mul_s(Expr::constant(static_cast<double>(j + 1)), detail::mul_s(p, dd)));
    }
    auto [a, b] = cancel_common_factors(p, detail::mul_s(num_expr_, pow(den_expr_, static_cast<unsigned>(k))));
    return MeroFn(a, b);
  }

 private:
  static bool vanishes(const EntireFunction& g) {
    for (int i = 0; i < 8; ++i) {
      if (!g.taylor(std::polar(0.7 + 0.37 * i, 0.9 + 2.1 * i), 0).is_zero()) return false;
    }
    return true;
  }

  Expr num_expr_;
  Expr den_expr_;
  EntireFunction num_;
  EntireFunction den_;
};

// Zeros and poles of a MeroFn in a sector, with common zeros of num and den cancelled.
class ScalarContext {
 public:
  ScalarContext(MeroFn f, const Sector& s, ZeroLocatorConfig zcfg = {})
      : f_(std::move(f)), num_zeros_(f_.num(), s, zcfg), den_zeros_(f_.den(), s, zcfg) {}

  const MeroFn& function() const { return f_; }
  const Sector& sector() const { return num_zeros_.sector(); }

  const std::vector<ZeroRecord>& zeros(double r) {
    refresh(r);
    return zeros_;
  }
  const std::vector<ZeroRecord>& poles(double r) {
    refresh(r);
    return poles_;
  }

 private:
  void refresh(double r) {
    if (r <= done_) return;
    std::vector<ZeroRecord> zs = num_zeros_.upto(r);
    std::vector<ZeroRecord> ps = f_.is_entire() ? std::vector<ZeroRecord>{} : den_zeros_.upto(r);
    for (ZeroRecord& p : ps) {
      for (ZeroRecord& z : zs) {
        const double d = std::abs(p.location - z.location);
        const double scale = std::max(1.0, std::abs(p.location));
        if (d < 1e-8 * scale) {
          const int m = std::min(p.multiplicity, z.multiplicity);
          p.multiplicity -= m;
          z.multiplicity -= m;
        } else if (d < 1e-6 * scale && p.multiplicity > 0 && z.multiplicity > 0) {
          throw NumericalError("numerator and denominator zeros nearly coincide at " + detail::format_constant(p.location) +
                               "; cannot decide whether they cancel");
        }
      }
    }
    auto keep = [](std::vector<ZeroRecord>& v) {
      v.erase(std::remove_if(v.begin(), v.end(), [](const ZeroRecord& x) { return x.multiplicity <= 0; }), v.end());
    };
    keep(zs);
    keep(ps);
    zeros_ = std::move(zs);
    poles_ = std::move(ps);
    done_ = r;
  }

  MeroFn f_;
  ZeroCache num_zeros_;
  ZeroCache den_zeros_;
  double done_ = 1.0;
  std::vector<ZeroRecord> zeros_;
  std::vector<ZeroRecord> poles_;
};

namespace detail {

inline ZeroSets both(ScalarContext& c, double r) { return {{&c.zeros(r), &c.poles(r)}}; }

}  // namespace detail

inline double A_scalar(ScalarContext& c, double r, const QuadratureConfig& cfg = {}) {
  return ray_integral([&](Complex z) { return std::max(0.0, c.function().log_abs(z)); }, c.sector(), r, detail::both(c, r), cfg);
}
inline double B_scalar(ScalarContext& c, double r, const QuadratureConfig& cfg = {}) {
  return arc_integral([&](Complex z) { return std::max(0.0, c.function().log_abs(z)); }, c.sector(), r, detail::both(c, r), cfg);
}
inline double C_scalar(ScalarContext& c, double r, Truncation tr = {}) {
  return counting_C_sum(c.poles(r), c.sector(), r, tr);
}
inline double S_scalar(ScalarContext& c, double r, const QuadratureConfig& cfg = {}) {
  return A_scalar(c, r, cfg) + B_scalar(c, r, cfg) + C_scalar(c, r);
}
inline double m_tsuji_scalar(ScalarContext& c, double r, const QuadratureConfig& cfg = {}) {
  return tsuji_integral([&](Complex z) { return std::max(0.0, c.function().log_abs(z)); }, c.sector(), r,
                        detail::both(c, r), cfg);
}
inline double N_tsuji_scalar(ScalarContext& c, double r, Truncation tr = {}) {
  return counting_N_sum(c.poles(r), c.sector(), r, tr);
}
inline double T_tsuji_scalar(ScalarContext& c, double r, const QuadratureConfig& cfg = {}) {
  return m_tsuji_scalar(c, r, cfg) + N_tsuji_scalar(c, r);
}

// Right side of the Carleman formula without its O(1): rays and arc of log|f|.
inline double carleman_rhs(ScalarContext& c, double r, const QuadratureConfig& cfg = {}) {
  const LogIntegrand L = [&](Complex z) { return c.function().log_abs(z); };
  return ray_integral(L, c.sector(), r, detail::both(c, r), cfg) + arc_integral(L, c.sector(), r, detail::both(c, r), cfg);
}

// (1/2π) ∫ log|f| dφ/(r^k sin²φ) over the Tsuji boundary curve.
inline double tsuji_jensen_rhs(ScalarContext& c, double r, const QuadratureConfig& cfg = {}) {
  return tsuji_integral([&](Complex z) { return c.function().log_abs(z); }, c.sector(), r, detail::both(c, r), cfg);
}

// ---------------------------------------------------------------------------
// Wronskian counting

class WronskianCounter {
 public:
  WronskianCounter(const Curve& f, const Sector& s, ZeroLocatorConfig zcfg = {})
      : zeros_(EntireFunction(checked(f)), s, zcfg) {}

  double angular(double r) { return counting_C_sum(zeros_.upto(r), zeros_.sector(), r); }
  double tsuji(double r) { return counting_N_sum(zeros_.upto(r), zeros_.sector(), r); }
  const std::vector<ZeroRecord>& zeros(double r) { return zeros_.upto(r); }

 private:
  static Expr checked(const Curve& f) {
    if (!linearly_nondegenerate(f)) throw DegenerateError("curve is linearly degenerate (Wronskian vanishes identically)");
    return wronskian_expr(f);
  }
  ZeroCache zeros_;
};

enum class Variant { Angular, Tsuji };

inline double counting_W(const Curve& f, const Sector& s, double r, Variant v, ZeroLocatorConfig zcfg = {}) {
  WronskianCounter w(f, s, zcfg);
  return v == Variant::Angular ? w.angular(r) : w.tsuji(r);
}

// ---------------------------------------------------------------------------
// Plane Cartan characteristic (1/2π)∫ log‖f(re^{iθ})‖ dθ − log‖f(z₀)‖.

struct CartanResult {
  double value = 0.0;
  Complex base_point{};  // z₀: 0 unless every component vanishes there
};

inline CartanResult char_cartan_plane(const std::vector<EntireFunction>& fs, double r, const QuadratureConfig& cfg = {}) {
  auto log_norm = [&](Complex z) {
    double best = -std::numeric_limits<double>::infinity();
    for (const EntireFunction& f : fs) best = std::max(best, f.log_abs(z));
    return best;
  };
  CartanResult out;
  double base = log_norm(0.0);
  for (int i = 1; std::isinf(base) && i < 64; ++i) {
    out.base_point = std::polar(0.25 * i, 1.3 * i);
    base = log_norm(out.base_point);
  }
  if (std::isinf(base)) throw DegenerateError("curve components vanish at every base point tried");
  auto f = [&](double th) { return log_norm(std::polar(r, th)); };
  const auto cuts = detail::uniform_with(0.0, 2.0 * kPi, 64, {});
  out.value = integrate_or_throw(f, cuts, cfg, "Cartan characteristic") / (2.0 * kPi) - base;
  return out;
}

inline CartanResult char_cartan_plane(const Curve& f, double r, const QuadratureConfig& cfg = {}) {
  std::vector<EntireFunction> fs;
  for (int j = 0; j <= f.dim(); ++j) fs.push_back(f.function(j));
  return char_cartan_plane(fs, r, cfg);
}

// Nevanlinna characteristic of a MeroFn on the plane, as Cartan's of (den : num).
inline double plane_characteristic(const MeroFn& f, double r, const QuadratureConfig& cfg = {}) {
  return char_cartan_plane(std::vector<EntireFunction>{f.den(), f.num()}, r, cfg).value;
}

// ---------------------------------------------------------------------------
// max over independent subsets K of Σ_{j∈K} log(‖f‖ / |(a_j, f)|)

class MaxKProximity {
 public:
  MaxKProximity(const Curve& f, const std::vector<HyperplaneVec>& hs, const Sector& s, ZeroLocatorConfig zcfg = {})
      : f_(f), s_(s) {
    const int n = f.dim();
    for (const HyperplaneVec& h : hs) {
      if (static_cast<int>(h.size()) != n + 1) throw InputError("hyperplane dimension does not match the curve");
      comps_.push_back(compose(HomogForm::linear(h), f));
      caches_.emplace_back(comps_.back().fn, s, zcfg);
    }
    const int q = static_cast<int>(hs.size());
    for (int size = 1; size <= std::min(q, n + 1); ++size) {
      detail::for_each_subset(q, size, [&](const std::vector<int>& sub) {
        std::vector<std::vector<Complex>> rows;
        for (int i : sub) rows.push_back(hs[i]);
        if (vector_rank(rows) == size) subsets_.push_back(sub);
        return true;
      });
    }
  }

  double integrand(Complex z) const {
    const double ln = sup_log_norm(f_, z);
    std::vector<double> terms;
    for (const Composition& c : comps_) terms.push_back(ln - c.fn.log_abs(z));
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& sub : subsets_) {
      double s = 0.0;
      for (int i : sub) s += terms[i];
      best = std::max(best, s);
    }
    return best;
  }

  double value(double r, Variant v, const QuadratureConfig& cfg = {}) {
    ZeroSets sing;
    for (ZeroCache& c : caches_) sing.sets.push_back(&c.upto(r));
    const LogIntegrand L = [&](Complex z) { return integrand(z); };
    if (v == Variant::Tsuji) return tsuji_integral(L, s_, r, sing, cfg);
    return ray_integral(L, s_, r, sing, cfg) + arc_integral(L, s_, r, sing, cfg);
  }

 private:
  Curve f_;
  Sector s_;
  std::vector<Composition> comps_;
  std::vector<ZeroCache> caches_;
  std::vector<std::vector<int>> subsets_;
};

inline double proximity_maxK(const Curve& f, const std::vector<HyperplaneVec>& hs, const Sector& s, double r, Variant v,
                             const QuadratureConfig& cfg = {}) {
  MaxKProximity p(f, hs, s);
  return p.value(r, v, cfg);
}

}  // namespace nevang
