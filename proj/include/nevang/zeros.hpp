#pragma once

// Zeros of entire functions in sector annuli and Tsuji domains.
//
// Boxes are rectangles in w = log z = u + iθ. The winding number of a box is
// the total change of arg g around its boundary; each edge is split into
// panels on which a Gauss-Kronrod estimate of ∫ g'/g dz agrees with the exact
// endpoint phase difference and stays below π in imaginary part, so summing
// principal arg differences is exact. Boxes are bisected until each holds one
// zero (Newton from the centre) or a tight cluster (Newton on g^(N-1), with the
// multiplicity confirmed on a small circle).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nevang/errors.hpp"
#include "nevang/expr.hpp"
#include "nevang/projective.hpp"
#include "nevang/quadrature.hpp"

namespace nevang {

struct ZeroRecord {
  Complex location;
  int multiplicity = 1;
  double residual = 0.0;  // size of the last Newton correction
};

struct RegionSpec {
  enum class Kind { SectorAnnulus, Tsuji };
  Kind kind;
  Sector sector;
  double r_lo;
  double r_hi;  // r for Tsuji regions

  static RegionSpec sector_annulus(const Sector& s, double r_lo, double r_hi) {
    if (!(r_lo >= 1.0) || !(r_hi > r_lo)) throw InputError("sector annulus needs 1 <= r_lo < r_hi");
    return {Kind::SectorAnnulus, s, r_lo, r_hi};
  }
  static RegionSpec tsuji(const Sector& s, double r) {
    if (!(r > 1.0)) throw InputError("Tsuji region needs r > 1");
    return {Kind::Tsuji, s, 1.0, r};
  }
};

inline const char* region_kind_name(RegionSpec::Kind k) {
  return k == RegionSpec::Kind::Tsuji ? "tsuji" : "sector-annulus";
}

struct ZeroLocatorConfig {
  double tol = 1e-10;          // Newton refinement target |Δz| (relative to max(1,|z|))
  double path_eps = 1e-10;     // zero-on-contour threshold for |g/g'| relative to max(1,|z|)
  int max_depth = 40;
  int max_jitter = 5;
  int max_edge_panels = 200000;
  std::uint64_t seed = 0;
};

// ---------------------------------------------------------------------------
// Contours

struct Segment {
  enum class Kind { Line, Arc, Radial };
  Kind kind = Kind::Line;
  Complex a{}, b{};      // Line endpoints
  Complex center{};      // Arc centre
  double radius = 0.0;   // Arc radius
  double theta = 0.0;    // Radial direction
  double t0 = 0.0;       // Arc: angle; Radial: log modulus
  double t1 = 0.0;

  static Segment line(Complex a, Complex b) { return {Kind::Line, a, b}; }
  static Segment arc(Complex c, double rho, double th0, double th1) {
    Segment s;
    s.kind = Kind::Arc;
    s.center = c;
    s.radius = rho;
    s.t0 = th0;
    s.t1 = th1;
    return s;
  }
  static Segment radial(double theta, double u0, double u1) {
    Segment s;
    s.kind = Kind::Radial;
    s.theta = theta;
    s.t0 = u0;
    s.t1 = u1;
    return s;
  }

  double param(double s) const { return s >= 1.0 ? t1 : t0 + s * (t1 - t0); }

  Complex at(double s) const {
    switch (kind) {
      case Kind::Line: return s >= 1.0 ? b : a + s * (b - a);
      case Kind::Arc: return center + std::polar(radius, param(s));
      case Kind::Radial: return std::polar(std::exp(param(s)), theta);
    }
    return {};
  }

  Complex velocity(double s) const {
    switch (kind) {
      case Kind::Line: return b - a;
      case Kind::Arc: return Complex(0.0, 1.0) * std::polar(radius, param(s)) * (t1 - t0);
      case Kind::Radial: return std::polar(std::exp(param(s)), theta) * (t1 - t0);
    }
    return {};
  }
};

using Contour = std::vector<Segment>;

inline Contour circle_contour(Complex center, double radius) {
  return {Segment::arc(center, radius, 0.0, kPi), Segment::arc(center, radius, kPi, 2.0 * kPi)};
}

inline Contour polygon_contour(const std::vector<Complex>& vertices) {
  Contour c;
  for (std::size_t i = 0; i < vertices.size(); ++i) c.push_back(Segment::line(vertices[i], vertices[(i + 1) % vertices.size()]));
  return c;
}

namespace detail {

inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  return a;
}

// Phase of g and the logarithmic derivative at z, with the zero-on-path check.
struct PathSample {
  double phase;
  double log_mod;
  Complex logderiv;  // g'/g
};

inline PathSample path_sample(const EntireFunction& g, Complex z, const ZeroLocatorConfig& cfg) {
  const ScaledSeries s = g.taylor(z, 1);
  const Complex c0 = s.coeffs[0];
  const Complex c1 = s.coeffs[1];
  if (c0 == Complex{} || std::abs(c0) <= cfg.path_eps * std::max(1.0, std::abs(z)) * std::abs(c1)) {
    throw ContourError("zero of g on or near the contour");
  }
  return {std::arg(c0), s.log_abs(0), c1 / c0};
}

// Total change of arg g along a segment, exact up to rounding of the phases.
inline double edge_arg_change(const EntireFunction& g, const Segment& seg, const ZeroLocatorConfig& cfg) {
  struct Pending {
    double s0, s1;
    PathSample p0, p1;
  };
  auto sample = [&](double s) { return path_sample(g, seg.at(s), cfg); };
  std::vector<Pending> stack{{0.0, 1.0, sample(0.0), sample(1.0)}};
  double total = 0.0;
  int panels = 0;
  while (!stack.empty()) {
    Pending p = stack.back();
    stack.pop_back();
    if (++panels > cfg.max_edge_panels) throw ContourError("edge needs too many panels");
    auto h = [&](double s) { return path_sample(g, seg.at(s), cfg).logderiv * seg.velocity(s); };
    const double c = 0.5 * (p.s0 + p.s1);
    const double half = 0.5 * (p.s1 - p.s0);
    const Complex fc = h(c);
    Complex kron = detail::kWgk[7] * fc;
    Complex gauss = detail::kWg[3] * fc;
    for (int j = 0; j < 7; ++j) {
      const double dx = half * detail::kXgk[j];
      const Complex v = h(c - dx) + h(c + dx);
      kron += detail::kWgk[j] * v;
      if (j % 2 == 1) gauss += detail::kWg[j / 2] * v;
    }
    kron *= half;
    gauss *= half;
    const double dphase = wrap_angle(p.p1.phase - p.p0.phase);
    const double dmod = p.p1.log_mod - p.p0.log_mod;
    const bool ok = std::abs(kron - gauss) < 0.05 && std::abs(kron.imag()) <= 2.5 &&
                    std::abs(kron.imag() - dphase) < 0.1 && std::abs(kron.real() - dmod) < 0.1;
    if (ok) {
      total += dphase;
      continue;
    }
    if (!(c > p.s0 && c < p.s1) || p.s1 - p.s0 < 1e-14) throw ContourError("edge panel collapsed near a zero");
    const PathSample pm = sample(c);
    stack.push_back({c, p.s1, pm, p.p1});
    stack.push_back({p.s0, c, p.p0, pm});
  }
  return total;
}

inline int snap_winding(double total_arg, const char* what) {
  const double w = total_arg / (2.0 * kPi);
  const double n = std::round(w);
  if (std::abs(w - n) > 1e-3) throw NumericalError(std::string("winding number does not snap to an integer: ") + what);
  return static_cast<int>(n);
}

}  // namespace detail

// (1/2πi)∮ g'/g dz around a closed contour.
inline int winding_count(const EntireFunction& g, const Contour& contour, const ZeroLocatorConfig& cfg = {}) {
  double total = 0.0;
  for (const Segment& s : contour) total += detail::edge_arg_change(g, s, cfg);
  return detail::snap_winding(total, "contour");
}

// ---------------------------------------------------------------------------
// Subdivision

namespace detail {

struct LogBox {
  double u0, u1, t0, t1;
  double du() const { return u1 - u0; }
  double dt() const { return t1 - t0; }
  Complex center() const { return std::polar(std::exp(0.5 * (u0 + u1)), 0.5 * (t0 + t1)); }
  double diameter() const { return std::exp(u1) * std::hypot(du(), dt()); }
  bool contains(Complex z) const {
    const double u = std::log(std::abs(z));
    double rel = std::fmod(std::arg(z) - t0, 2.0 * kPi);
    if (rel < 0.0) rel += 2.0 * kPi;
    const bool in_t = rel <= dt() + 1e-12 || rel - 2.0 * kPi >= -1e-12;
    return in_t && u >= u0 - 1e-12 && u <= u1 + 1e-12;
  }
};

class Locator {
 public:
  Locator(const EntireFunction& g, const ZeroLocatorConfig& cfg, std::uint64_t seed)
      : g_(g), cfg_(cfg), rng_(seed) {}

  std::vector<ZeroRecord> run(const LogBox& box) {
    const int n = winding(box);
    if (n < 0) throw NumericalError("negative winding number for an entire function");
    out_.clear();
    process(box, n, 0);
    return out_;
  }

 private:
  double edge(const Segment& s) {
    const std::array<double, 4> key = {static_cast<double>(s.kind), s.t0, s.t1, s.kind == Segment::Kind::Arc ? s.radius : s.theta};
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const double v = edge_arg_change(g_, s, cfg_);
    cache_.emplace(key, v);
    return v;
  }

  int winding(const LogBox& b) {
    const double bottom = edge(Segment::radial(b.t0, b.u0, b.u1));
    const double top = edge(Segment::radial(b.t1, b.u0, b.u1));
    const double left = edge(Segment::arc(0.0, std::exp(b.u0), b.t0, b.t1));
    const double right = edge(Segment::arc(0.0, std::exp(b.u1), b.t0, b.t1));
    return snap_winding(bottom + right - top - left, "subdivision box");
  }

  // Newton on g^(deriv), abandoned once it leaves the disc of radius `reach` around the start.
  std::optional<std::pair<Complex, double>> newton(Complex z, int deriv, double reach) const {
    try {
      return newton_unguarded(z, deriv, reach);
    } catch (const NumericalError&) {
      return std::nullopt;
    }
  }

  std::optional<std::pair<Complex, double>> newton_unguarded(Complex z, int deriv, double reach) const {
    const Complex start = z;
    double step_size = 0.0;
    int converged_at = -1;
    for (int it = 0; it < 80; ++it) {
      if (std::abs(z - start) > reach) return std::nullopt;
      const ScaledSeries s = g_.taylor(z, deriv + 1);
      const Complex a = s.coeffs[deriv];
      const Complex b = s.coeffs[deriv + 1] * static_cast<double>(deriv + 1);
      if (a == Complex{}) return std::make_pair(z, 0.0);
      if (b == Complex{}) return std::nullopt;
      const Complex step = a / b;
      z -= step;
      step_size = std::abs(step);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return std::nullopt;
      const double scale = std::max(1.0, std::abs(z));
      if (converged_at < 0 && step_size < cfg_.tol * scale) converged_at = it;
      // two polishing steps once converged; stop early at machine resolution
      if (converged_at >= 0 && (it >= converged_at + 2 || step_size < 4e-16 * scale)) return std::make_pair(z, step_size);
    }
    if (converged_at >= 0) return std::make_pair(z, step_size);
    return std::nullopt;
  }

  // Winding around a small circle at z, trying increasing radii.
  std::optional<int> circle_multiplicity(Complex z, int expected, double max_radius) {
    const double scale = std::max(1.0, std::abs(z));
    for (double rho : {8.0 * cfg_.tol * scale, 1e-8 * scale, 1e-6 * scale, 1e-4 * scale}) {
      if (rho > max_radius) break;
      try {
        const int w = winding_count(g_, circle_contour(z, rho), cfg_);
        if (w == expected) return w;
      } catch (const ContourError&) {
      } catch (const NumericalError&) {
      }
    }
    return std::nullopt;
  }

  void process(const LogBox& b, int n, int depth) {
    if (n == 0) return;
    const bool small = b.diameter() < 4.0 * cfg_.tol * std::max(1.0, std::exp(b.u0));
    if (n == 1) {
      const auto r = newton(b.center(), 0, 2.0 * b.diameter());
      if (r && b.contains(r->first)) {
        out_.push_back({r->first, 1, r->second});
        return;
      }
    } else {
      const auto r = newton(b.center(), n - 1, 2.0 * b.diameter());
      if (r && b.contains(r->first)) {
        if (circle_multiplicity(r->first, n, 0.5 * b.diameter() + (small ? 1e-4 : 0.0))) {
          out_.push_back({r->first, n, r->second});
          return;
        }
      }
    }
    if (small && n == 1) {
      out_.push_back({b.center(), 1, b.diameter()});
      return;
    }
    if (depth >= cfg_.max_depth) throw NumericalError("zero subdivision depth exhausted");
    split(b, n, depth);
  }

  void split(const LogBox& b, int n, int depth) {
    std::uniform_real_distribution<double> jitter(-0.05, 0.05);
    const bool along_u = b.du() >= b.dt();
    for (int attempt = 0; attempt <= cfg_.max_jitter; ++attempt) {
      const double f = 0.5 + (attempt == 0 ? 0.0 : jitter(rng_));
      LogBox lo = b;
      LogBox hi = b;
      if (along_u) {
        const double m = b.u0 + f * b.du();
        lo.u1 = m;
        hi.u0 = m;
      } else {
        const double m = b.t0 + f * b.dt();
        lo.t1 = m;
        hi.t0 = m;
      }
      int nl = 0;
      int nh = 0;
      try {
        nl = winding(lo);
        nh = winding(hi);
      } catch (const ContourError&) {
        continue;
      }
      if (nl < 0 || nh < 0 || nl + nh != n) throw NumericalError("winding numbers of sub-boxes do not add up");
      process(lo, nl, depth + 1);
      process(hi, nh, depth + 1);
      return;
    }
    throw NumericalError("could not place a split line away from zeros");
  }

  const EntireFunction& g_;
  ZeroLocatorConfig cfg_;
  std::mt19937_64 rng_;
  std::map<std::array<double, 4>, double> cache_;
  std::vector<ZeroRecord> out_;
};

inline void sort_zeros(std::vector<ZeroRecord>& zs) {
  std::sort(zs.begin(), zs.end(), [](const ZeroRecord& a, const ZeroRecord& b) {
    const double ma = std::abs(a.location);
    const double mb = std::abs(b.location);
    if (ma != mb) return ma < mb;
    return std::arg(a.location) < std::arg(b.location);
  });
}

}  // namespace detail

// All zeros with 1 - margin ≤ |z| ≤ r_hi + margin in the (slightly widened)
// closed sector, unfiltered. Jitters the outer box on contour hits.
inline std::vector<ZeroRecord> locate_zeros_raw(const EntireFunction& g, const Sector& s, double r_lo, double r_hi,
                                                const ZeroLocatorConfig& cfg = {}) {
  if (!(cfg.tol >= 1e-12 && cfg.tol <= 1e-4)) throw InputError("zero tolerance must lie in [1e-12, 1e-4]");
  if (!(r_lo > 0.0) || !(r_hi > r_lo)) throw InputError("invalid radius range for zero location");
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double margin_u = 1e-6;
  const double margin_t = s.whole_plane() ? 0.0 : 1e-6;
  for (int attempt = 0; attempt <= cfg.max_jitter; ++attempt) {
    const double ju0 = attempt == 0 ? 0.0 : 1e-5 * unit(rng);
    const double ju1 = attempt == 0 ? 0.0 : 1e-5 * unit(rng);
    const double jt = attempt == 0 ? 0.0 : 1e-5 * unit(rng);
    detail::LogBox box{std::log(r_lo) - margin_u - ju0, std::log(r_hi) + margin_u + ju1, s.alpha() - margin_t - jt,
                       s.beta() + margin_t + (s.whole_plane() ? -jt : jt)};
    try {
      detail::Locator loc(g, cfg, cfg.seed + 0x9e3779b97f4a7c15ULL * (attempt + 1));
      std::vector<ZeroRecord> zs = loc.run(box);
      detail::sort_zeros(zs);
      return zs;
    } catch (const ContourError&) {
      if (attempt == cfg.max_jitter) throw;
    }
  }
  throw NumericalError("zero location failed");
}

// Closed-sector annulus membership used by the C sums: α ≤ ψ ≤ β, r_lo ≤ ρ ≤ r_hi.
inline bool in_closed_annulus(const Sector& s, double r_lo, double r_hi, Complex z) {
  const double t = std::abs(z);
  return t >= r_lo * (1.0 - 1e-12) && t <= r_hi * (1.0 + 1e-12) && s.in_closed(z, 1e-12);
}

inline std::vector<ZeroRecord> filter_region(const std::vector<ZeroRecord>& zs, const RegionSpec& region) {
  std::vector<ZeroRecord> out;
  for (const ZeroRecord& z : zs) {
    const bool keep = region.kind == RegionSpec::Kind::Tsuji ? xi_contains(region.sector, region.r_hi, z.location)
                                                             : in_closed_annulus(region.sector, region.r_lo, region.r_hi, z.location);
    if (keep) out.push_back(z);
  }
  return out;
}

inline std::vector<ZeroRecord> zeros_in_region(const EntireFunction& g, const RegionSpec& region,
                                               const ZeroLocatorConfig& cfg = {}) {
  return filter_region(locate_zeros_raw(g, region.sector, region.r_lo, region.r_hi, cfg), region);
}

// A zero within 1e-6·r of |z| = r, or of the outer Ξ boundary.
inline bool contact_radius(const std::vector<ZeroRecord>& zs, const Sector& s, double r) {
  for (const ZeroRecord& z : zs) {
    const double t = std::abs(z.location);
    if (std::abs(t - r) <= 1e-6 * r) return true;
    const double rel = s.relative_angle(z.location);
    if (rel > 0.0 && rel < s.width()) {
      const double bound = s.xi_bound(r, rel);
      if (std::abs(t - bound) <= 1e-6 * r) return true;
    }
  }
  return false;
}

}  // namespace nevang
