#pragma once

// Angular domains, holomorphic curves in reduced representation, homogeneous
// forms on P^n and the constructions built from them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nevang/errors.hpp"
#include "nevang/expr.hpp"

namespace nevang {

// ---------------------------------------------------------------------------
// Sector Ω(α, β) with opening constant k = π / (β − α).

class Sector {
 public:
  Sector(double alpha, double beta) : alpha_(alpha), beta_(beta) {
    const double w = beta - alpha;
    if (!(w > 0.0) || w > 2.0 * kPi * (1.0 + 1e-15) || !std::isfinite(w)) {
      throw InputError("sector requires 0 < beta - alpha <= 2*pi");
    }
    k_ = kPi / w;
  }

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double k() const { return k_; }
  double width() const { return beta_ - alpha_; }
  bool whole_plane() const { return width() >= 2.0 * kPi * (1.0 - 1e-15); }

  // arg z − α normalized into [0, 2π).
  double relative_angle(Complex z) const {
    double t = std::arg(z) - alpha_;
    t = std::fmod(t, 2.0 * kPi);
    if (t < 0.0) t += 2.0 * kPi;
    if (t >= 2.0 * kPi) t = 0.0;
    return t;
  }

  // Angle relative to α, unwrapped so points just below α come out slightly
  // negative instead of near 2π (closed-sector tests with tolerance).
  double signed_relative_angle(Complex z) const {
    const double t = relative_angle(z);
    if (whole_plane()) return t;
    const double excess = t - width();
    return excess > 0.0 && excess > 2.0 * kPi - t - 1e-300 ? t - 2.0 * kPi : t;
  }

  // α < θ < β.
  bool in_open(Complex z) const {
    const double t = relative_angle(z);
    return t > 0.0 && t < width();
  }

  // α ≤ θ ≤ β, with an angular tolerance for points computed numerically.
  bool in_closed(Complex z, double tol = 0.0) const {
    if (whole_plane()) return true;
    const double t = signed_relative_angle(z);
    return t >= -tol && t <= width() + tol;
  }

  // r (sin k(θ − α))^{1/k}, the outer boundary of Ξ(α, β; r) at relative angle θ.
  double xi_bound(double r, double rel_angle) const {
    const double s = std::sin(k_ * rel_angle);
    if (!(s > 0.0)) return 0.0;
    return r * std::pow(s, 1.0 / k_);
  }

  // Point of the Tsuji boundary curve z(φ) = r sin^{1/k}φ e^{i(α+φ/k)}, φ ∈ (0, π).
  Complex tsuji_point(double r, double phi) const {
    return std::polar(r * std::pow(std::sin(phi), 1.0 / k_), alpha_ + phi / k_);
  }

 private:
  double alpha_;
  double beta_;
  double k_;
};

inline constexpr double kXiBoundaryTol = 1e-12;

// z ∈ Ξ(α, β; r) = {t e^{iθ}: α < θ < β, 1 < t ≤ r (sin k(θ−α))^{1/k}}; the outer
// boundary is inclusive up to a relative rounding tolerance.
inline bool xi_contains(const Sector& s, double r, Complex z) {
  if (!(r > 1.0)) throw InputError("xi_contains requires r > 1");
  const double t = std::abs(z);
  if (!(t > 1.0)) return false;
  const double rel = s.relative_angle(z);
  if (!(rel > 0.0 && rel < s.width())) return false;
  return t <= s.xi_bound(r, rel) * (1.0 + kXiBoundaryTol);
}

// ---------------------------------------------------------------------------
// Curves

class Curve {
 public:
  explicit Curve(std::vector<Expr> components) : components_(std::move(components)) {
    if (components_.size() < 2) throw InputError("a curve into P^n needs at least two components");
    functions_.reserve(components_.size());
    for (const Expr& e : components_) functions_.emplace_back(e);
    if (all_vanish_identically()) throw DegenerateError("all curve components vanish identically");
  }

  static Curve parse(const std::vector<std::string>& texts) {
    std::vector<Expr> comps;
    comps.reserve(texts.size());
    for (const std::string& t : texts) comps.push_back(parse_expr(t));
    return Curve(std::move(comps));
  }

  int dim() const { return static_cast<int>(components_.size()) - 1; }
  const std::vector<Expr>& components() const { return components_; }
  const Expr& component(int j) const { return components_[j]; }
  const EntireFunction& function(int j) const { return functions_[j]; }

  std::vector<ScaledSeries> taylor(Complex z, int order) const {
    std::vector<ScaledSeries> out;
    out.reserve(functions_.size());
    for (const EntireFunction& f : functions_) out.push_back(f.taylor(z, order));
    return out;
  }

 private:
  bool all_vanish_identically() const {
    for (int i = 0; i < 8; ++i) {
      const Complex z = std::polar(0.7 + 0.37 * i, 0.9 + 2.1 * i);
      for (const EntireFunction& f : functions_) {
        if (!f.taylor(z, 0).is_zero()) return false;
      }
    }
    return true;
  }

  std::vector<Expr> components_;
  std::vector<EntireFunction> functions_;
};

// log ‖f(z)‖ with ‖f‖ = max_j |f_j|, computed in scaled form.
inline double sup_log_norm(const Curve& f, Complex z) {
  double best = -std::numeric_limits<double>::infinity();
  for (int j = 0; j <= f.dim(); ++j) best = std::max(best, f.function(j).log_abs(z));
  if (std::isinf(best) && best < 0.0) {
    throw DegenerateError("all components vanish at a point: not a reduced representation");
  }
  return best;
}

struct ReducedVerdict {
  bool pass = true;
  std::optional<Complex> witness;
  std::string note;
};

namespace detail {

inline double halton(std::uint64_t index, std::uint64_t base) {
  double f = 1.0;
  double r = 0.0;
  while (index > 0) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

// Newton iteration on one component; returns the limit if it converged.
inline std::optional<Complex> newton_zero(const EntireFunction& g, Complex z, int iters = 40) {
  for (int it = 0; it < iters; ++it) {
    const ScaledSeries s = g.taylor(z, 1);
    if (s.coeffs[0] == Complex{}) return z;
    if (s.coeffs[1] == Complex{}) return std::nullopt;
    const Complex step = s.coeffs[0] / s.coeffs[1];
    z -= step;
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return std::nullopt;
    if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(z))) return z;
  }
  return std::nullopt;
}

}  // namespace detail

// Heuristic search for common zeros of the components in the sector annulus
// {1 ≤ |z| ≤ r_max}: quasi-random samples, each followed by Newton descent on
// every component; a Newton limit where all components are small relative to
// the local magnitude scale is reported as a witness.
inline ReducedVerdict reduced_check(const Curve& f, const Sector& s, double r_max, int samples,
                                    double eps_common = 1e-9) {
  if (samples < 64) throw InputError("reduced_check needs at least 64 samples");
  if (!(r_max > 1.0)) throw InputError("reduced_check needs r_max > 1");
  ReducedVerdict v;
  v.note = "heuristic certificate: no common zero found at " + std::to_string(samples) + " sampled starts";
  const double log_r = std::log(r_max);
  auto common_zero_at = [&](Complex z) {
    double max_val = 0.0;
    double scale = 0.0;
    const double h = std::max(1.0, std::abs(z));
    std::vector<ScaledSeries> ts = f.taylor(z, 1);
    double e_max = -1e300;
    for (const ScaledSeries& t : ts) {
      if (!t.is_zero()) e_max = std::max(e_max, t.exp2);
    }
    for (const ScaledSeries& t : ts) {
      const double shift = t.exp2 - e_max;
      const double v0 = std::ldexp(std::abs(t.coeffs[0]), static_cast<int>(std::max(shift, -2000.0)));
      const double v1 = std::ldexp(std::abs(t.coeffs[1]), static_cast<int>(std::max(shift, -2000.0)));
      max_val = std::max(max_val, v0);
      scale = std::max({scale, v0, v1 * h});
    }
    return scale > 0.0 && max_val < eps_common * scale;
  };
  auto in_region = [&](Complex z) {
    const double t = std::abs(z);
    return t >= 1.0 - 1e-9 && t <= r_max * (1.0 + 1e-9) && s.in_closed(z, 1e-9);
  };
  for (int i = 0; i < samples; ++i) {
    const double u = detail::halton(static_cast<std::uint64_t>(i) + 1, 2);
    const double w = detail::halton(static_cast<std::uint64_t>(i) + 1, 3);
    const Complex z0 = std::polar(std::exp(u * log_r), s.alpha() + w * s.width());
    if (common_zero_at(z0)) {
      v.pass = false;
      v.witness = z0;
      v.note = "common zero of all components";
      return v;
    }
    for (int j = 0; j <= f.dim(); ++j) {
      const auto zj = detail::newton_zero(f.function(j), z0);
      if (zj && in_region(*zj) && common_zero_at(*zj)) {
        v.pass = false;
        v.witness = *zj;
        v.note = "common zero of all components";
        return v;
      }
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// Homogeneous forms

class HomogForm {
 public:
  struct Monomial {
    Complex coeff;
    std::vector<int> exponents;
  };

  HomogForm(int n_vars, int degree, std::vector<Monomial> monomials) : n_vars_(n_vars), degree_(degree) {
    if (n_vars < 1) throw InputError("homogeneous form needs at least one variable");
    if (degree < 0) throw InputError("homogeneous form degree must be nonnegative");
    std::map<std::vector<int>, Complex, std::greater<>> merged;
    for (Monomial& m : monomials) {
      if (static_cast<int>(m.exponents.size()) != n_vars) throw InputError("monomial exponent vector has wrong length");
      int sum = 0;
      for (int e : m.exponents) {
        if (e < 0) throw InputError("negative exponent in homogeneous form");
        sum += e;
      }
      if (sum != degree) throw InputError("monomial degree differs from the form's degree (not homogeneous)");
      merged[m.exponents] += m.coeff;
    }
    for (auto& [e, c] : merged) {
      if (c != Complex{}) monomials_.push_back({c, e});
    }
    if (monomials_.empty()) throw InputError("homogeneous form has no nonzero coefficient");
  }

  // Degree-1 form Σ a_j x_j.
  static HomogForm linear(const std::vector<Complex>& a) {
    std::vector<Monomial> ms;
    for (std::size_t j = 0; j < a.size(); ++j) {
      std::vector<int> e(a.size(), 0);
      e[j] = 1;
      ms.push_back({a[j], e});
    }
    return HomogForm(static_cast<int>(a.size()), 1, std::move(ms));
  }

  int n_vars() const { return n_vars_; }
  int degree() const { return degree_; }
  const std::vector<Monomial>& monomials() const { return monomials_; }

  friend HomogForm operator*(const HomogForm& a, const HomogForm& b) {
    if (a.n_vars_ != b.n_vars_) throw InputError("forms in different numbers of variables");
    std::vector<Monomial> ms;
    for (const Monomial& x : a.monomials_) {
      for (const Monomial& y : b.monomials_) {
        std::vector<int> e(x.exponents);
        for (std::size_t j = 0; j < e.size(); ++j) e[j] += y.exponents[j];
        ms.push_back({x.coeff * y.coeff, std::move(e)});
      }
    }
    return HomogForm(a.n_vars_, a.degree_ + b.degree_, std::move(ms));
  }

  friend HomogForm operator+(const HomogForm& a, const HomogForm& b) {
    if (a.n_vars_ != b.n_vars_ || a.degree_ != b.degree_) throw InputError("adding forms of different shape");
    std::vector<Monomial> ms = a.monomials_;
    ms.insert(ms.end(), b.monomials_.begin(), b.monomials_.end());
    return HomogForm(a.n_vars_, a.degree_, std::move(ms));
  }

  friend HomogForm pow(const HomogForm& a, int n) {
    std::vector<int> zero(a.n_vars_, 0);
    HomogForm r(a.n_vars_, 0, {{1.0, zero}});
    for (int i = 0; i < n; ++i) r = r * a;
    return r;
  }

  // Coefficient vector of a degree-1 form.
  std::vector<Complex> linear_coefficients() const {
    if (degree_ != 1) throw InputError("form is not linear");
    std::vector<Complex> a(n_vars_);
    for (const Monomial& m : monomials_) {
      for (int j = 0; j < n_vars_; ++j) {
        if (m.exponents[j] == 1) a[j] += m.coeff;
      }
    }
    return a;
  }

  double coefficient_norm() const {
    double s = 0.0;
    for (const Monomial& m : monomials_) s += std::abs(m.coeff);
    return s;
  }

  friend bool operator==(const HomogForm& a, const HomogForm& b) {
    if (a.n_vars_ != b.n_vars_ || a.degree_ != b.degree_ || a.monomials_.size() != b.monomials_.size()) return false;
    for (std::size_t i = 0; i < a.monomials_.size(); ++i) {
      if (a.monomials_[i].coeff != b.monomials_[i].coeff || a.monomials_[i].exponents != b.monomials_[i].exponents) {
        return false;
      }
    }
    return true;
  }

 private:
  int n_vars_;
  int degree_;
  std::vector<Monomial> monomials_;  // merged, nonzero, sorted by descending exponent vector
};

using HyperplaneVec = std::vector<Complex>;

inline Complex homog_eval(const HomogForm& q, const std::vector<Complex>& x) {
  if (static_cast<int>(x.size()) != q.n_vars()) throw InputError("point dimension does not match the form");
  Complex sum{};
  for (const HomogForm::Monomial& m : q.monomials()) {
    Complex term = m.coeff;
    for (std::size_t j = 0; j < x.size(); ++j) {
      for (int p = 0; p < m.exponents[j]; ++p) term *= x[j];
    }
    sum += term;
  }
  return sum;
}

// log |Q(x)| for coordinates given as scaled values (overflow regime).
inline double homog_log_abs(const HomogForm& q, const std::vector<ScaledSeries>& x) {
  if (static_cast<int>(x.size()) != q.n_vars()) throw InputError("point dimension does not match the form");
  ScaledSeries sum = ScaledSeries::constant(0.0, 0);
  for (const HomogForm::Monomial& m : q.monomials()) {
    ScaledSeries term = ScaledSeries::constant(m.coeff, 0);
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (m.exponents[j] > 0) term = term * pow(x[j], static_cast<unsigned>(m.exponents[j]));
    }
    sum = sum + term;
  }
  return sum.log_abs(0);
}

// JSON {"n_vars", "degree", "monomials": [{"c": [re, im], "e": [...]}]}.
inline nlohmann::json to_json(const HomogForm& q) {
  nlohmann::json ms = nlohmann::json::array();
  for (const HomogForm::Monomial& m : q.monomials()) {
    ms.push_back({{"c", {m.coeff.real(), m.coeff.imag()}}, {"e", m.exponents}});
  }
  return {{"n_vars", q.n_vars()}, {"degree", q.degree()}, {"monomials", ms}};
}

inline HomogForm homog_from_json(const nlohmann::json& j) {
  try {
    const int n = j.at("n_vars").get<int>();
    const int d = j.at("degree").get<int>();
    std::vector<HomogForm::Monomial> ms;
    for (const auto& m : j.at("monomials")) {
      const auto& c = m.at("c");
      Complex coeff;
      if (c.is_number()) coeff = c.get<double>();
      else coeff = {c.at(0).get<double>(), c.size() > 1 ? c.at(1).get<double>() : 0.0};
      ms.push_back({coeff, m.at("e").get<std::vector<int>>()});
    }
    return HomogForm(n, d, std::move(ms));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed homogeneous form JSON: ") + e.what());
  }
}

namespace detail {

// Sparse polynomial in x0..x_{n-1} used while parsing.
using Poly = std::map<std::vector<int>, Complex, std::greater<>>;

inline Poly poly_mul(const Poly& a, const Poly& b) {
  Poly r;
  for (const auto& [ea, ca] : a) {
    for (const auto& [eb, cb] : b) {
      std::vector<int> e(ea.size());
      for (std::size_t j = 0; j < e.size(); ++j) e[j] = ea[j] + eb[j];
      r[e] += ca * cb;
    }
  }
  return r;
}

inline Poly poly_add(Poly a, const Poly& b, double sign) {
  for (const auto& [e, c] : b) a[e] += sign * c;
  return a;
}

class HomogParser {
 public:
  HomogParser(std::string_view text, int n_vars) : s_(text), n_(n_vars) {}

  Poly parse() {
    if (s_.at_end()) s_.fail("empty expression");
    Poly p = expr();
    if (!s_.at_end()) s_.fail("unexpected character");
    return p;
  }

 private:
  Poly constant(Complex c) const { return Poly{{std::vector<int>(n_, 0), c}}; }

  Poly expr() {
    Poly p = term();
    for (;;) {
      if (s_.accept('+')) p = poly_add(std::move(p), term(), 1.0);
      else if (s_.accept('-')) p = poly_add(std::move(p), term(), -1.0);
      else return p;
    }
  }
  Poly term() {
    Poly p = factor();
    while (s_.accept('*')) p = poly_mul(p, factor());
    return p;
  }
  Poly factor() {
    Poly a = atom();
    if (s_.accept('^')) {
      const unsigned k = s_.uint();
      Poly r = constant(1.0);
      for (unsigned i = 0; i < k; ++i) r = poly_mul(r, a);
      return r;
    }
    return a;
  }
  Poly atom() {
    if (s_.accept('-')) return poly_add(constant(0.0), atom(), -1.0);
    Complex c;
    if (s_.paren_complex(c)) return constant(c);
    if (s_.accept('(')) {
      Poly p = expr();
      s_.expect(')', "')'");
      return p;
    }
    if (s_.starts_number()) {
      const double x = s_.number();
      if (s_.accept('i')) return constant({0.0, x});
      return constant(x);
    }
    if (s_.peek() == 'x') {
      s_.accept('x');
      const std::size_t at = s_.pos();
      if (!std::isdigit(static_cast<unsigned char>(s_.peek()))) s_.fail("expected variable index after x");
      const unsigned idx = s_.uint();
      if (static_cast<int>(idx) >= n_) {
        s_.reset(at);
        s_.fail("variable index exceeds the number of variables");
      }
      std::vector<int> e(n_, 0);
      e[idx] = 1;
      return Poly{{e, 1.0}};
    }
    s_.fail("expected x<index>, a number or '('");
  }

  Scanner s_;
  int n_;
};

inline int max_variable_index(std::string_view text) {
  int best = -1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != 'x') continue;
    std::size_t j = i + 1;
    int v = 0;
    bool any = false;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
      v = v * 10 + (text[j] - '0');
      any = true;
      ++j;
    }
    if (any) best = std::max(best, v);
  }
  return best;
}

}  // namespace detail

// Parses a polynomial in x0..x{n_vars-1} (same operators as entire expressions,
// no transcendental functions) and validates homogeneity. n_vars = 0 infers it
// from the largest variable index.
inline HomogForm parse_homog(std::string_view text, int n_vars = 0) {
  if (n_vars <= 0) n_vars = detail::max_variable_index(text) + 1;
  if (n_vars <= 0) throw ParseError("homogeneous form mentions no variable x0..xN", 0);
  const detail::Poly p = detail::HomogParser(text, n_vars).parse();
  std::vector<HomogForm::Monomial> ms;
  int degree = -1;
  for (const auto& [e, c] : p) {
    if (c == Complex{}) continue;
    const int d = std::accumulate(e.begin(), e.end(), 0);
    if (degree >= 0 && d != degree) throw InputError("polynomial is not homogeneous: degrees " + std::to_string(degree) + " and " + std::to_string(d));
    degree = d;
    ms.push_back({c, e});
  }
  if (degree < 0) throw InputError("homogeneous form is identically zero");
  return HomogForm(n_vars, degree, std::move(ms));
}

inline std::string to_string(const HomogForm& q) {
  std::string out;
  bool first = true;
  for (const HomogForm::Monomial& m : q.monomials()) {
    if (!first) out += " + ";
    first = false;
    out += detail::format_constant(m.coeff);
    for (std::size_t j = 0; j < m.exponents.size(); ++j) {
      if (m.exponents[j] == 0) continue;
      out += "*x" + std::to_string(j);
      if (m.exponents[j] > 1) out += "^" + std::to_string(m.exponents[j]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Composition Q∘f as an entire expression.

inline Expr compose_expr(const HomogForm& q, const Curve& f) {
  if (q.n_vars() != f.dim() + 1) throw InputError("form variables do not match the curve dimension");
  std::optional<Expr> sum;
  for (const HomogForm::Monomial& m : q.monomials()) {
    std::optional<Expr> term;
    if (m.coeff != Complex(1.0)) term = Expr::constant(m.coeff);
    for (int j = 0; j <= f.dim(); ++j) {
      const int e = m.exponents[j];
      if (e == 0) continue;
      const Expr factor = e == 1 ? f.component(j) : pow(f.component(j), static_cast<unsigned>(e));
      term = term ? *term * factor : factor;
    }
    if (!term) term = Expr::constant(m.coeff);
    sum = sum ? *sum + *term : *term;
  }
  return *sum;
}

// True when Q∘f vanishes (relative to Σ|c|·‖f‖^d) at all of a fixed set of sample points.
inline bool composition_vanishes(const HomogForm& q, const Curve& f, const EntireFunction& qf) {
  for (int i = 0; i < 12; ++i) {
    const Complex z = std::polar(0.6 + 0.53 * i, 0.4 + 2.3 * i);
    const double lq = qf.log_abs(z);
    const double lf = sup_log_norm(f, z);
    if (lq > std::log(q.coefficient_norm()) + q.degree() * lf + std::log(1e-12)) return false;
  }
  return true;
}

// Q∘f bundled with its source form; the jet-evaluable object behind every
// Q-dependent functional.
struct Composition {
  HomogForm form;
  Expr expr;
  EntireFunction fn;
};

inline Composition compose(const HomogForm& q, const Curve& f) {
  Expr e = compose_expr(q, f);
  EntireFunction fn(e);
  if (composition_vanishes(q, f, fn)) {
    throw DegenerateError("Q(f) vanishes identically: the image of the curve lies in the hypersurface");
  }
  return {q, std::move(e), std::move(fn)};
}

// ---------------------------------------------------------------------------
// General position

namespace detail {

// Determinant by LU with partial pivoting.
inline Complex determinant(std::vector<std::vector<Complex>> m) {
  const std::size_t n = m.size();
  Complex det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(m[r][c]) > std::abs(m[p][c])) p = r;
    }
    if (m[p][c] == Complex{}) return 0.0;
    if (p != c) {
      std::swap(m[p], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const Complex f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

// Calls fn(subset) for every k-subset of {0..n-1} in lexicographic order.
template <class Fn>
bool for_each_subset(int n, int k, Fn&& fn) {
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  if (k > n) return true;
  for (;;) {
    if (!fn(idx)) return false;
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return true;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

inline double vec_norm(const std::vector<Complex>& v) {
  double s = 0.0;
  for (const Complex& c : v) s += std::norm(c);
  return std::sqrt(s);
}

}  // namespace detail

// Every (n+1)-subset of coefficient vectors has |det| > eps_gp · Π row norms.
inline bool hyperplanes_general_position(const std::vector<HyperplaneVec>& hs, int n, double eps_gp = 1e-9) {
  const int q = static_cast<int>(hs.size());
  if (q < n + 1) throw InputError("general position needs at least n+1 hyperplanes");
  for (const HyperplaneVec& h : hs) {
    if (static_cast<int>(h.size()) != n + 1) throw InputError("hyperplane vector has wrong dimension");
    if (detail::vec_norm(h) == 0.0) throw InputError("hyperplane vector is zero");
  }
  return detail::for_each_subset(q, n + 1, [&](const std::vector<int>& sub) {
    std::vector<std::vector<Complex>> m;
    double scale = 1.0;
    for (int i : sub) {
      m.push_back(hs[i]);
      scale *= detail::vec_norm(hs[i]);
    }
    return std::abs(detail::determinant(m)) > eps_gp * scale;
  });
}

// Rank of a set of vectors (Gaussian elimination with relative threshold).
inline int vector_rank(std::vector<std::vector<Complex>> rows, double eps = 1e-9) {
  if (rows.empty()) return 0;
  const std::size_t cols = rows[0].size();
  double scale = 0.0;
  for (const auto& r : rows) scale = std::max(scale, detail::vec_norm(r));
  int rank = 0;
  for (std::size_t c = 0; c < cols && rank < static_cast<int>(rows.size()); ++c) {
    std::size_t p = rank;
    for (std::size_t r = rank; r < rows.size(); ++r) {
      if (std::abs(rows[r][c]) > std::abs(rows[p][c])) p = r;
    }
    if (std::abs(rows[p][c]) <= eps * scale) continue;
    std::swap(rows[p], rows[rank]);
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      const Complex f = rows[r][c] / rows[rank][c];
      for (std::size_t k = c; k < cols; ++k) rows[r][k] -= f * rows[rank][k];
    }
    ++rank;
  }
  return rank;
}

struct GeneralPositionVerdict {
  bool pass = true;
  std::vector<int> subset;              // offending subset on failure
  std::vector<Complex> witness;         // common projective zero (largest coordinate 1)
  double best_residual = 0.0;           // smallest residual found over all subsets
  std::string note;
};

namespace detail {

// Partial derivative of a form with respect to x_j at x.
inline Complex homog_partial(const HomogForm& q, const std::vector<Complex>& x, std::size_t j) {
  Complex sum{};
  for (const HomogForm::Monomial& m : q.monomials()) {
    if (m.exponents[j] == 0) continue;
    Complex term = m.coeff * static_cast<double>(m.exponents[j]);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const int e = i == j ? m.exponents[i] - 1 : m.exponents[i];
      for (int p = 0; p < e; ++p) term *= x[i];
    }
    sum += term;
  }
  return sum;
}

// Solves the dense complex system A x = b (A square) by Gaussian elimination.
inline std::vector<Complex> solve(std::vector<std::vector<Complex>> a, std::vector<Complex> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    }
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    if (a[c][c] == Complex{}) continue;
    for (std::size_t r = c + 1; r < n; ++r) {
      const Complex f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<Complex> x(n);
  for (std::size_t i = n; i-- > 0;) {
    Complex s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = a[i][i] == Complex{} ? Complex{} : s / a[i][i];
  }
  return x;
}

inline void normalize_unit(std::vector<Complex>& x) {
  const double n = vec_norm(x);
  for (Complex& c : x) c /= n;
}

inline double residual(const std::vector<const HomogForm*>& qs, const std::vector<Complex>& x) {
  double s = 0.0;
  for (const HomogForm* q : qs) s += std::norm(homog_eval(*q, x)) / (q->coefficient_norm() * q->coefficient_norm());
  return std::sqrt(s);
}

// Damped Gauss-Newton descent of Σ|Q_i(x)|² on the unit sphere, steps restricted
// to the tangent space (the radial direction only rescales the projective point).
inline std::pair<double, std::vector<Complex>> descend(const std::vector<const HomogForm*>& qs, std::vector<Complex> x,
                                                        int iters) {
  const std::size_t n = x.size();
  normalize_unit(x);
  double res = residual(qs, x);
  double mu = 1e-3;
  for (int it = 0; it < iters && res > 1e-15; ++it) {
    std::vector<std::vector<Complex>> jac(qs.size(), std::vector<Complex>(n));
    std::vector<Complex> r(qs.size());
    for (std::size_t i = 0; i < qs.size(); ++i) {
      const double w = 1.0 / qs[i]->coefficient_norm();
      r[i] = homog_eval(*qs[i], x) * w;
      for (std::size_t j = 0; j < n; ++j) jac[i][j] = homog_partial(*qs[i], x, j) * w;
      // project rows onto the tangent space: J (I − x x^H)
      Complex jx{};
      for (std::size_t j = 0; j < n; ++j) jx += jac[i][j] * x[j];
      for (std::size_t j = 0; j < n; ++j) jac[i][j] -= jx * std::conj(x[j]);
    }
    std::vector<std::vector<Complex>> a(n, std::vector<Complex>(n));
    std::vector<Complex> g(n);
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = 0; q < n; ++q) {
        Complex s{};
        for (std::size_t i = 0; i < qs.size(); ++i) s += std::conj(jac[i][p]) * jac[i][q];
        a[p][q] = s;
      }
      Complex s{};
      for (std::size_t i = 0; i < qs.size(); ++i) s += std::conj(jac[i][p]) * r[i];
      g[p] = -s;
    }
    bool improved = false;
    for (int tries = 0; tries < 12; ++tries) {
      auto damped = a;
      for (std::size_t p = 0; p < n; ++p) damped[p][p] += mu;
      std::vector<Complex> step = solve(damped, g);
      std::vector<Complex> y(n);
      for (std::size_t j = 0; j < n; ++j) y[j] = x[j] + step[j];
      normalize_unit(y);
      const double ry = residual(qs, y);
      if (ry < res) {
        x = std::move(y);
        res = ry;
        mu = std::max(mu * 0.3, 1e-12);
        improved = true;
        break;
      }
      mu *= 10.0;
    }
    if (!improved) break;
  }
  return {res, x};
}

}  // namespace detail

// Sampled general-position check for hypersurfaces in P^n: for every
// (n+1)-subset, multi-start descent looks for a common projective zero.
inline GeneralPositionVerdict hypersurfaces_general_position_sampled(const std::vector<HomogForm>& qs, int n, int budget,
                                                                     std::uint64_t seed = 0, double eps_cz = 1e-10) {
  if (static_cast<int>(qs.size()) < n + 1) throw InputError("general position needs at least n+1 hypersurfaces");
  for (const HomogForm& q : qs) {
    if (q.n_vars() != n + 1) throw InputError("hypersurface lives in the wrong projective space");
  }
  GeneralPositionVerdict v;
  v.best_residual = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  const int starts = std::max(budget, 1);
  detail::for_each_subset(static_cast<int>(qs.size()), n + 1, [&](const std::vector<int>& sub) {
    std::vector<const HomogForm*> sel;
    for (int i : sub) sel.push_back(&qs[i]);
    std::vector<std::vector<Complex>> inits;
    for (int j = 0; j <= n; ++j) {
      std::vector<Complex> e(n + 1, 0.0);
      e[j] = 1.0;
      inits.push_back(e);
    }
    for (int s = 0; s < starts; ++s) {
      std::vector<Complex> x(n + 1);
      for (Complex& c : x) c = {gauss(rng), gauss(rng)};
      inits.push_back(x);
    }
    for (const auto& x0 : inits) {
      auto [res, x] = detail::descend(sel, x0, 200);
      v.best_residual = std::min(v.best_residual, res);
      if (res < eps_cz) {
        std::size_t big = 0;
        for (std::size_t j = 1; j < x.size(); ++j) {
          if (std::abs(x[j]) > std::abs(x[big])) big = j;
        }
        const Complex piv = x[big];
        for (Complex& c : x) {
          c /= piv;
          if (std::abs(c) < 1e-9) c = 0.0;
        }
        v.pass = false;
        v.subset = sub;
        v.witness = x;
        v.note = "common projective zero found";
        return false;
      }
    }
    return true;
  });
  if (v.pass) v.note = "heuristic pass: no common zero found by sampled descent";
  return v;
}

// ---------------------------------------------------------------------------
// Constructions around the hypersurface D = {Σ H_i^n Q_i = 0}

inline bool hypersurface_degree_ok(int N, int d, int n) { return n > N * (d + N + 1); }

inline HomogForm build_hypersurface_target(const std::vector<HyperplaneVec>& hs, const std::vector<HomogForm>& qs, int n) {
  if (hs.empty() || hs.size() != qs.size()) throw InputError("need N+1 hyperplanes and N+1 forms");
  const int d = qs.front().degree();
  for (const HomogForm& q : qs) {
    if (q.degree() != d) throw InputError("all forms Q_i must share one degree");
    if (q.n_vars() != static_cast<int>(hs.size())) throw InputError("forms must live in P^N with N+1 = number of hyperplanes");
  }
  if (n < 0) throw InputError("power n must be nonnegative");
  std::optional<HomogForm> sum;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (static_cast<int>(hs[i].size()) != qs[i].n_vars()) throw InputError("hyperplane dimension mismatch");
    HomogForm term = pow(HomogForm::linear(hs[i]), n) * qs[i];
    sum = sum ? *sum + term : term;
  }
  return *sum;
}

// F = (φ_0 f_0^n : … : φ_N f_N^n) with φ_i = Q_i∘f.
inline Curve build_F_curve(const Curve& f, const std::vector<HomogForm>& qs, int n) {
  if (static_cast<int>(qs.size()) != f.dim() + 1) throw InputError("need one form per curve component");
  if (n < 0) throw InputError("power n must be nonnegative");
  std::vector<Expr> comps;
  for (int i = 0; i <= f.dim(); ++i) {
    const Composition phi = compose(qs[i], f);
    if (n == 0) comps.push_back(phi.expr);
    else comps.push_back(phi.expr * (n == 1 ? f.component(i) : pow(f.component(i), static_cast<unsigned>(n))));
  }
  return Curve(std::move(comps));
}

}  // namespace nevang
