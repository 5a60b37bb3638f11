#pragma once

// Truncated Taylor series with a shared binary exponent.
//
// A ScaledSeries of order m stores c_0..c_m and an integer-valued exponent e;
// the represented Taylor coefficients are c_j * 2^e. Keeping the exponent
// outside the doubles lets e^z be evaluated at |z| ~ 1e4 and beyond, while
// rescaling by powers of two keeps ordinary-range arithmetic bit-identical to
// plain complex arithmetic.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "nevang/errors.hpp"

namespace nevang {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

// max(0, log x) with log_plus(0) = 0.
inline double log_plus(double x) {
  if (!(x > 1.0)) return 0.0;
  return std::log(x);
}

struct ScaledSeries {
  double exp2 = 0.0;             // integer-valued binary exponent
  std::vector<Complex> coeffs;   // Taylor coefficients, scaled by 2^-exp2

  int order() const { return static_cast<int>(coeffs.size()) - 1; }

  bool is_zero() const {
    return std::all_of(coeffs.begin(), coeffs.end(), [](Complex c) { return c == Complex{}; });
  }

  // log |c_j 2^exp2|; -inf for an exact zero.
  double log_abs(int j = 0) const {
    const double a = std::abs(coeffs[j]);
    if (a == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(a) + exp2 * std::numbers::ln2;
  }

  // Unscaled coefficient; throws when it does not fit in a double.
  Complex coefficient(int j) const {
    const Complex c = coeffs[j];
    if (c == Complex{}) return c;
    const Complex v{std::ldexp(c.real(), static_cast<int>(clamp_exp(exp2))),
                    std::ldexp(c.imag(), static_cast<int>(clamp_exp(exp2)))};
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw OverflowError("series coefficient overflows double", log_abs(j) / std::numbers::ln10);
    }
    return v;
  }

  // j-th derivative value f^(j)(center) = j! * coefficient(j).
  Complex derivative(int j) const {
    double fact = 1.0;
    for (int i = 2; i <= j; ++i) fact *= i;
    return coefficient(j) * fact;
  }

  static double clamp_exp(double e) { return std::clamp(e, -1.0e6, 1.0e6); }

  static ScaledSeries constant(Complex c, int order) {
    ScaledSeries s;
    s.coeffs.assign(order + 1, Complex{});
    s.coeffs[0] = c;
    return s;
  }

  static ScaledSeries variable(Complex z, int order) {
    ScaledSeries s = constant(z, order);
    if (order >= 1) s.coeffs[1] = 1.0;
    return s;
  }
};

namespace detail {

inline Complex ldexp_c(Complex c, double e) {
  if (e < -2000.0) return Complex{};
  const int ie = static_cast<int>(e);
  return {std::ldexp(c.real(), ie), std::ldexp(c.imag(), ie)};
}

inline void check_finite(const ScaledSeries& s) {
  for (const Complex& c : s.coeffs) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      throw OverflowError("non-finite value in jet arithmetic", 308.0 + s.exp2 * 0.30103);
    }
  }
}

}  // namespace detail

// Moves the binary exponent so the largest coefficient lies in [2^-400, 2^400];
// coefficients already in range are left untouched.
inline void normalize(ScaledSeries& s) {
  double m = 0.0;
  for (const Complex& c : s.coeffs) m = std::max({m, std::abs(c.real()), std::abs(c.imag())});
  if (m == 0.0) {
    s.exp2 = 0.0;
    return;
  }
  detail::check_finite(s);
  if (m > 0x1p-400 && m < 0x1p400) return;
  int e = 0;
  std::frexp(m, &e);
  for (Complex& c : s.coeffs) c = detail::ldexp_c(c, -e);
  s.exp2 += e;
}

inline ScaledSeries operator-(ScaledSeries a) {
  for (Complex& c : a.coeffs) c = -c;
  return a;
}

inline ScaledSeries add(const ScaledSeries& a, const ScaledSeries& b, double sign = 1.0) {
  const std::size_t n = std::min(a.coeffs.size(), b.coeffs.size());
  ScaledSeries r;
  r.coeffs.resize(n);
  const bool a_zero = a.is_zero();
  const bool b_zero = b.is_zero();
  if (b_zero || (!a_zero && a.exp2 - b.exp2 > 1100.0)) {
    r.exp2 = a.exp2;
    std::copy_n(a.coeffs.begin(), n, r.coeffs.begin());
    return r;
  }
  if (a_zero || b.exp2 - a.exp2 > 1100.0) {
    r.exp2 = b.exp2;
    for (std::size_t j = 0; j < n; ++j) r.coeffs[j] = sign * b.coeffs[j];
    return r;
  }
  r.exp2 = std::max(a.exp2, b.exp2);
  const double da = a.exp2 - r.exp2;
  const double db = b.exp2 - r.exp2;
  for (std::size_t j = 0; j < n; ++j) {
    const Complex x = da == 0.0 ? a.coeffs[j] : detail::ldexp_c(a.coeffs[j], da);
    const Complex y = db == 0.0 ? b.coeffs[j] : detail::ldexp_c(b.coeffs[j], db);
    r.coeffs[j] = x + sign * y;
  }
  normalize(r);
  return r;
}

inline ScaledSeries operator+(const ScaledSeries& a, const ScaledSeries& b) { return add(a, b, 1.0); }
inline ScaledSeries operator-(const ScaledSeries& a, const ScaledSeries& b) { return add(a, b, -1.0); }

inline ScaledSeries operator*(const ScaledSeries& a, const ScaledSeries& b) {
  const std::size_t n = std::min(a.coeffs.size(), b.coeffs.size());
  ScaledSeries r;
  r.coeffs.assign(n, Complex{});
  r.exp2 = a.exp2 + b.exp2;
  for (std::size_t i = 0; i < n; ++i) {
    if (a.coeffs[i] == Complex{}) continue;
    for (std::size_t j = 0; i + j < n; ++j) r.coeffs[i + j] += a.coeffs[i] * b.coeffs[j];
  }
  normalize(r);
  return r;
}

inline ScaledSeries operator*(Complex c, ScaledSeries a) {
  for (Complex& x : a.coeffs) x *= c;
  normalize(a);
  return a;
}

inline ScaledSeries pow(const ScaledSeries& base, unsigned n) {
  ScaledSeries result = ScaledSeries::constant(1.0, base.order());
  ScaledSeries b = base;
  while (n > 0) {
    if (n & 1U) result = result * b;
    n >>= 1U;
    if (n > 0) b = b * b;
  }
  return result;
}

namespace detail {

// Unscaled copy of the coefficients; throws if the argument itself overflows.
inline std::vector<Complex> plain(const ScaledSeries& a, const char* what) {
  std::vector<Complex> v(a.coeffs.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (a.coeffs[j] == Complex{}) continue;
    if (a.log_abs(static_cast<int>(j)) > 700.0) {
      throw OverflowError(std::string("argument of ") + what + " too large", a.log_abs(static_cast<int>(j)) / std::numbers::ln10);
    }
    v[j] = a.coefficient(static_cast<int>(j));
  }
  return v;
}

}  // namespace detail

// b = exp(a): b_0 = e^{a_0}, j b_j = sum_{i=1..j} i a_i b_{j-i}.
inline ScaledSeries exp(const ScaledSeries& a) {
  const std::vector<Complex> av = detail::plain(a, "exp");
  const std::size_t n = av.size();
  ScaledSeries b;
  b.coeffs.assign(n, Complex{});
  const double x = av[0].real();
  const double y = av[0].imag();
  const double e = std::floor(x / std::numbers::ln2);
  const double frac = x - e * std::numbers::ln2;
  b.exp2 = e;
  b.coeffs[0] = std::exp(frac) * Complex{std::cos(y), std::sin(y)};
  for (std::size_t j = 1; j < n; ++j) {
    Complex acc{};
    for (std::size_t i = 1; i <= j; ++i) acc += static_cast<double>(i) * av[i] * b.coeffs[j - i];
    b.coeffs[j] = acc / static_cast<double>(j);
  }
  normalize(b);
  return b;
}

// sin and cos share one recurrence: j s_j = sum i a_i c_{j-i}, j c_j = -sum i a_i s_{j-i}.
inline std::pair<ScaledSeries, ScaledSeries> sin_cos(const ScaledSeries& a) {
  const std::vector<Complex> av = detail::plain(a, "sin/cos");
  const std::size_t n = av.size();
  ScaledSeries s;
  ScaledSeries c;
  s.coeffs.assign(n, Complex{});
  c.coeffs.assign(n, Complex{});
  const Complex a0 = av[0];
  const double y = std::abs(a0.imag());
  if (y <= 300.0) {
    s.coeffs[0] = std::sin(a0);
    c.coeffs[0] = std::cos(a0);
  } else {
    // sin a0 = (e^{i a0} - e^{-i a0}) / 2i with the factor e^{|Im a0|} moved into the exponent.
    const Complex i{0.0, 1.0};
    const double e = std::floor(y / std::numbers::ln2);
    const double shift = e * std::numbers::ln2;
    const Complex p = std::exp(i * a0 - shift);
    const Complex q = std::exp(-i * a0 - shift);
    s.coeffs[0] = (p - q) / (2.0 * i);
    c.coeffs[0] = (p + q) / 2.0;
    s.exp2 = e;
    c.exp2 = e;
  }
  for (std::size_t j = 1; j < n; ++j) {
    Complex as{};
    Complex ac{};
    for (std::size_t i = 1; i <= j; ++i) {
      as += static_cast<double>(i) * av[i] * c.coeffs[j - i];
      ac += static_cast<double>(i) * av[i] * s.coeffs[j - i];
    }
    s.coeffs[j] = as / static_cast<double>(j);
    c.coeffs[j] = -ac / static_cast<double>(j);
  }
  normalize(s);
  normalize(c);
  return {s, c};
}

// Series quotient a/b; requires b_0 != 0.
inline ScaledSeries divide(const ScaledSeries& a, const ScaledSeries& b) {
  const std::size_t n = std::min(a.coeffs.size(), b.coeffs.size());
  if (b.coeffs[0] == Complex{}) throw NumericalError("series division by a series vanishing at the center");
  ScaledSeries q;
  q.coeffs.assign(n, Complex{});
  q.exp2 = a.exp2 - b.exp2;
  for (std::size_t j = 0; j < n; ++j) {
    Complex acc = a.coeffs[j];
    for (std::size_t i = 1; i <= j; ++i) acc -= b.coeffs[i] * q.coeffs[j - i];
    q.coeffs[j] = acc / b.coeffs[0];
  }
  normalize(q);
  return q;
}

}  // namespace nevang
