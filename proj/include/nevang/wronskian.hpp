#pragma once

// Wronskian W(f_0, …, f_n) = det[f_i^(j)].

#include <cmath>
#include <numbers>
#include <vector>

#include "nevang/errors.hpp"
#include "nevang/expr.hpp"
#include "nevang/projective.hpp"

namespace nevang {

// m · 2^exp2, for values that may not fit in a double.
struct ScaledValue {
  Complex mantissa;
  double exp2 = 0.0;

  double log_abs() const {
    const double a = std::abs(mantissa);
    return a == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(a) + exp2 * std::numbers::ln2;
  }
  Complex value() const {
    const Complex v = detail::ldexp_c(mantissa, exp2);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw OverflowError("value overflows double", log_abs() / std::numbers::ln10);
    }
    return v;
  }
};

namespace detail {

// Determinant of a column-scaled matrix: column c holds entries m[r][c] · 2^col_exp[c].
inline ScaledValue scaled_determinant(std::vector<std::vector<Complex>> m, const std::vector<double>& col_exp) {
  const std::size_t n = m.size();
  ScaledValue out{1.0, 0.0};
  for (double e : col_exp) out.exp2 += e;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(m[r][c]) > std::abs(m[p][c])) p = r;
    }
    if (m[p][c] == Complex{}) return {0.0, 0.0};
    if (p != c) {
      std::swap(m[p], m[c]);
      out.mantissa = -out.mantissa;
    }
    out.mantissa *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const Complex f = m[r][c] / m[c][c];
      if (f == Complex{}) continue;
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return out;
}

}  // namespace detail

// Wronskian of arbitrary jet-evaluable functions at z, with per-column scaling.
inline ScaledValue wronskian_scaled(const std::vector<EntireFunction>& fs, Complex z) {
  const int n = static_cast<int>(fs.size()) - 1;
  if (n < 0) throw InputError("Wronskian of an empty family");
  if (n > kMaxJetOrder) throw InputError("Wronskian order exceeds the jet order cap");
  std::vector<std::vector<Complex>> m(n + 1, std::vector<Complex>(n + 1));
  std::vector<double> col_exp(n + 1, 0.0);
  for (int i = 0; i <= n; ++i) {
    const ScaledSeries s = fs[i].taylor(z, n);
    double big = 0.0;
    double fact = 1.0;
    for (int j = 0; j <= n; ++j) {
      if (j > 1) fact *= j;
      m[j][i] = s.coeffs[j] * fact;
      big = std::max({big, std::abs(m[j][i].real()), std::abs(m[j][i].imag())});
    }
    col_exp[i] = s.exp2;
    if (big > 0.0 && (big > 0x1p200 || big < 0x1p-200)) {
      int e = 0;
      std::frexp(big, &e);
      for (int j = 0; j <= n; ++j) m[j][i] = detail::ldexp_c(m[j][i], -e);
      col_exp[i] += e;
    }
  }
  return detail::scaled_determinant(std::move(m), col_exp);
}

inline ScaledValue wronskian_scaled(const Curve& f, Complex z) {
  std::vector<EntireFunction> fs;
  for (int j = 0; j <= f.dim(); ++j) fs.push_back(f.function(j));
  return wronskian_scaled(fs, z);
}

inline Complex wronskian_value(const Curve& f, Complex z) { return wronskian_scaled(f, z).value(); }

// Symbolic Wronskian by cofactor expansion along the first row; used when W
// itself must be jet-evaluated (zero location).
inline Expr wronskian_expr(const std::vector<Expr>& comps) {
  const int n = static_cast<int>(comps.size()) - 1;
  if (n < 0) throw InputError("Wronskian of an empty family");
  if (n > 6) throw InputError("symbolic Wronskian limited to at most 7 components");
  std::vector<std::vector<Expr>> rows;
  for (int j = 0; j <= n; ++j) {
    std::vector<Expr> row;
    for (const Expr& c : comps) row.push_back(derivative(c, j));
    rows.push_back(std::move(row));
  }
  std::vector<int> cols(n + 1);
  for (int i = 0; i <= n; ++i) cols[i] = i;
  auto det = [&](auto&& self, int row, const std::vector<int>& free) -> Expr {
    if (free.size() == 1) return rows[row][free[0]];
    std::optional<Expr> acc;
    for (std::size_t p = 0; p < free.size(); ++p) {
      const Expr& a = rows[row][free[p]];
      if (detail::is_zero(a)) continue;
      std::vector<int> rest;
      for (std::size_t q = 0; q < free.size(); ++q) {
        if (q != p) rest.push_back(free[q]);
      }
      const Expr minor = self(self, row + 1, rest);
      if (detail::is_zero(minor)) continue;
      const Expr term = detail::mul_s(a, minor);
      if (!acc) acc = p % 2 == 0 ? term : detail::neg_s(term);
      else acc = p % 2 == 0 ? detail::add_s(*acc, term) : detail::sub_s(*acc, term);
    }
    return acc ? *acc : Expr::constant(0.0);
  };
  return det(det, 0, cols);
}

inline Expr wronskian_expr(const Curve& f) { return wronskian_expr(f.components()); }

// W ≢ 0 judged at a fixed set of sample points, relative to the column scales.
inline bool linearly_nondegenerate(const Curve& f) {
  for (int i = 0; i < 10; ++i) {
    const Complex z = std::polar(0.5 + 0.41 * i, 0.3 + 2.2 * i);
    const ScaledValue w = wronskian_scaled(f, z);
    double scale = 0.0;
    const int n = f.dim();
    for (int j = 0; j <= n; ++j) {
      const ScaledSeries s = f.function(j).taylor(z, n);
      double m = -std::numeric_limits<double>::infinity();
      for (int d = 0; d <= n; ++d) m = std::max(m, s.log_abs(d) + std::lgamma(d + 1.0));
      scale += m;
    }
    if (w.log_abs() > scale + std::log(1e-10)) return true;
  }
  return false;
}

}  // namespace nevang
