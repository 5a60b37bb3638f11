#pragma once

// Globally adaptive 15-point Gauss-Kronrod quadrature.
//
// Panels are refined worst-first; the final sum is accumulated in order of
// panel position, so results are reproducible bit-for-bit for a fixed config.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <vector>

#include "nevang/errors.hpp"

namespace nevang {

struct QuadratureConfig {
  double abs_tol = 1e-8;
  double rel_tol = 1e-8;
  int max_panels = 1 << 16;
  double singularity_pad = 1e-3;  // relative distance that marks a path zero as "on" a panel
};

template <class T>
struct QuadResult {
  T value{};
  double error = 0.0;
  int panels = 0;
  bool converged = true;
};

namespace detail {

// Kronrod 15 abscissae (descending, last is the center) and weights; Gauss 7 weights
// belong to the odd-indexed abscissae and the center.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
double magnitude(const T& v) {
  return std::abs(v);
}

template <class T>
struct Panel {
  double a;
  double b;
  T value;
  double error;
};

template <class T, class F>
Panel<T> gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const T fc = f(c);
  T kron = kWgk[7] * fc;
  T gauss = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const T s = f(c - dx) + f(c + dx);
    kron += kWgk[j] * s;
    if (j % 2 == 1) gauss += kWg[j / 2] * s;
  }
  return {a, b, kron * h, magnitude(T((kron - gauss) * h))};
}

}  // namespace detail

// Cuts [a, b] at the given points and, around each point, at a geometric
// sequence of offsets (ratio 0.25, 12 levels) so a log singularity there
// starts out with endpoint-graded panels.
inline std::vector<double> graded_cuts(double a, double b, const std::vector<double>& singular_points) {
  std::vector<double> cuts{a, b};
  for (double s : singular_points) {
    if (!(s > a && s < b)) continue;
    cuts.push_back(s);
    const double span = std::min(s - a, b - s);
    double off = 0.25 * span;
    for (int lvl = 0; lvl < 12; ++lvl, off *= 0.25) {
      cuts.push_back(s - off);
      cuts.push_back(s + off);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

template <class T, class F>
QuadResult<T> integrate(F&& f, const std::vector<double>& cuts, const QuadratureConfig& cfg) {
  using detail::Panel;
  auto worse = [](const Panel<T>& x, const Panel<T>& y) { return x.error < y.error; };
  std::priority_queue<Panel<T>, std::vector<Panel<T>>, decltype(worse)> heap(worse);
  std::vector<Panel<T>> done;
  T total{};
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    Panel<T> p = detail::gk15<T>(f, cuts[i], cuts[i + 1]);
    total += p.value;
    err += p.error;
    heap.push(p);
  }
  int panels = static_cast<int>(heap.size());
  auto target = [&] { return std::max(cfg.abs_tol, cfg.rel_tol * detail::magnitude(total)); };
  while (!heap.empty() && err > target() && panels < cfg.max_panels) {
    Panel<T> p = heap.top();
    const double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b)) {  // interval exhausted at machine resolution
      heap.pop();
      done.push_back(p);
      continue;
    }
    heap.pop();
    Panel<T> l = detail::gk15<T>(f, p.a, mid);
    Panel<T> r = detail::gk15<T>(f, mid, p.b);
    total += l.value + r.value - p.value;
    err += l.error + r.error - p.error;
    heap.push(l);
    heap.push(r);
    ++panels;
  }
  while (!heap.empty()) {
    done.push_back(heap.top());
    heap.pop();
  }
  std::sort(done.begin(), done.end(), [](const Panel<T>& x, const Panel<T>& y) { return x.a < y.a; });
  QuadResult<T> res;
  double e = 0.0;
  for (const Panel<T>& p : done) {
    res.value += p.value;
    e += p.error;
  }
  res.error = e;
  res.panels = static_cast<int>(done.size());
  res.converged = e <= std::max(cfg.abs_tol, cfg.rel_tol * detail::magnitude(res.value));
  return res;
}

template <class T, class F>
QuadResult<T> integrate(F&& f, double a, double b, const QuadratureConfig& cfg) {
  return integrate<T>(std::forward<F>(f), std::vector<double>{a, b}, cfg);
}

// Integrates and throws when the error estimate stays far above the target.
template <class F>
double integrate_or_throw(F&& f, const std::vector<double>& cuts, const QuadratureConfig& cfg, const char* what) {
  const QuadResult<double> r = integrate<double>(std::forward<F>(f), cuts, cfg);
  const double target = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(r.value));
  if (!std::isfinite(r.value) || r.error > 1e3 * target) {
    throw NumericalError(std::string("quadrature did not converge: ") + what + " (error estimate " +
                         std::to_string(r.error) + ")");
  }
  return r.value;
}

}  // namespace nevang
