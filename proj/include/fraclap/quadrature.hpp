#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "errors.hpp"
#include "eval_result.hpp"

namespace fraclap {
namespace detail {

struct Gl12Rule {
  std::array<double, 12> x;  // nodes on [-1, 1]
  std::array<double, 12> w;
};

// Nodes are the roots of the Legendre polynomial P_12, found by Newton
// iteration from the Chebyshev-angle initial guesses; weights are
// 2 / ((1 - x^2) P_12'(x)^2).
inline const Gl12Rule& gl12_rule() {
  static const Gl12Rule rule = [] {
    Gl12Rule r;
    const int n = 12;
    for (int i = 0; i < n; ++i) {
      long double x = cosl(3.14159265358979323846L * (i + 0.75L) / (n + 0.5L));
      long double dp = 0;
      for (int it = 0; it < 60; ++it) {
        long double p0 = 1, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1);
        const long double dx = p1 / dp;
        x -= dx;
        if (fabsl(dx) < 1e-19L) break;
      }
      r.x[static_cast<std::size_t>(i)] = static_cast<double>(x);
      r.w[static_cast<std::size_t>(i)] = static_cast<double>(2.0L / ((1 - x * x) * dp * dp));
    }
    return r;
  }();
  return rule;
}

inline double gl12_apply(const std::function<double(double)>& f, double a, double b) {
  const Gl12Rule& r = gl12_rule();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0;
  for (int i = 0; i < 12; ++i) {
    const double v = f(c + h * r.x[static_cast<std::size_t>(i)]);
    if (!std::isfinite(v))
      throw QuadratureFailure("integrand not finite inside interval", v, INFINITY);
    s += r.w[static_cast<std::size_t>(i)] * v;
  }
  return h * s;
}

struct QuadSegment {
  double a, b;
  double value;  // two-half estimate
  double err;    // |one-panel - two-half|, conservative for the kept value
};

inline QuadSegment quad_segment(const std::function<double(double)>& f, double a, double b) {
  const double m = 0.5 * (a + b);
  const double one = gl12_apply(f, a, b);
  const double two = gl12_apply(f, a, m) + gl12_apply(f, m, b);
  return {a, b, two, std::fabs(one - two) + 2e-16 * std::fabs(two)};
}

}  // namespace detail

// Adaptive Gauss-Legendre quadrature of f over [a, b]: bisect the segment
// with the largest error score until the summed score meets
// max(abs_tol, rel_tol * |integral|) or the segment budget runs out.
inline EvalResult integrate_adaptive(const std::function<double(double)>& f, double a,
                                     double b, double abs_tol, double rel_tol,
                                     int max_segments = 4000) {
  if (!(b > a)) return {0.0, 0.0};
  std::vector<detail::QuadSegment> segs;
  segs.push_back(detail::quad_segment(f, a, b));
  const double min_width = 1e-14 * (b - a);
  for (;;) {
    double total = 0, err = 0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      total += segs[i].value;
      err += segs[i].err;
      if (segs[i].err > segs[worst].err) worst = i;
    }
    const double target = std::max(abs_tol, rel_tol * std::fabs(total));
    if (err <= target) return {total, err};
    if (static_cast<int>(segs.size()) >= max_segments ||
        segs[worst].b - segs[worst].a < min_width)
      throw QuadratureFailure("adaptive quadrature cannot reach the error target",
                              total, err);
    const detail::QuadSegment old = segs[worst];
    const double m = 0.5 * (old.a + old.b);
    segs[worst] = detail::quad_segment(f, old.a, m);
    segs.push_back(detail::quad_segment(f, m, old.b));
  }
}

}  // namespace fraclap
