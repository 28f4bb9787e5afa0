#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include <quadmath.h>

#include "errors.hpp"
#include "special_functions.hpp"

namespace fraclap {

// Grunwald-Letnikov discretization d^q f/dt^q ~ h^{-q} sum_k w_k f(t - kh),
// with w_0 = 1 and w_k = w_{k-1} (k - 1 - q)/k.
struct GLConfig {
  double h;
  double t;
  double q;
  bool richardson;
};

inline GLConfig make_gl_config(double t, double q, long steps = 16384,
                               bool richardson = true) {
  if (!(t > 0) || !std::isfinite(t)) throw DomainError("make_gl_config: requires t > 0");
  if (!std::isfinite(q)) throw DomainError("make_gl_config: requires finite q");
  if (steps < 32) throw DomainError("make_gl_config: requires t/h integer >= 32");
  return {t / static_cast<double>(steps), t, q, richardson};
}

namespace detail {

// For q > 2 the alternating sum cancels down to ~h^q of its largest term,
// which is far below double rounding at 2^14 steps; weights and accumulation
// therefore run in binary128.  Abscissas t(n-k)/n are exact in binary128.
template <typename F>
__float128 gl_sum_raw(const F& f, double t, double q, long n) {
  const __float128 tq = t, nq = n, qq = q;
  __float128 w = 1, acc = 0;
  for (long k = 0; k <= n; ++k) {
    if (k) w *= (static_cast<__float128>(k - 1) - qq) / static_cast<__float128>(k);
    acc += w * f(tq * static_cast<__float128>(n - k) / nq, k == n);
  }
  return acc * powq(tq / nq, -qq);
}

}  // namespace detail

// tol applies to the reported error estimate; exceeding it raises
// StepTooCoarse with the value still attached.
inline EvalResult gl_differintegral(const std::function<double(double)>& f,
                                    const GLConfig& cfg,
                                    double tol = std::numeric_limits<double>::infinity()) {
  if (!(cfg.h > 0) || !(cfg.t > 0)) throw DomainError("gl_differintegral: requires h, t > 0");
  const double steps = cfg.t / cfg.h;
  const long n = std::lround(steps);
  if (n < 32 || std::fabs(steps - static_cast<double>(n)) > 1e-9 * steps)
    throw DomainError("gl_differintegral: t/h must be an integer number of steps >= 32");

  const auto sample = [&f](__float128 x, bool at_origin) -> __float128 {
    const double v = f(static_cast<double>(x));
    if (std::isfinite(v)) return v;
    // The single origin sample of an integrable singularity carries zero
    // weight in the h -> 0 limit; interior non-finite values are an error.
    if (at_origin) return 0;
    throw DomainError("gl_differintegral: f must be finite on (0, t]");
  };

  const double coarse = static_cast<double>(detail::gl_sum_raw(sample, cfg.t, cfg.q, n));
  double value, err;
  if (cfg.richardson) {
    const double fine = static_cast<double>(detail::gl_sum_raw(sample, cfg.t, cfg.q, 2 * n));
    value = 2.0 * fine - coarse;
    err = std::fabs(fine - coarse) + 1e-13 * std::fabs(value);
  } else {
    value = coarse;
    err = std::fabs(value) * (cfg.q * cfg.q + cfg.q + 2.0) / static_cast<double>(n) +
          1e-13 * std::fabs(value);
  }
  if (err > tol)
    throw StepTooCoarse("gl_differintegral: estimate " + std::to_string(err) +
                            " exceeds tolerance " + std::to_string(tol),
                        value, err);
  return {value, err};
}

namespace detail {

// Tail of the exponential series sum_{m >= P} x^m / m!; the leading term is
// already past the series peak for P >~ 1.5 |x|, so the alternating case
// starts from its largest term and needs no compensation beyond binary128.
inline __float128 exp_tail(__float128 x, int P) {
  if (x == 0) return 0;
  __float128 term = 1;
  for (int m = 1; m <= P; ++m) term *= x / m;
  __float128 acc = term;
  for (int m = P; m < P + 4000; ++m) {
    term *= x / (m + 1);
    acc += term;
    if (fabsq(term) < static_cast<__float128>(1e-37) * fabsq(acc)) break;
  }
  return acc;
}

}  // namespace detail

// coeff * d^q [ t^p e^{sign lambda t} ] / dt^q at t > 0, for p > -1.  The
// first P exponential-series powers are differintegrated in closed form,
// d^q t^r/dt^q = Gamma(r+1) rgamma(r+1-q) t^{r-q}; the remainder
// t^p (e^{x} - sum_{m<P} x^m/m!) vanishes like t^{p+P} at the origin and is
// handled by the Grunwald-Letnikov sum with h, h/2 extrapolation.  P grows
// with |lambda| t so the remainder stays small against the result scale.
inline EvalResult gl_exp_power_derivative(double coeff, double p, Sign sign,
                                          double lambda, double q, double t,
                                          long steps = 4096) {
  if (!(t > 0)) throw DomainError("gl_exp_power_derivative: requires t > 0");
  if (!(p > -1.0)) throw DomainError("gl_exp_power_derivative: requires p > -1");
  if (!(lambda >= 0)) throw DomainError("gl_exp_power_derivative: requires lambda >= 0");
  const double x_full = lambda * t;
  const int P = std::min(170, 36 + static_cast<int>(std::ceil(1.5 * x_full)));
  const __float128 sl = sign_factor(sign) * static_cast<__float128>(lambda);

  __float128 ana = 0, cm = 1;  // cm = (sign lambda)^m / m!
  for (int m = 0; m < P; ++m) {
    if (m) cm *= sl / m;
    const double r = p + m;
    const __float128 ratio = detail::rgamma_q(r + 1.0 - q) / detail::rgamma_q(r + 1.0);
    ana += cm * ratio * powq(static_cast<__float128>(t), static_cast<__float128>(r - q));
    if (lambda == 0.0) break;  // only the m = 0 power survives
  }

  __float128 rich = 0, diff = 0;
  if (lambda > 0.0) {
    const auto g = [&](__float128 x, bool at_origin) -> __float128 {
      if (at_origin) return 0;
      return powq(x, static_cast<__float128>(p)) * detail::exp_tail(sl * x, P);
    };
    const long n = std::max<long>(32, steps);
    const __float128 coarse = detail::gl_sum_raw(g, t, q, n);
    const __float128 fine = detail::gl_sum_raw(g, t, q, 2 * n);
    rich = 2 * fine - coarse;
    diff = fabsq(fine - coarse);
  }

  const double value = coeff * static_cast<double>(ana + rich);
  const double err = std::fabs(coeff) *
                         (static_cast<double>(diff) +
                          1e-15 * static_cast<double>(fabsq(ana) + fabsq(rich))) +
                     1e-13 * std::fabs(value);
  return {value, err};
}

// Reference Mittag-Leffler series in binary128 with the certified remainder
// bound; refuses (rather than degrades) when cancellation exceeds the target.
inline EvalResult ml_series_hp(const MLParams& p, double target_tol) {
  if (!(p.alpha > 0) || !std::isfinite(p.beta) || !std::isfinite(p.z))
    throw DomainError("ml_series_hp: requires finite parameters with alpha > 0");
  if (p.z == 0.0) return {rgamma(p.beta), 0.0};
  const double xhat = std::pow(std::fabs(p.z), 1.0 / p.alpha);
  const detail::SchemeResult r = detail::ml_series_f128(p.alpha, p.beta, p.z, xhat);
  if (std::isfinite(r.abs_err) && r.abs_err <= target_tol) return {r.value, r.abs_err};
  throw NonConvergent("ml_series_hp: cannot certify target " + std::to_string(target_tol),
                      r.value, r.abs_err);
}

}  // namespace fraclap
