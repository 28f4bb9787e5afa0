#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <variant>

#include "errors.hpp"
#include "generalized_function.hpp"
#include "laplace_expr.hpp"
#include "quadrature.hpp"
#include "special_functions.hpp"

namespace fraclap {

namespace detail {

// Half-width of the band around q = j*alpha treated as an exact multiple;
// inside it Gamma(alpha - q + j*alpha) sits within rounding of a pole.
constexpr double kMultipleSnap = 1e-9;

}  // namespace detail

// d^q [ t^{alpha-1} ] / dt^q.  Closed form Gamma(alpha)/Gamma(alpha-q) *
// t^{alpha-1-q}; at the poles alpha - q = 0, -1, -2, ... the power-law
// coefficient vanishes and the term degenerates to the delta derivative
// Gamma(alpha) * d^{q-alpha} delta(t)/dt^{q-alpha}.
inline std::variant<PowerTerm, SingularTerm> frac_derivative_power_law(double alpha, double q) {
  if (!(alpha > 0) || !std::isfinite(alpha))
    throw DomainError("frac_derivative_power_law: requires alpha > 0");
  if (!(q >= 0) || !std::isfinite(q))
    throw DomainError("frac_derivative_power_law: requires q >= 0");
  const double ga = 1.0 / rgamma(alpha);
  const double rg = rgamma(alpha - q);
  if (rg == 0.0) return SingularTerm{ga, std::fabs(std::round(q - alpha))};
  return PowerTerm{ga * rg, alpha - 1.0 - q};
}

// Inverse Laplace transform of the expression, as a generalized function.
// Singularity extraction for the binomial family follows the recurrence
// E_{a,b}(z) = rgamma(b) + z E_{a,a+b}(z): each application peels one
// delta-derivative term off s^q/(s^alpha -+ lambda) until the remaining
// Mittag-Leffler second parameter lies in (0, alpha].
inline GeneralizedFunction invert(const LaplaceExpr& e) {
  validate(e);
  GeneralizedFunction out;
  const double sigma = sign_factor(e.sign);

  // L^{-1}[mu s^{power}]: a delta derivative for power >= 0, otherwise the
  // power law t^{-power-1}/Gamma(-power).
  const auto monomial_like = [&out](double mu, double power) {
    if (power >= -detail::kMultipleSnap)
      out.singular.push_back({mu, std::fmax(power, 0.0)});
    else
      out.regular.push_back(PowerTerm{mu * rgamma(-power), -power - 1.0});
  };

  switch (e.family) {
    case Family::PureMonomial:
      out.singular.push_back({e.mu, e.q});
      break;

    case Family::BinomialAlpha: {
      if (e.lambda == 0.0) {
        monomial_like(e.mu, e.q - e.alpha);
        break;
      }
      const double sl = sigma * e.lambda;
      const double ratio = e.q / e.alpha;
      const long jnear = static_cast<long>(std::llround(ratio));
      bool exact = false;
      long n;
      if (jnear >= 0 &&
          std::fabs(e.q - static_cast<double>(jnear) * e.alpha) < detail::kMultipleSnap) {
        n = jnear;
        exact = jnear >= 1;
      } else {
        n = static_cast<long>(std::floor(ratio));
      }
      double coeff = e.mu;
      for (long j = 1; j <= n; ++j) {
        const double order = exact ? static_cast<double>(n - j) * e.alpha
                                   : e.q - static_cast<double>(j) * e.alpha;
        out.singular.push_back({coeff, order});
        coeff *= sl;
      }
      const double beta = exact ? e.alpha : static_cast<double>(n + 1) * e.alpha - e.q;
      out.regular.push_back(MLTerm{coeff, e.alpha, beta, e.sign, e.lambda, beta - 1.0});
      out.exact_multiple = exact;
      break;
    }

    case Family::ShiftedPower: {
      if (e.lambda == 0.0) {
        monomial_like(e.mu, e.q - e.alpha);
        break;
      }
      if (std::fabs(e.alpha - 1.0) < 1e-12) {
        LaplaceExpr b = e;
        b.family = Family::BinomialAlpha;
        b.alpha = 1.0;
        return invert(b);
      }
      const double c = e.mu * rgamma(e.alpha);
      if (e.q == 0.0)
        out.regular.push_back(ExpPowerTerm{c, e.alpha - 1.0, e.sign, e.lambda});
      else
        out.regular.push_back(FracExpDerivTerm{c, e.q, e.alpha - 1.0, e.sign, e.lambda});
      break;
    }
  }
  return simplify(out);
}

namespace detail {

// Upper bound on integral_T^inf c t^p e^{-decay t} dt for c >= 0, decay > 0.
// For p <= 0 the integrand factor t^p is monotone; for p > 0 half the decay
// is spent majorizing t^p by its full Gamma integral.
inline double exp_poly_tail(double c, double p, double decay, double T) {
  if (c == 0.0) return 0.0;
  if (p <= 0.0) return c * std::pow(T, p) * std::exp(-decay * T) / decay;
  return c * std::exp(-0.5 * decay * T) * (1.0 / rgamma(p + 1.0)) *
         std::pow(2.0 / decay, p + 1.0);
}

// Laplace integral of one regular term: [0,1] with the substitution
// t = u^{1/b}, b = min(1, p0+1), removing the integrable endpoint
// singularity; then [T, 2T] panels until the analytic tail bound at T is
// negligible against the accumulated integral.
inline EvalResult laplace_quad_term(const std::function<double(double)>& h, double p0,
                                    const std::function<double(double)>& tail_bound) {
  if (!(p0 > -1.0))
    throw DivergentTransform("forward_laplace: term not integrable at the origin");
  double total = 0.0, err = 0.0;
  const double b = std::fmin(1.0, p0 + 1.0);
  if (b < 1.0) {
    const double inv_b = 1.0 / b;
    const auto g = [&h, inv_b](double u) {
      return h(std::pow(u, inv_b)) * inv_b * std::pow(u, inv_b - 1.0);
    };
    const EvalResult r = integrate_adaptive(g, 0.0, 1.0, 1e-15, 5e-13);
    total += r.value;
    err += r.abs_err;
  } else {
    const EvalResult r = integrate_adaptive(h, 0.0, 1.0, 1e-15, 5e-13);
    total += r.value;
    err += r.abs_err;
  }
  double T = 1.0;
  for (int it = 0;; ++it) {
    const double tb = tail_bound(T);
    if (std::isfinite(tb) && tb <= 0.5e-12 * std::fabs(total) + 1e-15) {
      err += tb;
      break;
    }
    if (it >= 64)
      throw QuadratureFailure("forward_laplace: tail truncation did not converge", total,
                              err + (std::isfinite(tb) ? tb : std::numeric_limits<double>::infinity()));
    const EvalResult r = integrate_adaptive(h, T, 2.0 * T, 1e-15, 5e-13);
    total += r.value;
    err += r.abs_err;
    T *= 2.0;
  }
  return {total, err};
}

struct LaplaceTermVisitor {
  double s;

  EvalResult operator()(const MLTerm& x) const {
    const double sgn = sign_factor(x.sign);
    const double lam_root = std::pow(x.lambda, 1.0 / x.alpha);
    const double lam_pow = std::pow(x.lambda, (1.0 - x.beta) / x.alpha);
    const double p_br = x.t_power + 1.0 - x.beta;
    double cenv = 1.0;
    for (int k = 1; k <= 3; ++k) cenv += std::fabs(rgamma(x.beta - k * x.alpha));
    cenv *= 2.0;

    const auto h = [this, x, sgn, lam_root, lam_pow, p_br](double t) {
      const double xhat = lam_root * t;
      if (x.sign == Sign::plus && xhat >= 250.0) {
        // leading branch of the large-argument expansion, exponent fused
        // with e^{-st} so the intermediate never overflows
        return x.coeff * (1.0 / x.alpha) * lam_pow * std::pow(t, p_br) *
               std::exp(xhat - s * t);
      }
      const double z = sgn * x.lambda * std::pow(t, x.alpha);
      return x.coeff * std::pow(t, x.t_power) * ml_eval({x.alpha, x.beta, z}).value *
             std::exp(-s * t);
    };
    const double ac = std::fabs(x.coeff);
    const auto tail = [this, x, ac, cenv, lam_root, lam_pow, p_br](double T) {
      if (x.lambda * std::pow(T, x.alpha) < 24.0)
        return std::numeric_limits<double>::infinity();
      const double alg = exp_poly_tail(ac * cenv / x.lambda, x.t_power - x.alpha, s, T);
      if (x.sign == Sign::minus) {
        if (x.alpha <= 1.0) return alg;
        return alg + exp_poly_tail(2.0 * ac * (2.0 / x.alpha) * lam_pow, p_br, s, T);
      }
      return alg + exp_poly_tail(2.0 * ac * (1.0 / x.alpha) * lam_pow, p_br, s - lam_root, T);
    };
    EvalResult r = laplace_quad_term(h, x.t_power, tail);
    r.abs_err += 1e-9 * (1.0 / s + std::fabs(r.value));
    return r;
  }

  EvalResult operator()(const PowerTerm& x) const {
    if (x.p <= -1.0) {
      // Hadamard-regularized transform Gamma(p+1) s^{-p-1}
      const double rg = rgamma(x.p + 1.0);
      if (rg == 0.0)
        throw UnsupportedExpr(
            "forward_laplace: power term with negative integer exponent has no "
            "Hadamard transform");
      const double v = x.coeff * (1.0 / rg) * std::pow(s, -x.p - 1.0);
      return {v, std::fabs(v) * (3.0 + std::fabs(x.p)) * 1e-15};
    }
    const auto h = [this, x](double t) { return x.coeff * std::pow(t, x.p) * std::exp(-s * t); };
    const double ac = std::fabs(x.coeff);
    const auto tail = [this, x, ac](double T) { return exp_poly_tail(ac, x.p, s, T); };
    EvalResult r = laplace_quad_term(h, x.p, tail);
    r.abs_err += 1e-12 * (1.0 / s + std::fabs(r.value));
    return r;
  }

  EvalResult operator()(const ExpPowerTerm& x) const {
    const double decay = s - sign_factor(x.sign) * x.lambda;
    const auto h = [this, x, decay](double t) {
      return x.coeff * std::pow(t, x.p) * std::exp(-decay * t);
    };
    const double ac = std::fabs(x.coeff);
    const auto tail = [x, ac, decay](double T) { return exp_poly_tail(ac, x.p, decay, T); };
    EvalResult r = laplace_quad_term(h, x.p, tail);
    r.abs_err += 1e-12 * (1.0 / s + std::fabs(r.value));
    return r;
  }

  EvalResult operator()(const FracExpDerivTerm& x) const {
    // L[d^q (t^p e^{sigma lambda t})] = s^q Gamma(p+1)/(s - sigma lambda)^{p+1}
    // with the distributional reading of the derivative at the origin.
    const double base = s - sign_factor(x.sign) * x.lambda;
    const double v = x.coeff * (1.0 / rgamma(x.p + 1.0)) * std::pow(s, x.q) /
                     std::pow(base, x.p + 1.0);
    return {v, std::fabs(v) * (4.0 + x.q + std::fabs(x.p)) * 1e-15};
  }
};

}  // namespace detail

// Largest exponential growth rate among the regular terms; the transform
// integral converges only for s above this.
inline double growth_abscissa(const GeneralizedFunction& f) {
  double sc = 0.0;
  for (const RegularTerm& term : f.regular) {
    struct V {
      double operator()(const MLTerm& x) const {
        return x.sign == Sign::plus ? std::pow(x.lambda, 1.0 / x.alpha) : 0.0;
      }
      double operator()(const PowerTerm&) const { return 0.0; }
      double operator()(const ExpPowerTerm& x) const {
        return x.sign == Sign::plus ? x.lambda : 0.0;
      }
      double operator()(const FracExpDerivTerm& x) const {
        return x.sign == Sign::plus ? x.lambda : 0.0;
      }
    };
    sc = std::fmax(sc, std::visit(V{}, term));
  }
  return sc;
}

// Forward transform at real s: analytic s^order for singular terms, adaptive
// quadrature with certified tail bounds for Mittag-Leffler, power, and
// exponential terms, analytic forms for the remaining closed-form terms.
inline EvalResult forward_laplace(const GeneralizedFunction& f, double s) {
  if (!(s > 0) || !std::isfinite(s)) throw DomainError("forward_laplace: requires s > 0");
  const double sc = growth_abscissa(f);
  if (s <= sc)
    throw DivergentTransform("forward_laplace: s at or below the abscissa of convergence");

  EvalResult acc{0.0, 0.0};
  for (const SingularTerm& term : f.singular) {
    const double v = term.coeff * std::pow(s, term.order);
    acc.value += v;
    acc.abs_err += std::fabs(v) * (2.0 + term.order) * 1e-16;
  }
  for (const RegularTerm& term : f.regular) {
    EvalResult r;
    try {
      r = std::visit(detail::LaplaceTermVisitor{s}, term);
    } catch (const NonConvergent& exc) {
      throw QuadratureFailure(std::string("forward_laplace: integrand evaluation failed: ") +
                                  exc.what(),
                              exc.best_value, exc.error_bound);
    }
    acc.value += r.value;
    acc.abs_err += r.abs_err;
  }
  acc.abs_err += 2e-16 * std::fabs(acc.value);
  return acc;
}

}  // namespace fraclap
