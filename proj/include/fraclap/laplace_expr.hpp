#pragma once

#include <cmath>
#include <string>

#include "errors.hpp"
#include "special_functions.hpp"

namespace fraclap {

// The three supported denominator shapes of  mu * s^q / (s^alpha -+ lambda)^rho:
//   PureMonomial    mu * s^q                      (alpha, sign, lambda unused)
//   ShiftedPower    mu * s^q / (s -+ lambda)^alpha
//   BinomialAlpha   mu * s^q / (s^alpha -+ lambda)
enum class Family { PureMonomial, ShiftedPower, BinomialAlpha };

// Sign::minus selects the denominator s^alpha + lambda together with the
// decaying time factors e^{-lambda t} / E(-lambda t^alpha); Sign::plus the
// growing pair.  lambda = 0 is admitted for the non-monomial families, where
// both collapse to mu * s^{q-alpha}.
struct LaplaceExpr {
  double mu = 1.0;
  double q = 0.0;
  Family family = Family::PureMonomial;
  double alpha = 1.0;
  Sign sign = Sign::minus;
  double lambda = 1.0;
};

inline void validate(const LaplaceExpr& e) {
  if (!std::isfinite(e.mu)) throw UnsupportedExpr("mu must be finite");
  if (!std::isfinite(e.q) || e.q < 0.0) throw UnsupportedExpr("q must satisfy q >= 0");
  if (e.family == Family::PureMonomial) return;
  if (!std::isfinite(e.alpha) || !(e.alpha > 0.0))
    throw UnsupportedExpr("alpha must satisfy alpha > 0");
  if (!std::isfinite(e.lambda) || e.lambda < 0.0)
    throw UnsupportedExpr("lambda must satisfy lambda >= 0");
}

// Abscissa of convergence of the forward transform of the inverse: lambda for
// e^{+lambda t} factors, lambda^{1/alpha} for E_{alpha,.}(+lambda t^alpha),
// zero for every decaying or algebraic term.
inline double abscissa(const LaplaceExpr& e) {
  if (e.family == Family::PureMonomial || e.sign == Sign::minus || e.lambda == 0.0)
    return 0.0;
  if (e.family == Family::ShiftedPower) return e.lambda;
  return std::pow(e.lambda, 1.0 / e.alpha);
}

// F(s) evaluated directly from the closed expression, for s above the
// abscissa of convergence.
inline double analytic_value(const LaplaceExpr& e, double s) {
  if (!(s > 0)) throw DomainError("analytic_value: requires s > 0");
  const double num = e.mu * std::pow(s, e.q);
  switch (e.family) {
    case Family::PureMonomial:
      return num;
    case Family::ShiftedPower: {
      const double base = s - sign_factor(e.sign) * e.lambda;
      if (!(base > 0))
        throw DivergentTransform("analytic_value: s at or below lambda");
      return num * std::pow(base, -e.alpha);
    }
    case Family::BinomialAlpha: {
      const double den = std::pow(s, e.alpha) - sign_factor(e.sign) * e.lambda;
      if (!(den > 0))
        throw DivergentTransform("analytic_value: s^alpha at or below lambda");
      return num / den;
    }
  }
  throw UnsupportedExpr("unknown family");
}

}  // namespace fraclap
