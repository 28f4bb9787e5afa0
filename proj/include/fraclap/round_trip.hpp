#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>

#include "errors.hpp"
#include "generalized_function.hpp"
#include "inversion.hpp"
#include "laplace_expr.hpp"

namespace fraclap {

inline std::string expr_to_string(const LaplaceExpr& e) {
  using detail::fmt_num;
  std::string out;
  if (e.mu != 1.0) out += fmt_num(e.mu) + "·";
  out += "s^{" + fmt_num(e.q) + "}";
  // the stored sign is the sign of lambda in the time domain, so the
  // denominator reads (s - sigma lambda)
  const std::string op = e.sign == Sign::minus ? " + " : " − ";
  switch (e.family) {
    case Family::PureMonomial:
      break;
    case Family::ShiftedPower:
      out += "/(s" + op + fmt_num(e.lambda) + ")^{" + fmt_num(e.alpha) + "}";
      break;
    case Family::BinomialAlpha:
      out += "/(s^{" + fmt_num(e.alpha) + "}" + op + fmt_num(e.lambda) + ")";
      break;
  }
  return out;
}

struct RoundTripReport {
  int checks = 0;
  int failures = 0;
  double worst_rel = 0.0;
  std::string text;
};

// Draws random expressions, inverts them, transforms the result back by
// quadrature, and compares against the analytic transform at three points
// above the abscissa of convergence.  Parameter bands |q - j alpha| < 0.05
// are excluded: there the extraction sits within rounding of a Gamma pole
// and the comparison would measure the snap convention, not the transform.
inline RoundTripReport run_round_trip(std::uint64_t seed, int cases, double tol = 1e-4) {
  std::mt19937_64 rng(seed);
  const auto u01 = [&rng] { return static_cast<double>(rng() >> 11) * 0x1p-53; };

  RoundTripReport rep;
  std::ostringstream os;
  using detail::fmt_num;

  for (int i = 0; i < cases; ++i) {
    LaplaceExpr e;
    const double fam = u01();
    e.family = fam < 1.0 / 3.0   ? Family::PureMonomial
               : fam < 2.0 / 3.0 ? Family::ShiftedPower
                                 : Family::BinomialAlpha;
    e.alpha = 0.3 + 1.7 * u01();
    e.lambda = 0.25 + 3.75 * u01();
    e.sign = u01() < 0.5 ? Sign::minus : Sign::plus;
    e.mu = 0.5 + 1.5 * u01();
    for (;;) {
      e.q = 3.5 * u01();
      bool clear = true;
      for (int j = 0; j * e.alpha < 3.6 && j < 13; ++j)
        if (std::fabs(e.q - j * e.alpha) < 0.05) clear = false;
      if (clear) break;
    }

    const double sc = abscissa(e);
    const double offsets[3] = {e.lambda + 1.0, 2.0 * e.lambda + 1.0, 5.0 * e.lambda + 3.0};

    GeneralizedFunction g;
    try {
      g = invert(e);
    } catch (const std::exception& exc) {
      for (int k = 0; k < 3; ++k) {
        ++rep.checks;
        ++rep.failures;
        os << "case " << i << " [" << expr_to_string(e) << "] EXC invert: " << exc.what()
           << "\n";
      }
      continue;
    }

    for (const double off : offsets) {
      const double s = sc + off;
      ++rep.checks;
      os << "case " << i << " [" << expr_to_string(e) << "] s=" << fmt_num(s);
      try {
        const double rhs = analytic_value(e, s);
        const EvalResult lhs = forward_laplace(g, s);
        const double rel =
            std::fabs(lhs.value - rhs) / std::fmax(std::fabs(rhs), 1e-300);
        if (rel > rep.worst_rel) rep.worst_rel = rel;
        const bool ok = rel <= tol;
        if (!ok) ++rep.failures;
        os << " rel=" << fmt_num(rel) << (ok ? " ok" : " FAIL") << "\n";
      } catch (const std::exception& exc) {
        ++rep.failures;
        os << " EXC " << exc.what() << "\n";
      }
    }
  }

  os << "round-trip: " << rep.checks << " checks, " << rep.failures
     << " failures, worst rel err " << fmt_num(rep.worst_rel) << "\n";
  rep.text = os.str();
  return rep;
}

}  // namespace fraclap
