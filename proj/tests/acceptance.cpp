// Acceptance gate: one line per criterion, [PASS]/[FAIL], exit code equal to
// the number of failures.  An optional argv[1] in 1..8 runs a single
// criterion.  Tolerances are fixed here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <fraclap/fraclap.hpp>

using namespace fraclap;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

LaplaceExpr exp_derivative_expr(double q, double lambda) {
  LaplaceExpr e;
  e.q = q;
  e.family = Family::BinomialAlpha;
  e.alpha = 1.0;
  e.sign = Sign::minus;
  e.lambda = lambda;
  return e;
}

// d^q e^{-t} / dt^q through the closed-form inverse transform.
double closed_curve(const GeneralizedFunction& g, double x) {
  return eval_pointwise(g, x).value;
}

bool criterion1(std::string& note) {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int i = 1; i <= 1000; ++i) {
    const double t = 10.0 * i / 1000.0;
    worst = std::fmax(worst, std::fabs(ml_one_param(1.0, -t).value - std::exp(-t)));
    worst = std::fmax(worst, std::fabs(ml_one_param(2.0, -t * t).value - std::cos(t)));
  }
  const double secs = seconds_since(t0);
  note = "max abs err " + num(worst) + " over 1000 points, " + num(secs) + " s";
  return worst <= 1e-10 && secs < 5.0;
}

bool criterion2(std::string& note) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1234);
  const auto u01 = [&rng] { return static_cast<double>(rng() >> 11) * 0x1p-53; };
  int bad = 0;
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double a = 0.3 + 2.2 * u01();
    const double b = -3.0 + 6.0 * u01();
    const double z = -50.0 + 55.0 * u01();
    const double lhs = ml_eval({a, b, z}).value;
    const double rhs = z * ml_eval({a, a + b, z}).value + rgamma(b);
    const double rel = std::fabs(lhs - rhs) / (1.0 + std::fabs(lhs));
    if (rel > worst) worst = rel;
    if (rel > 1e-8) ++bad;
  }
  const double secs = seconds_since(t0);
  note = std::to_string(bad) + " of 10000 samples out of tolerance, worst rel " +
         num(worst) + ", " + num(secs) + " s";
  return bad == 0 && secs < 30.0;
}

bool criterion3(std::string& note) {
  const auto t0 = Clock::now();
  const RoundTripReport rep = run_round_trip(42u, 200, 1e-4);
  const double secs = seconds_since(t0);
  note = std::to_string(rep.checks) + " checks, " + std::to_string(rep.failures) +
         " failures, worst rel " + num(rep.worst_rel) + ", " + num(secs) + " s";
  return rep.failures == 0 && secs < 300.0;
}

bool criterion4(std::string& note) {
  double worst_ratio = 0.0;
  int bad = 0;
  for (double q : {1.3, 1.7, 1.9, 2.1, 2.3, 2.7}) {
    const GeneralizedFunction g = invert(exp_derivative_expr(q, 1.0));
    for (double t : {0.5, 1.0, 2.0, 5.0}) {
      const double closed = closed_curve(g, t);
      const EvalResult gl = gl_differintegral(
          [](double x) { return std::exp(-x); }, make_gl_config(t, q, 4096));
      const double tol = std::fmax(1e-3, 3.0 * gl.abs_err);
      const double diff = std::fabs(closed - gl.value);
      if (diff > tol) ++bad;
      worst_ratio = std::fmax(worst_ratio, diff / tol);
    }
  }
  note = std::to_string(bad) + " of 24 points out of tolerance, worst |diff|/tol " +
         num(worst_ratio);
  return bad == 0;
}

// Bisects a sign change of fn on [lo, hi] located from a violation scan.
template <typename F>
double bisect(F fn, double lo, double hi) {
  double flo = fn(lo);
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = fn(mid);
    if ((flo < 0) == (fm < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

bool criterion5(std::string& note) {
  const GeneralizedFunction g199 = invert(exp_derivative_expr(1.99, 1.0));
  const GeneralizedFunction g201 = invert(exp_derivative_expr(2.01, 1.0));
  const GeneralizedFunction g190 = invert(exp_derivative_expr(1.9, 1.0));
  const auto below = [&](double x) { return closed_curve(g199, x) - std::exp(-x); };
  const auto above = [&](double x) { return std::exp(-x) - closed_curve(g201, x); };
  const auto closer = [&](double x) {
    return std::fabs(closed_curve(g190, x) - std::exp(-x)) -
           std::fabs(closed_curve(g199, x) - std::exp(-x));
  };

  int bad_below = 0, bad_above = 0, bad_closer = 0;
  double first_below = 0, first_above = 0, first_closer = 0;
  for (int i = 0; i <= 380; ++i) {
    const double x = 0.5 + 0.025 * i;
    if (below(x) > 0 && !bad_below++) first_below = x;
    if (above(x) > 0 && !bad_above++) first_above = x;
    if (closer(x) < 0 && !bad_closer++) first_closer = x;
  }

  const bool ok = bad_below == 0 && bad_above == 0 && bad_closer == 0;
  if (ok) {
    note = "sandwich and closeness hold on [0.5, 10]";
    return true;
  }
  note = "violations on [0.5, 10]:";
  if (bad_below) {
    const double c = bisect(below, first_below - 0.025, first_below);
    note += " curve(1.99) crosses above e^{-x} at x=" + num(c) + " (" +
            std::to_string(bad_below) + " pts);";
  }
  if (bad_above) {
    const double c = bisect(above, first_above - 0.025, first_above);
    note += " curve(2.01) crosses below e^{-x} at x=" + num(c) + " (" +
            std::to_string(bad_above) + " pts);";
  }
  if (bad_closer) {
    const double c = bisect(closer, first_closer - 0.025, first_closer);
    note += " curve(1.9) becomes the closer one at x=" + num(c) + " (" +
            std::to_string(bad_closer) + " pts);";
  }
  return false;
}

bool criterion6(std::string& note) {
  for (int n = 0; n <= 3; ++n) {
    LaplaceExpr e;
    e.q = static_cast<double>(n);
    e.family = Family::PureMonomial;
    const GeneralizedFunction g = invert(e);
    if (g.singular.size() != 1 || !g.regular.empty()) {
      note = "wrong term count for s^" + std::to_string(n);
      return false;
    }
    if (g.singular[0].coeff != 1.0 || g.singular[0].order != static_cast<double>(n)) {
      note = "wrong singular term for s^" + std::to_string(n);
      return false;
    }
    for (double t : {0.5, 1.0, 2.0}) {
      if (eval_singular_as_function(g.singular[0], t) != 0.0) {
        note = "nonzero regularization for s^" + std::to_string(n) + " at t=" + num(t);
        return false;
      }
    }
  }
  note = "one integer-order delta derivative each, regularization identically 0";
  return true;
}

bool criterion7(std::string& note) {
  std::mt19937_64 rng(20250819u);
  const auto u01 = [&rng] { return static_cast<double>(rng() >> 11) * 0x1p-53; };
  const double t = 1.3;
  double worst = 0.0;
  int bad = 0;
  for (int i = 0; i < 10; ++i) {
    double alpha, q;
    for (;;) {
      alpha = 1.05 + 1.15 * u01();
      q = (i < 5) ? alpha * (0.15 + 0.75 * u01())
                  : alpha + (2.35 - alpha) * (0.05 + 0.95 * u01());
      const double frac = q - alpha - std::round(q - alpha);
      if (std::fabs(frac) >= 0.05) break;
    }
    const auto closed = frac_derivative_power_law(alpha, q);
    const PowerTerm pt = std::get<PowerTerm>(closed);
    const double ref = pt.coeff * std::pow(t, pt.p);
    const double a = alpha;
    const EvalResult gl = gl_differintegral(
        [a](double x) { return std::pow(x, a - 1.0); }, make_gl_config(t, q, 8192));
    const double rel = std::fabs(gl.value - ref) / std::fabs(ref);
    worst = std::fmax(worst, rel);
    if (rel > 1e-4) ++bad;
  }
  note = std::to_string(bad) + " of 10 pairs out of tolerance, worst rel " + num(worst);
  return bad == 0;
}

bool criterion8(std::string& note) {
  for (double alpha : {0.4, 0.7, 1.1, 1.6}) {
    for (int i = 1; i <= 100; ++i) {
      const double q = 4.0 * alpha * i / 100.0;
      LaplaceExpr e;
      e.q = q;
      e.family = Family::BinomialAlpha;
      e.alpha = alpha;
      e.sign = Sign::minus;
      e.lambda = 1.3;
      const GeneralizedFunction g = invert(e);
      const long expected = i / 25;  // floor(q/alpha) with q/alpha = i/25
      if (static_cast<long>(g.singular.size()) != expected) {
        note = "singular count " + std::to_string(g.singular.size()) + " != " +
               std::to_string(expected) + " at alpha=" + num(alpha) + " q=" + num(q);
        return false;
      }
      if (g.regular.size() != 1) {
        note = "expected one regular term at alpha=" + num(alpha) + " q=" + num(q);
        return false;
      }
      const auto* ml = std::get_if<MLTerm>(&g.regular[0]);
      if (ml == nullptr || !(ml->beta > 0.0) || !(ml->beta <= alpha + 1e-12)) {
        note = "residual beta outside (0, alpha] at alpha=" + num(alpha) +
               " q=" + num(q);
        return false;
      }
    }
  }
  note = "counts and residual beta verified at 400 sweep points";
  return true;
}

struct Criterion {
  int id;
  const char* label;
  bool (*fn)(std::string&);
};

const Criterion kCriteria[] = {
    {1, "Mittag-Leffler identity suite", criterion1},
    {2, "recurrence property", criterion2},
    {3, "round-trip verification", criterion3},
    {4, "closed form vs GL oracle for d^q exp(-t)", criterion4},
    {5, "sandwich of exp(-t) between q=1.99 and q=2.01", criterion5},
    {6, "integer monomials invert to bare delta derivatives", criterion6},
    {7, "power-law derivative identity vs GL oracle", criterion7},
    {8, "extraction count and residual parameter range", criterion8},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc > 1) {
    only = std::atoi(argv[1]);
    if (only < 1 || only > 8) {
      std::fprintf(stderr, "usage: %s [1..8]\n", argv[0]);
      return 2;
    }
  }
  int failures = 0;
  for (const Criterion& c : kCriteria) {
    if (only && c.id != only) continue;
    std::string note;
    bool ok;
    try {
      ok = c.fn(note);
    } catch (const std::exception& exc) {
      ok = false;
      note = std::string("exception: ") + exc.what();
    }
    if (!ok) ++failures;
    std::printf("[%s] criterion %d: %s — %s\n", ok ? "PASS" : "FAIL", c.id, c.label,
                note.c_str());
  }
  return failures;
}
