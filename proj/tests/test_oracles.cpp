#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <variant>

#include <fraclap/inversion.hpp>
#include <fraclap/oracles.hpp>

using namespace fraclap;

namespace {

double closed_exp_derivative(double q, double lambda, double t) {
  LaplaceExpr e;
  e.family = Family::BinomialAlpha;
  e.q = q;
  e.alpha = 1.0;
  e.sign = Sign::minus;
  e.lambda = lambda;
  return eval_pointwise(invert(e), t).value;
}

}  // namespace

TEST_CASE("GL reproduces classical derivatives and the identity") {
  const auto one = [](double) { return 1.0; };
  const auto lin = [](double t) { return t; };
  const auto expm = [](double t) { return std::exp(-t); };

  // Half derivative of 1 is 1/sqrt(pi t).
  const EvalResult h = gl_differintegral(one, make_gl_config(1.0, 0.5));
  CHECK(std::fabs(h.value - 0.5641895835477562869481) < 1e-6);
  CHECK(std::fabs(h.value - 0.5641895835477562869481) < 3.0 * h.abs_err + 1e-9);

  // q = 0 returns the function value.
  const EvalResult id = gl_differintegral(expm, make_gl_config(1.7, 0.0));
  CHECK(std::fabs(id.value - std::exp(-1.7)) < 1e-14);

  // First derivative of t is 1.
  const EvalResult d1 = gl_differintegral(lin, make_gl_config(2.0, 1.0));
  CHECK(std::fabs(d1.value - 1.0) < 1e-10);

  // q = -1 integrates: int_0^2 t dt = 2.
  const EvalResult i1 = gl_differintegral(lin, make_gl_config(2.0, -1.0));
  CHECK(std::fabs(i1.value - 2.0) < 1e-6);
}

TEST_CASE("GL error decreases under step halving") {
  const auto f = [](double t) { return std::pow(t, 1.7); };
  const double q = 0.7, t = 1.5;
  const double ref = std::tgamma(2.7) / std::tgamma(2.0) * t;  // d^q t^{1.7}
  double prev = 1e300;
  for (long steps : {1024L, 2048L, 4096L, 8192L}) {
    const EvalResult r = gl_differintegral(f, make_gl_config(t, q, steps));
    const double err = std::fabs(r.value - ref);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-7);
}

TEST_CASE("GL fractional derivative of exp(-t) against the closed form") {
  for (double q : {0.3, 0.5, 0.9, 1.5, 2.3}) {
    for (double t : {0.5, 1.0, 2.0, 5.0}) {
      CAPTURE(q, t);
      const long steps = q > 2.0 ? 4096 : 8192;
      const EvalResult gl = gl_differintegral(
          [](double x) { return std::exp(-x); }, make_gl_config(t, q, steps));
      const double ref = closed_exp_derivative(q, 1.0, t);
      CHECK(std::fabs(gl.value - ref) < std::max(1e-4, 3.0 * gl.abs_err));
    }
  }
}

TEST_CASE("GL fractional derivative of exp(-t) at frozen points") {
  struct Case {
    double q, ref;
  };
  const Case cases[] = {
      {1.3, -0.36167581485779270571},
      {1.7, -0.029403292883086826864},
      {1.9, 0.23388156697757843117},
      {2.7, 0.4271878684344735861},
  };
  for (const auto& c : cases) {
    CAPTURE(c.q);
    const long steps = c.q > 2.0 ? 4096 : 8192;
    const EvalResult gl = gl_differintegral(
        [](double x) { return std::exp(-x); }, make_gl_config(1.0, c.q, steps));
    CHECK(std::fabs(gl.value - c.ref) < std::max(1e-4, 3.0 * gl.abs_err));
  }
}

TEST_CASE("GL on pure powers against the analytic power rule") {
  struct Case {
    double alpha, q;
  };
  const Case cases[] = {{1.3, 0.45}, {1.2, 1.9}, {2.1, 0.8}};
  const double t = 1.3;
  for (const auto& c : cases) {
    CAPTURE(c.alpha, c.q);
    const auto closed = frac_derivative_power_law(c.alpha, c.q);
    REQUIRE(std::holds_alternative<PowerTerm>(closed));
    const PowerTerm pt = std::get<PowerTerm>(closed);
    const double ref = pt.coeff * std::pow(t, pt.p);
    const double a = c.alpha;
    const EvalResult gl = gl_differintegral(
        [a](double x) { return std::pow(x, a - 1.0); },
        make_gl_config(t, c.q, 8192));
    CHECK(std::fabs(gl.value - ref) < 1e-4 * std::fabs(ref));
  }
}

TEST_CASE("start-corrected GL matches the binomial-family closed form") {
  for (double q : {0.7, 1.6}) {
    for (double t : {0.6, 1.1}) {
      CAPTURE(q, t);
      const EvalResult gl = gl_exp_power_derivative(1.0, 0.0, Sign::minus, 2.0, q, t);
      const double ref = closed_exp_derivative(q, 2.0, t);
      CHECK(std::fabs(gl.value - ref) < std::max(1e-6, 3.0 * gl.abs_err));
    }
  }
}

TEST_CASE("high-precision series agrees with the frozen value") {
  const EvalResult r = ml_series_hp({0.5, 1.0, -2.0}, 1e-13);
  CHECK(std::fabs(r.value - 0.2553956763105057438651) < 1e-15);
  CHECK(r.abs_err <= 1e-13);
}

TEST_CASE("high-precision series refuses catastrophic cancellation") {
  try {
    ml_series_hp({0.3, 1.0, -50.0}, 1e-16);
    FAIL("expected NonConvergent");
  } catch (const NonConvergent& e) {
    CHECK(std::isfinite(e.error_bound) == false);
  }
}

TEST_CASE("GL raises StepTooCoarse when the tolerance is unreachable") {
  try {
    gl_differintegral([](double x) { return std::exp(-x); },
                      make_gl_config(1.0, 0.5, 256), 1e-18);
    FAIL("expected StepTooCoarse");
  } catch (const StepTooCoarse& e) {
    CHECK(std::isfinite(e.best_value));
    CHECK(e.error_bound > 1e-18);
  }
}

TEST_CASE("GL configuration is validated") {
  CHECK_THROWS_AS(make_gl_config(0.0, 0.5), DomainError);
  CHECK_THROWS_AS(make_gl_config(-1.0, 0.5), DomainError);
  CHECK_THROWS_AS(make_gl_config(1.0, 0.5, 16), DomainError);
  const GLConfig bad{0.3, 1.0, 0.5, true};  // t/h not an integer
  CHECK_THROWS_AS(gl_differintegral([](double) { return 1.0; }, bad), DomainError);
}
