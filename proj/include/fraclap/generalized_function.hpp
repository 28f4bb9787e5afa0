#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "oracles.hpp"
#include "special_functions.hpp"

namespace fraclap {

// coeff * d^order delta(t-0)/dt^order; the pointwise regularization for t > 0
// is coeff * rgamma(-order) / t^{order+1}, identically zero at integer orders.
struct SingularTerm {
  double coeff = 0;
  double order = 0;
};

// coeff * t^{t_power} * E_{alpha,beta}(sign lambda t^alpha)
struct MLTerm {
  double coeff;
  double alpha;
  double beta;
  Sign sign;
  double lambda;
  double t_power;
};

// coeff * t^p
struct PowerTerm {
  double coeff;
  double p;
};

// coeff * t^p * e^{sign lambda t}
struct ExpPowerTerm {
  double coeff;
  double p;
  Sign sign;
  double lambda;
};

// coeff * d^q [ t^p e^{sign lambda t} ] / dt^q, kept symbolic; pointwise
// values go through the start-corrected Grunwald-Letnikov sum.
struct FracExpDerivTerm {
  double coeff;
  double q;
  double p;
  Sign sign;
  double lambda;
};

using RegularTerm = std::variant<MLTerm, PowerTerm, ExpPowerTerm, FracExpDerivTerm>;

struct GeneralizedFunction {
  std::vector<SingularTerm> singular;
  std::vector<RegularTerm> regular;
  bool exact_multiple = false;  // q = n alpha resolved by the equality convention
};

namespace detail {

inline double regular_coeff(const RegularTerm& t) {
  return std::visit([](const auto& x) { return x.coeff; }, t);
}

inline void set_regular_coeff(RegularTerm& t, double c) {
  std::visit([c](auto& x) { x.coeff = c; }, t);
}

// Kind index plus the non-coefficient parameters, compared bit-exactly; terms
// merge only when every parameter is identical.
inline std::array<double, 6> regular_key(const RegularTerm& t) {
  struct V {
    std::array<double, 6> operator()(const MLTerm& x) const {
      return {0, x.alpha, x.beta, sign_factor(x.sign), x.lambda, x.t_power};
    }
    std::array<double, 6> operator()(const PowerTerm& x) const {
      return {1, x.p, 0, 0, 0, 0};
    }
    std::array<double, 6> operator()(const ExpPowerTerm& x) const {
      return {2, x.p, sign_factor(x.sign), x.lambda, 0, 0};
    }
    std::array<double, 6> operator()(const FracExpDerivTerm& x) const {
      return {3, x.q, x.p, sign_factor(x.sign), x.lambda, 0};
    }
  };
  return std::visit(V{}, t);
}

}  // namespace detail

// Regularized pointwise value of a delta-derivative term for t > 0.
inline double eval_singular_as_function(const SingularTerm& term, double t) {
  if (!(t > 0)) throw DomainError("eval_singular_as_function: requires t > 0");
  if (term.coeff == 0.0) return 0.0;
  const double rg = rgamma(-term.order);
  if (rg == 0.0) return 0.0;
  return term.coeff * rg / std::pow(t, term.order + 1.0);
}

inline EvalResult eval_regular_term(const RegularTerm& term, double t) {
  if (!(t > 0)) throw DomainError("eval_regular_term: requires t > 0");
  struct V {
    double t;
    EvalResult operator()(const MLTerm& x) const {
      const double z = sign_factor(x.sign) * x.lambda * std::pow(t, x.alpha);
      const EvalResult ml = ml_eval({x.alpha, x.beta, z});
      const double tp = std::pow(t, x.t_power);
      const double v = x.coeff * tp * ml.value;
      const double err =
          std::fabs(x.coeff * tp) *
          (ml.abs_err + std::fabs(ml.value) * (3.0 + std::fabs(x.alpha) + std::fabs(x.t_power)) * 1e-15);
      return {v, err};
    }
    EvalResult operator()(const PowerTerm& x) const {
      const double v = x.coeff * std::pow(t, x.p);
      return {v, std::fabs(v) * (2.0 + std::fabs(x.p)) * 1e-16};
    }
    EvalResult operator()(const ExpPowerTerm& x) const {
      const double v = x.coeff * std::pow(t, x.p) * std::exp(sign_factor(x.sign) * x.lambda * t);
      return {v, std::fabs(v) * ((3.0 + std::fabs(x.p)) * 1e-16 + x.lambda * t * 1.2e-16)};
    }
    EvalResult operator()(const FracExpDerivTerm& x) const {
      return gl_exp_power_derivative(x.coeff, x.p, x.sign, x.lambda, x.q, t);
    }
  };
  return std::visit(V{t}, term);
}

// Sum of the regular terms at t > 0; singular terms are excluded.
inline EvalResult eval_regular_part(const GeneralizedFunction& f, double t) {
  if (!(t > 0)) throw DomainError("eval_regular_part: requires t > 0");
  EvalResult acc{0.0, 0.0};
  for (const RegularTerm& term : f.regular) {
    const EvalResult r = eval_regular_term(term, t);
    acc.value += r.value;
    acc.abs_err += r.abs_err;
  }
  acc.abs_err += 2e-16 * std::fabs(acc.value);
  return acc;
}

// Regular part plus the pointwise regularization of every singular term.
inline EvalResult eval_pointwise(const GeneralizedFunction& f, double t) {
  EvalResult acc = eval_regular_part(f, t);
  for (const SingularTerm& term : f.singular) {
    const double v = eval_singular_as_function(term, t);
    acc.value += v;
    acc.abs_err += std::fabs(v) * (3.0 + std::fabs(term.order)) * 1e-15;
  }
  return acc;
}

// Merges bit-identical term parameters (summing coefficients), drops zero
// coefficients, and orders singular terms by descending order.
inline GeneralizedFunction simplify(const GeneralizedFunction& f) {
  GeneralizedFunction out;
  out.exact_multiple = f.exact_multiple;

  std::vector<SingularTerm> s = f.singular;
  std::sort(s.begin(), s.end(),
            [](const SingularTerm& a, const SingularTerm& b) { return a.order > b.order; });
  for (const SingularTerm& term : s) {
    if (!out.singular.empty() && out.singular.back().order == term.order)
      out.singular.back().coeff += term.coeff;
    else
      out.singular.push_back(term);
  }
  out.singular.erase(std::remove_if(out.singular.begin(), out.singular.end(),
                                    [](const SingularTerm& x) { return x.coeff == 0.0; }),
                     out.singular.end());

  std::vector<RegularTerm> r = f.regular;
  std::sort(r.begin(), r.end(), [](const RegularTerm& a, const RegularTerm& b) {
    return detail::regular_key(a) < detail::regular_key(b);
  });
  for (const RegularTerm& term : r) {
    if (!out.regular.empty() &&
        detail::regular_key(out.regular.back()) == detail::regular_key(term))
      detail::set_regular_coeff(out.regular.back(),
                                detail::regular_coeff(out.regular.back()) +
                                    detail::regular_coeff(term));
    else
      out.regular.push_back(term);
  }
  out.regular.erase(std::remove_if(out.regular.begin(), out.regular.end(),
                                   [](const RegularTerm& x) {
                                     return detail::regular_coeff(x) == 0.0;
                                   }),
                    out.regular.end());
  return out;
}

namespace detail {

// Shortest round-trip decimal with U+2212 for the minus sign.
inline std::string fmt_num(double v) {
  std::array<char, 40> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  std::string s(buf.data(), static_cast<std::size_t>(res.ptr - buf.data()));
  if (!s.empty() && s[0] == '-') return "−" + s.substr(1);
  return s;
}

inline std::string fmt_sign_lambda(Sign sign, double lambda) {
  return (sign == Sign::minus ? std::string("−") : std::string()) + fmt_num(lambda);
}

inline std::string format_term_body(const SingularTerm& x) {
  const double a = std::fabs(x.coeff);
  std::string body;
  if (a != 1.0) body = fmt_num(a) + "·";
  if (x.order == 0.0) return body + "δ(t)";
  const std::string mu = fmt_num(x.order);
  return body + "d^{" + mu + "}δ(t)/dt^{" + mu + "}";
}

inline std::string format_term_body(const RegularTerm& t) {
  struct V {
    std::string operator()(const MLTerm& x) const {
      return fmt_num(std::fabs(x.coeff)) + "·t^{" + fmt_num(x.t_power) +
             "}·E_{" + fmt_num(x.alpha) + "," + fmt_num(x.beta) + "}(" +
             fmt_sign_lambda(x.sign, x.lambda) + "·t^" + fmt_num(x.alpha) + ")";
    }
    std::string operator()(const PowerTerm& x) const {
      return fmt_num(std::fabs(x.coeff)) + "·t^{" + fmt_num(x.p) + "}";
    }
    std::string operator()(const ExpPowerTerm& x) const {
      return fmt_num(std::fabs(x.coeff)) + "·t^{" + fmt_num(x.p) + "}·e^{" +
             fmt_sign_lambda(x.sign, x.lambda) + "·t}";
    }
    std::string operator()(const FracExpDerivTerm& x) const {
      const std::string q = fmt_num(x.q);
      return fmt_num(std::fabs(x.coeff)) + "·d^{" + q + "}[t^{" + fmt_num(x.p) +
             "}·e^{" + fmt_sign_lambda(x.sign, x.lambda) + "·t}]/dt^{" + q + "}";
    }
  };
  return std::visit(V{}, t);
}

inline void append_term(std::string& out, bool negative, const std::string& body) {
  if (out.empty()) {
    if (negative) out += "−";
  } else {
    out += negative ? " − " : " + ";
  }
  out += body;
}

}  // namespace detail

// Deterministic rendering: singular terms first, then regular terms, in the
// order stored (simplify establishes the canonical order).  Uses U+2212 for
// minus, U+00B7 for products, and braces around every exponent of t and of
// the differentiation order.
inline std::string format_gf(const GeneralizedFunction& f) {
  std::string out;
  for (const SingularTerm& term : f.singular)
    detail::append_term(out, std::signbit(term.coeff), detail::format_term_body(term));
  for (const RegularTerm& term : f.regular)
    detail::append_term(out, std::signbit(detail::regular_coeff(term)),
                        detail::format_term_body(term));
  if (out.empty()) return "0";
  return out;
}

}  // namespace fraclap
