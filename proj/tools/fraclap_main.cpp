#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fraclap/fraclap.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace fraclap;

// 17 significant digits, fixed scientific layout: CSV cells round-trip to
// the exact double and line up column-wise.
std::string cell(double v) {
  std::array<char, 48> buf;
  const auto res =
      std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::scientific, 16);
  return std::string(buf.data(), static_cast<std::size_t>(res.ptr - buf.data()));
}

// Shortest round-trip decimal (ASCII), for header labels and JSON-adjacent text.
std::string label(double v) {
  std::array<char, 40> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), static_cast<std::size_t>(res.ptr - buf.data()));
}

struct OutTarget {
  std::ofstream file;
  std::ostream* os = &std::cout;
  bool open(const std::string& path) {
    if (path.empty()) return true;
    file.open(path, std::ios::binary);
    if (!file) return false;
    os = &file;
    return true;
  }
};

int usage_error(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return 2;
}

Family parse_family(const std::string& s) {
  if (s == "mono") return Family::PureMonomial;
  if (s == "shifted") return Family::ShiftedPower;
  return Family::BinomialAlpha;
}

json term_json(const SingularTerm& t) {
  json j;
  j["kind"] = "singular";
  j["coeff"] = t.coeff;
  j["order"] = t.order;
  return j;
}

json term_json(const RegularTerm& t) {
  struct V {
    json operator()(const MLTerm& x) const {
      json j;
      j["kind"] = "ml";
      j["coeff"] = x.coeff;
      j["alpha"] = x.alpha;
      j["beta"] = x.beta;
      j["sign"] = x.sign == Sign::minus ? "minus" : "plus";
      j["lambda"] = x.lambda;
      j["t_power"] = x.t_power;
      return j;
    }
    json operator()(const PowerTerm& x) const {
      json j;
      j["kind"] = "power";
      j["coeff"] = x.coeff;
      j["p"] = x.p;
      return j;
    }
    json operator()(const ExpPowerTerm& x) const {
      json j;
      j["kind"] = "exp_power";
      j["coeff"] = x.coeff;
      j["p"] = x.p;
      j["sign"] = x.sign == Sign::minus ? "minus" : "plus";
      j["lambda"] = x.lambda;
      return j;
    }
    json operator()(const FracExpDerivTerm& x) const {
      json j;
      j["kind"] = "frac_exp_deriv";
      j["coeff"] = x.coeff;
      j["q"] = x.q;
      j["p"] = x.p;
      j["sign"] = x.sign == Sign::minus ? "minus" : "plus";
      j["lambda"] = x.lambda;
      return j;
    }
  };
  return std::visit(V{}, t);
}

int cmd_invert(const std::string& family, double q, double alpha, const std::string& sign,
               double lambda, double mu, const std::string& out_path) {
  if (!(q >= 0) || !std::isfinite(q)) return usage_error("--q must satisfy q >= 0");
  if (!(alpha > 0) || !std::isfinite(alpha)) return usage_error("--alpha must satisfy alpha > 0");
  if (!(lambda >= 0) || !std::isfinite(lambda))
    return usage_error("--lambda must satisfy lambda >= 0");
  if (!std::isfinite(mu)) return usage_error("--mu must be finite");

  LaplaceExpr e;
  e.mu = mu;
  e.q = q;
  e.family = parse_family(family);
  e.alpha = alpha;
  e.sign = sign == "plus" ? Sign::plus : Sign::minus;
  e.lambda = lambda;

  GeneralizedFunction g;
  try {
    g = invert(e);
  } catch (const UnsupportedExpr& exc) {
    return usage_error(exc.what());
  } catch (const DomainError& exc) {
    return usage_error(exc.what());
  }

  OutTarget out;
  if (!out.open(out_path)) {
    std::cerr << "error: cannot open " << out_path << " for writing\n";
    return 1;
  }

  json j;
  j["expression"] = expr_to_string(e);
  j["family"] = family;
  j["mu"] = e.mu;
  j["q"] = e.q;
  if (e.family != Family::PureMonomial) {
    j["alpha"] = e.alpha;
    j["sign"] = e.sign == Sign::minus ? "minus" : "plus";
    j["lambda"] = e.lambda;
  }
  j["exact_multiple"] = g.exact_multiple;
  j["formatted"] = format_gf(g);
  j["singular"] = json::array();
  for (const SingularTerm& t : g.singular) j["singular"].push_back(term_json(t));
  j["regular"] = json::array();
  for (const RegularTerm& t : g.regular) j["regular"].push_back(term_json(t));

  *out.os << format_gf(g) << "\n" << j.dump(2) << "\n";
  return out.os->good() ? 0 : 1;
}

int cmd_eval_ml(double alpha, double beta, double z, double tol, const std::string& out_path) {
  if (!(alpha > 0) || !std::isfinite(alpha)) return usage_error("--alpha must satisfy alpha > 0");
  if (!std::isfinite(beta) || !std::isfinite(z)) return usage_error("--beta/--z must be finite");

  json j;
  j["alpha"] = alpha;
  j["beta"] = beta;
  j["z"] = z;
  int rc = 0;
  try {
    const EvalResult r = ml_eval({alpha, beta, z});
    j["value"] = r.value;
    j["abs_err"] = r.abs_err;
    if (tol > 0 && !(r.abs_err <= tol)) {
      j["error"] = "abs_err exceeds requested --tol";
      rc = 1;
    }
  } catch (const NonConvergent& exc) {
    j["error"] = exc.what();
    j["best_value"] = exc.best_value;
    j["error_bound"] = exc.error_bound;
    rc = 1;
  }

  OutTarget out;
  if (!out.open(out_path)) {
    std::cerr << "error: cannot open " << out_path << " for writing\n";
    return 1;
  }
  *out.os << j.dump(2) << "\n";
  return out.os->good() ? rc : 1;
}

std::vector<double> make_grid(double tmin, double tmax, int points, bool log_spacing) {
  std::vector<double> g;
  g.reserve(static_cast<std::size_t>(points));
  if (log_spacing) {
    const double r = std::log(tmax / tmin) / (points - 1);
    for (int i = 0; i < points; ++i) g.push_back(tmin * std::exp(r * i));
  } else if (tmin == 0.0) {
    // open at zero: singular and t^{p<0} columns are not defined there
    for (int i = 1; i <= points; ++i)
      g.push_back(tmax * static_cast<double>(i) / static_cast<double>(points));
  } else {
    const double d = (tmax - tmin) / (points - 1);
    for (int i = 0; i < points; ++i) g.push_back(tmin + d * i);
  }
  return g;
}

int cmd_fig(int id, double tmin, double tmax, int points, bool log_spacing, double lambda,
            std::vector<double> qs, std::vector<double> alphas, const std::string& out_path) {
  if (id < 1 || id > 3) return usage_error("--id must be 1, 2, or 3");
  if (points < 2) return usage_error("--points must be >= 2");
  if (!(tmin >= 0) || !(tmin < tmax)) return usage_error("grid requires 0 <= tmin < tmax");
  if (log_spacing && tmin == 0.0) return usage_error("log spacing requires tmin > 0");
  if (!(lambda > 0)) return usage_error("--lambda must satisfy lambda > 0");
  for (double q : qs)
    if (!(q >= 0) || !std::isfinite(q)) return usage_error("--q values must satisfy q >= 0");
  for (double a : alphas)
    if (!(a > 0) || !std::isfinite(a)) return usage_error("--alpha values must satisfy alpha > 0");

  if (qs.empty())
    qs = id == 3 ? std::vector<double>{1.3, 1.7, 1.9, 1.99, 2.01, 2.1, 2.3, 2.7}
                 : std::vector<double>{0.1, 0.3, 0.5, 0.7, 0.9, 1.5};
  if (alphas.empty()) alphas = {0.3, 0.5, 0.7, 0.9, 1.0, 1.5, 2.0};

  const std::vector<double> grid = make_grid(tmin, tmax, points, log_spacing);

  OutTarget out;
  if (!out.open(out_path)) {
    std::cerr << "error: cannot open " << out_path << " for writing\n";
    return 1;
  }
  std::ostream& os = *out.os;

  if (id == 1) {
    os << "t";
    for (double q : qs) os << ",q=" << label(q);
    os << "\n";
    for (double t : grid) {
      os << cell(t);
      for (double q : qs) os << "," << cell(eval_singular_as_function({1.0, q}, t));
      os << "\n";
    }
  } else if (id == 2) {
    os << "t,exp";
    for (double a : alphas) os << ",E_alpha=" << label(a) << ",eps_alpha=" << label(a);
    os << "\n";
    for (double t : grid) {
      os << cell(t) << "," << cell(std::exp(-lambda * t));
      for (double a : alphas) {
        const double z = -lambda * std::pow(t, a);
        os << "," << cell(ml_one_param(a, z).value) << ","
           << cell(rabotnov_eval(a, Sign::minus, lambda, t).value);
      }
      os << "\n";
    }
  } else {
    std::vector<GeneralizedFunction> inv;
    std::vector<double> scale;
    for (double q : qs) {
      LaplaceExpr e;
      e.q = q;
      e.family = Family::BinomialAlpha;
      e.alpha = 1.0;
      e.sign = Sign::minus;
      e.lambda = lambda;
      inv.push_back(invert(e));
      scale.push_back(std::pow(lambda, -q));
    }
    os << "lambda_t,exp";
    for (double q : qs) os << ",q=" << label(q);
    os << "\n";
    for (double x : grid) {
      const double t = x / lambda;
      os << cell(x) << "," << cell(std::exp(-x));
      for (std::size_t k = 0; k < qs.size(); ++k)
        os << "," << cell(scale[k] * eval_pointwise(inv[k], t).value);
      os << "\n";
    }
  }
  return os.good() ? 0 : 1;
}

int cmd_verify(std::uint64_t seed, int cases, double tol, const std::string& out_path) {
  if (cases < 1) return usage_error("--cases must be >= 1");
  if (!(tol > 0)) return usage_error("--tol must be > 0");
  const RoundTripReport rep = run_round_trip(seed, cases, tol);
  OutTarget out;
  if (!out.open(out_path)) {
    std::cerr << "error: cannot open " << out_path << " for writing\n";
    return 1;
  }
  *out.os << rep.text;
  if (!out.os->good()) return 1;
  return rep.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "fraclap: inverse Laplace transforms of s^q, s^q/(s -+ lambda)^alpha and "
      "s^q/(s^alpha -+ lambda) as generalized functions"};
  app.require_subcommand(1);

  // invert
  auto* inv = app.add_subcommand("invert", "invert one expression and print its terms");
  std::string family = "mono", sign = "minus", out_path;
  double q = 0, alpha = 1, lambda = 1, mu = 1;
  inv->add_option("--family", family, "expression family")
      ->check(CLI::IsMember({"mono", "shifted", "binomial"}));
  inv->add_option("--q", q, "numerator exponent (q >= 0)")->required();
  inv->add_option("--alpha", alpha, "denominator exponent (alpha > 0)");
  inv->add_option("--sign", sign, "sign of lambda in the time domain")
      ->check(CLI::IsMember({"minus", "plus"}));
  inv->add_option("--lambda", lambda, "shift parameter (lambda >= 0)");
  inv->add_option("--mu", mu, "overall scale");
  inv->add_option("--out", out_path, "output path (default stdout)");

  // eval-ml
  auto* ev = app.add_subcommand("eval-ml", "evaluate E_{alpha,beta}(z)");
  double ml_alpha = 1, ml_beta = 1, ml_z = 0, ml_tol = 0;
  std::string ev_out;
  ev->add_option("--alpha", ml_alpha, "first parameter (alpha > 0)")->required();
  ev->add_option("--beta", ml_beta, "second parameter");
  ev->add_option("--z", ml_z, "argument")->required();
  ev->add_option("--tol", ml_tol, "fail (exit 1) if abs_err exceeds this");
  ev->add_option("--out", ev_out, "output path (default stdout)");

  // fig
  auto* fg = app.add_subcommand("fig", "emit CSV data for figures 1-3");
  int fig_id = 0, points = 400;
  double tmin = 0.0, tmax = 10.0, fig_lambda = 1.0;
  bool log_spacing = false;
  std::vector<double> fig_q, fig_alpha;
  std::string fig_out;
  fg->add_option("--id", fig_id, "figure number (1, 2, or 3)")->required();
  fg->add_option("--points", points, "grid size (>= 2)");
  fg->add_option("--tmin", tmin, "grid start (0 = open at the origin)");
  fg->add_option("--tmax", tmax, "grid end");
  fg->add_flag("--log", log_spacing, "logarithmic spacing (requires tmin > 0)");
  fg->add_option("--lambda", fig_lambda, "lambda for figures 2-3");
  fg->add_option("--q", fig_q, "q list override (figures 1 and 3)");
  fg->add_option("--alpha", fig_alpha, "alpha list override (figure 2)");
  fg->add_option("--out", fig_out, "output path (default stdout)");

  // verify
  auto* vf = app.add_subcommand("verify", "round-trip verification report");
  std::uint64_t seed = 42;
  int cases = 200;
  double vtol = 1e-4;
  std::string vf_out;
  vf->add_option("--seed", seed, "random seed");
  vf->add_option("--cases", cases, "number of random expressions (>= 1)");
  vf->add_option("--tol", vtol, "relative error tolerance");
  vf->add_option("--out", vf_out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (inv->parsed()) return cmd_invert(family, q, alpha, sign, lambda, mu, out_path);
    if (ev->parsed()) return cmd_eval_ml(ml_alpha, ml_beta, ml_z, ml_tol, ev_out);
    if (fg->parsed())
      return cmd_fig(fig_id, tmin, tmax, points, log_spacing, fig_lambda, fig_q, fig_alpha,
                     fig_out);
    if (vf->parsed()) return cmd_verify(seed, cases, vtol, vf_out);
  } catch (const UnsupportedExpr& exc) {
    return usage_error(exc.what());
  } catch (const DomainError& exc) {
    return usage_error(exc.what());
  } catch (const std::exception& exc) {
    std::cerr << "error: " << exc.what() << "\n";
    return 1;
  }
  return 2;
}
