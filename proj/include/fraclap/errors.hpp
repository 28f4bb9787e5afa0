#pragma once

#include <stdexcept>
#include <string>

namespace fraclap {

// Argument outside an operation's domain (e.g. evaluation at t <= 0,
// or a Mittag-Leffler parameter alpha <= 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Laplace expression outside the four supported families or violating
// the family invariants (q >= 0, alpha > 0, lambda >= 0).
class UnsupportedExpr : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An evaluation scheme could not certify its accuracy target.  Carries the
// best available value and the (uncertified) error bound so callers can
// still inspect the result instead of getting silent inaccuracy.
class NonConvergent : public std::runtime_error {
 public:
  NonConvergent(const std::string& msg, double best_value, double error_bound)
      : std::runtime_error(msg), best_value(best_value), error_bound(error_bound) {}
  double best_value;
  double error_bound;
};

// forward transform requested at s at or below the abscissa of convergence.
class DivergentTransform : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Adaptive quadrature exhausted its subdivision budget before reaching the
// requested error target.  Carries the best value and achieved bound.
class QuadratureFailure : public std::runtime_error {
 public:
  QuadratureFailure(const std::string& msg, double best_value, double error_bound)
      : std::runtime_error(msg), best_value(best_value), error_bound(error_bound) {}
  double best_value;
  double error_bound;
};

// Grunwald-Letnikov extrapolation difference exceeded the requested
// tolerance; a finer step is needed.  Carries the extrapolated value and
// the achieved error estimate.
class StepTooCoarse : public std::runtime_error {
 public:
  StepTooCoarse(const std::string& msg, double best_value, double error_bound)
      : std::runtime_error(msg), best_value(best_value), error_bound(error_bound) {}
  double best_value;
  double error_bound;
};

}  // namespace fraclap
