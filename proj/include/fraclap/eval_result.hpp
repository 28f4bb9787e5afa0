#pragma once

namespace fraclap {

struct EvalResult {
  double value;
  double abs_err;  // upper bound on the numerical error of value
};

}  // namespace fraclap
