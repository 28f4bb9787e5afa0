#pragma once

#include "errors.hpp"
#include "generalized_function.hpp"
#include "inversion.hpp"
#include "laplace_expr.hpp"
#include "oracles.hpp"
#include "quadrature.hpp"
#include "round_trip.hpp"
#include "special_functions.hpp"
