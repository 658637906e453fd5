#pragma once

// Umbrella header.

#include "fbvp/certify.hpp"
#include "fbvp/config.hpp"
#include "fbvp/envelope.hpp"
#include "fbvp/errors.hpp"
#include "fbvp/expr.hpp"
#include "fbvp/grid_function.hpp"
#include "fbvp/kernel.hpp"
#include "fbvp/measure.hpp"
#include "fbvp/piecewise_linear.hpp"
#include "fbvp/problem.hpp"
#include "fbvp/quadrature.hpp"
#include "fbvp/reference.hpp"
#include "fbvp/solver.hpp"
