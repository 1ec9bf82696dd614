#pragma once

#include "witsen/counterexample.hpp"
#include "witsen/error.hpp"
#include "witsen/fixed_point.hpp"
#include "witsen/ghq_solver.hpp"
#include "witsen/levenberg_marquardt.hpp"
#include "witsen/measure_change.hpp"
#include "witsen/model_io.hpp"
#include "witsen/numeric.hpp"
#include "witsen/quadrature.hpp"
#include "witsen/staircase.hpp"
