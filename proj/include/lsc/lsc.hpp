#pragma once

#include "lsc/cost_model.hpp"
#include "lsc/errors.hpp"
#include "lsc/exp_poly.hpp"
#include "lsc/fluctuation.hpp"
#include "lsc/levy_model.hpp"
#include "lsc/mc_simulator.hpp"
#include "lsc/threshold_solver.hpp"
