#pragma once

#include "counter_rng.hpp"
#include "errors.hpp"
#include "estimate.hpp"
#include "evaluate.hpp"
#include "monte_carlo.hpp"
#include "numerics.hpp"
#include "planner.hpp"
#include "point_rx.hpp"
#include "quadrature.hpp"
#include "renewal.hpp"
#include "scenario.hpp"
#include "shadow.hpp"
#include "tabulated.hpp"
