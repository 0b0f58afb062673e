#pragma once

// Everything except the validation checks and the JSON report.

#include "heatcloak/blowup_map.hpp"
#include "heatcloak/fem.hpp"
#include "heatcloak/grid.hpp"
#include "heatcloak/harness/config.hpp"
#include "heatcloak/harness/rates.hpp"
#include "heatcloak/harness/sweep.hpp"
#include "heatcloak/heat_solver.hpp"
#include "heatcloak/helmholtz_solver.hpp"
#include "heatcloak/medium.hpp"
#include "heatcloak/parallel.hpp"
#include "heatcloak/sparse.hpp"
#include "heatcloak/special_functions.hpp"
#include "heatcloak/spectral.hpp"
