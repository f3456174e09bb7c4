#pragma once

#include "flra/params.hpp"
#include "flra/fl_model.hpp"
#include "flra/ra_model.hpp"
#include "flra/optimizer.hpp"
#include "flra/mc_sim.hpp"
#include "flra/scenario.hpp"
#include "flra/report.hpp"
