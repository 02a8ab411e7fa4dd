#pragma once

// Umbrella header.

#include "core.hpp"       // domain types and validation
#include "milp.hpp"       // MILP carrier
#include "simplex.hpp"    // bounded-variable simplex
#include "branch_and_bound.hpp"
#include "mps.hpp"        // exchange formats
#include "solver.hpp"     // solve contract and backends
#include "session_model.hpp"
#include "robust.hpp"     // price dualization + CCG
#include "pipeline.hpp"   // market session sequencing
#include "allocation.hpp" // marginal-contribution profit split
#include "config.hpp"
#include "reports.hpp"
