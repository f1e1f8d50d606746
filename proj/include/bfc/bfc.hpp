#pragma once

// Bearing-based formation maneuver control toolkit.

#include <bfc/errors.hpp>
#include <bfc/graph.hpp>
#include <bfc/bearings.hpp>
#include <bfc/laplacian.hpp>
#include <bfc/rigidity.hpp>
#include <bfc/rk4.hpp>
#include <bfc/maneuver.hpp>
#include <bfc/controllers.hpp>
#include <bfc/analysis.hpp>
#include <bfc/simulator.hpp>
#include <bfc/scenario_io.hpp>
