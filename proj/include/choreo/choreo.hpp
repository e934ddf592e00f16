#pragma once

// Umbrella header: periodic three-body orbits, their second-variation
// spectrum, and bifurcation analysis of the figure-eight families.

#include "choreo/bifurcation.hpp"
#include "choreo/core.hpp"
#include "choreo/dop853.hpp"
#include "choreo/lj.hpp"
#include "choreo/potential.hpp"
#include "choreo/records.hpp"
#include "choreo/search.hpp"
#include "choreo/shooting.hpp"
#include "choreo/spectrum.hpp"
#include "choreo/trajectory.hpp"
