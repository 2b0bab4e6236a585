#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "floodsp/grid.hpp"
#include "floodsp/scenario.hpp"
#include "floodsp/scenario_gen.hpp"

namespace floodsp {

/// Bundled desk-scale instance.
struct Fixture {
  std::string name;
  GridNetwork network;
  FloodScenarioSet scenarios;
  int rhat = 3;
};

/// tiny3, star8, ring12, coastal40. Throws std::invalid_argument otherwise.
Fixture make_fixture(std::string_view name);
std::vector<std::string> fixture_names();

/// Piecewise-linear Gulf coastline used by coastal40 (lon/lat, south to east).
Coastline gulf_coastline();

}  // namespace floodsp
