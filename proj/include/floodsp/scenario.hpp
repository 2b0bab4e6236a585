#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "floodsp/grid.hpp"

namespace floodsp {

/// Cumulative protection heights (meters) for levels 1, 2, ...
struct DepthThresholds {
  std::vector<double> heights{0.534, 1.0, 1.464};

  /// Throws unless heights are positive and strictly increasing.
  void check() const;
};

/// 0 for a dry site, else the smallest r with depth <= heights[r-1];
/// heights.size() + 1 above the top threshold. Throws on negative depth.
int depth_to_level(double depth, const DepthThresholds& thresholds);

/// Cumulative indicator row: xi_r = 1 for r <= min(level, level_count).
std::vector<int> level_to_indicators(int level, int level_count);

/// One flooding outcome, stored as a flood level per substation (network
/// order). Indicators are derived: xi_kr = [level_k >= r].
struct FloodScenario {
  std::string id;
  double probability = 0.0;
  std::vector<int> levels;

  [[nodiscard]] bool flooded(int substation, int r) const { return levels[static_cast<size_t>(substation)] >= r; }
};

struct FloodScenarioSet {
  std::vector<FloodScenario> scenarios;
  int level_count = 3;
  int unattainable_level = 3;

  [[nodiscard]] int size() const { return static_cast<int>(scenarios.size()); }
  /// Highest flood level at `substation` across scenarios.
  [[nodiscard]] int worst_level(int substation) const;
};

/// Throws std::invalid_argument describing the first broken invariant.
void check_scenarios(const FloodScenarioSet& set, const GridNetwork& network);

/// Parses a scenario document against `network`. Each scenario carries either
/// "levels" {substation: level} (missing substations are dry) or
/// "indicators" {substation: [xi_1, ...]}, which must be cumulative. With
/// `normalize`, probabilities are rescaled to sum to one; otherwise a sum off
/// by more than 1e-9 is an error.
FloodScenarioSet scenarios_from_json(const nlohmann::json& doc, const GridNetwork& network, bool normalize = false);
nlohmann::json scenarios_to_json(const FloodScenarioSet& set, const GridNetwork& network);
FloodScenarioSet load_scenarios(const std::filesystem::path& path, const GridNetwork& network, bool normalize = false);

}  // namespace floodsp
