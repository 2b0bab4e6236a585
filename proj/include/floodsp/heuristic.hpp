#pragma once

#include <vector>

#include "floodsp/grid.hpp"
#include "floodsp/mitigation.hpp"
#include "floodsp/scenario.hpp"

namespace floodsp {

struct AttributeWeights {
  double eta_load = 1.0;
  double eta_gen = 0.0;
  double eta_flow = 0.0;

  void check() const;
};

/// Expected newly operational load, generation capacity, and flow capacity
/// when moving from `plan` to `candidate`, weighted by eta. Throws unless
/// candidate covers plan.
double benefit(const MitigationPlan& plan, const MitigationPlan& candidate, const AttributeWeights& weights,
               const GridNetwork& network, const FloodScenarioSet& scenarios);

struct GreedyStep {
  int substation = -1;
  int from_level = 0;
  int to_level = 0;
  int cost = 0;
  double benefit = 0.0;
};

struct GreedyResult {
  MitigationPlan plan;
  std::vector<GreedyStep> steps;
};

/// Ratio-greedy single-substation upgrades (multi-level jumps allowed) while
/// budget remains, an affordable upgrade exists, and some upgrade has
/// positive benefit. Ties go to the smallest (substation id, level).
/// Candidates are scored in parallel.
GreedyResult greedy(const AttributeWeights& weights, Budget budget, const GridNetwork& network,
                    const FloodScenarioSet& scenarios, const CostSchedule& schedule, int rhat);
/// Single-threaded reference for greedy.
GreedyResult greedy_serial(const AttributeWeights& weights, Budget budget, const GridNetwork& network,
                           const FloodScenarioSet& scenarios, const CostSchedule& schedule, int rhat);

inline const std::vector<double> kDefaultEtaFlow{0.0, 0.025, 0.05, 0.075, 0.1, 0.125, 0.15};

struct PortfolioEntry {
  MitigationPlan plan;
  std::vector<double> eta_flow;  // every grid value that produced this plan
};

/// Greedy plans for eta_load = 1, eta_gen = 0 over the eta_flow grid,
/// deduplicated in grid order.
std::vector<PortfolioEntry> portfolio(Budget budget, const GridNetwork& network, const FloodScenarioSet& scenarios,
                                      const CostSchedule& schedule, int rhat,
                                      const std::vector<double>& eta_flow = kDefaultEtaFlow);

}  // namespace floodsp
