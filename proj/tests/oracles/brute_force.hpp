#pragma once

// Exhaustive first-stage oracle: evaluates every plan in X(f) with the
// single-threaded recourse evaluator and keeps the minimum.

#include <numeric>
#include <vector>

#include "floodsp/mitigation.hpp"
#include "floodsp/recourse.hpp"

namespace floodsp::oracle {

struct PlanValue {
  MitigationPlan plan;
  int cost = 0;
  double value = 0.0;
};

/// Every plan affordable at `max_budget`, each with its cost and expected loss.
inline std::vector<PlanValue> all_plan_values(const GridNetwork& network, const FloodScenarioSet& scenarios,
                                              const CostSchedule& schedule, int max_budget, int rhat,
                                              const LossWeights& weights) {
  std::vector<int> all(static_cast<size_t>(network.num_substations()));
  std::iota(all.begin(), all.end(), 0);
  std::vector<PlanValue> out;
  for (auto& plan : enumerate_plans(schedule, Budget{max_budget}, rhat, all)) {
    const double v = evaluate_plan_serial(network, plan, scenarios, weights).expected_loss;
    const int c = plan_cost(plan, schedule);
    out.push_back({std::move(plan), c, v});
  }
  return out;
}

/// Minimum over plans with cost <= budget.
inline PlanValue best_within(const std::vector<PlanValue>& values, int budget) {
  const PlanValue* best = nullptr;
  for (const auto& pv : values) {
    if (pv.cost > budget) continue;
    if (!best || pv.value < best->value) best = &pv;
  }
  return *best;
}

}  // namespace floodsp::oracle
