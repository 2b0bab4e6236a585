#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "floodsp/extensive_form.hpp"
#include "floodsp/grid.hpp"
#include "floodsp/heuristic.hpp"
#include "floodsp/milp.hpp"
#include "floodsp/mitigation.hpp"
#include "floodsp/recourse.hpp"
#include "floodsp/scenario.hpp"

namespace floodsp {

/// Expected share of no-mitigation capacity losses that a plan spares, for
/// load, generation capacity, and branch flow capacity, plus the matching
/// expected absolute amounts (per-unit). A scenario with nothing lost
/// contributes 0.
struct SparedCapacity {
  double load = 0.0;
  double generation = 0.0;
  double transmission = 0.0;
  double load_pu = 0.0;
  double generation_pu = 0.0;
  double transmission_pu = 0.0;
};

SparedCapacity spared_capacity(const MitigationPlan& plan, const GridNetwork& network, const FloodScenarioSet& scenarios);
/// Single-threaded reference for spared_capacity.
SparedCapacity spared_capacity_serial(const MitigationPlan& plan, const GridNetwork& network,
                                      const FloodScenarioSet& scenarios);

struct SweepOptions {
  std::optional<int> max_budget;  // default: max_useful_budget
  bool check_unique = false;
  bool relax_status = false;
  lp::BnbConfig bnb;
  std::function<void(int budget, double objective)> progress;
};

struct SweepRow {
  int budget = 0;
  std::string status;
  double objective = lp::kInfinity;
  double bound = -lp::kInfinity;
  MitigationPlan plan;
  int plan_cost = 0;
  long nodes = 0;
  long lp_iterations = 0;
  double heuristic_objective = lp::kInfinity;
  double seconds = 0.0;
  std::optional<bool> unique;
  SparedCapacity spared;
  std::string error;
};

struct Transition {
  int substation = -1;
  int from_level = 0;
  int to_level = 0;
  int budget = 0;  // budget at which the new level first appears
  bool upward = true;
};

struct SweepReport {
  int rhat = 0;
  std::vector<SweepRow> rows;
  std::vector<Transition> transitions;
};

/// Solves the extensive form for f = 0..F in increasing order. Each solve is
/// seeded with the heuristic portfolio and the previous optimum (completed to
/// full solutions) and with the previous root basis. Failures are recorded
/// per row and the sweep continues.
SweepReport sweep(const GridNetwork& network, const FloodScenarioSet& scenarios, const CostSchedule& schedule, int rhat,
                  const LossWeights& weights, const SweepOptions& options = {});

/// Plan levels per budget, independent of how they were produced.
struct BudgetPlan {
  int budget = 0;
  std::vector<int> levels;
};

struct LevelInterval {
  int substation = -1;
  int level = 0;    // transitions from level-1 to level
  int first = -1;   // first budget at which it happens
  int last = -1;    // last budget at which it happens
};

struct Nestedness {
  /// (f, f') consecutive budgets where plan(f) is not covered by plan(f').
  std::vector<std::pair<int, int>> violations;
  /// Number of consecutive-budget steps at which each substation's level changed.
  std::vector<int> change_counts;
  std::vector<Transition> transitions;
  std::vector<LevelInterval> intervals;
};

Nestedness nestedness(const std::vector<BudgetPlan>& plans);
Nestedness nestedness(const SweepReport& report);

struct RhatResult {
  int rhat = 0;
  double objective = lp::kInfinity;
  std::vector<int> levels;
  std::string status;
};

struct RhatComparison {
  int budget = 0;
  std::vector<RhatResult> results;
  /// Substations whose optimal level differs between the first and each later r-hat.
  std::vector<std::vector<int>> differing;
  /// Objective is nonincreasing in r-hat (within 1e-6).
  bool ordered = true;
};

RhatComparison compare_rhat(const GridNetwork& network, const FloodScenarioSet& scenarios,
                            const CostSchedule& schedule, const LossWeights& weights, Budget budget,
                            const std::vector<int>& rhat_values, const lp::BnbConfig& config = {});

}  // namespace floodsp
