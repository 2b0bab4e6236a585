#pragma once

#include <cstdint>
#include <vector>

#include "floodsp/grid.hpp"
#include "floodsp/lp.hpp"
#include "floodsp/mitigation.hpp"
#include "floodsp/scenario.hpp"

namespace floodsp {

/// Operational statuses: alpha per bus, beta per branch.
struct StatusVector {
  std::vector<std::uint8_t> alpha;
  std::vector<std::uint8_t> beta;

  bool operator==(const StatusVector&) const = default;
};

struct DispatchState {
  std::vector<double> p_hat;
  std::vector<double> p_check;
  std::vector<double> p_flow;
  std::vector<double> delta;
  std::vector<double> theta;
};

struct LossWeights {
  double shed = 1.0;
  double over = 1.0;

  void check() const;
};

/// Substation k operates iff prod_r (1 - xi_kr (1 - x_kr)) = 1, for
/// r = 1..plan.rhat(); buses inherit it and branches need both ends.
StatusVector status_closure(const GridNetwork& network, const MitigationPlan& plan, const FloodScenario& scenario);

/// Column indices of the recourse LP; -1 where a variable is absent.
struct RecourseIndex {
  std::vector<int> p_hat, p_check, delta, theta, flow;
};

/// DC power-flow load-shed LP for fixed statuses.
lp::Model recourse_model(const GridNetwork& network, const StatusVector& status, const LossWeights& weights,
                         RecourseIndex* index = nullptr);

struct RecourseResult {
  double loss = 0.0;
  double served_load = 0.0;
  double overgeneration = 0.0;
  DispatchState dispatch;
};

/// Throws std::runtime_error if the LP is not solved to optimality, which
/// would contradict relatively complete recourse.
RecourseResult solve_recourse_lp(const GridNetwork& network, const StatusVector& status, const LossWeights& weights);

struct PlanEvaluation {
  double expected_loss = 0.0;
  std::vector<double> losses;
  std::vector<double> served_load;
};

/// Probability-weighted recourse loss; scenarios are solved in parallel.
PlanEvaluation evaluate_plan(const GridNetwork& network, const MitigationPlan& plan, const FloodScenarioSet& scenarios,
                             const LossWeights& weights);
/// Single-threaded reference for evaluate_plan.
PlanEvaluation evaluate_plan_serial(const GridNetwork& network, const MitigationPlan& plan,
                                    const FloodScenarioSet& scenarios, const LossWeights& weights);

}  // namespace floodsp
