#include "floodsp/heuristic.hpp"

#include <stdexcept>

#include "floodsp/recourse.hpp"

namespace floodsp {

void AttributeWeights::check() const {
  if (eta_load < 0.0 || eta_gen < 0.0 || eta_flow < 0.0) throw std::invalid_argument("attribute weights must be nonnegative");
  if (eta_load == 0.0 && eta_gen == 0.0 && eta_flow == 0.0) throw std::invalid_argument("attribute weights may not all be zero");
}

double benefit(const MitigationPlan& plan, const MitigationPlan& candidate, const AttributeWeights& weights,
               const GridNetwork& network, const FloodScenarioSet& scenarios) {
  if (!candidate.covers(plan)) throw std::invalid_argument("benefit: candidate does not cover the current plan");
  double rho_load = 0.0, rho_gen = 0.0, rho_flow = 0.0;
  for (const auto& sc : scenarios.scenarios) {
    const auto before = status_closure(network, plan, sc);
    const auto after = status_closure(network, candidate, sc);
    for (int i = 0; i < network.num_buses(); ++i) {
      const auto u = static_cast<size_t>(i);
      const int gained = after.alpha[u] - before.alpha[u];
      rho_load += sc.probability * gained * network.buses()[u].p_load;
      rho_gen += sc.probability * gained * network.buses()[u].p_gen_max;
    }
    for (int e = 0; e < network.num_branches(); ++e) {
      const auto u = static_cast<size_t>(e);
      rho_flow += sc.probability * (after.beta[u] - before.beta[u]) * network.branches()[u].flow_limit;
    }
  }
  return weights.eta_load * rho_load + weights.eta_gen * rho_gen + weights.eta_flow * rho_flow;
}

namespace {

struct Candidate {
  int substation;
  int level;
  int cost;
  double benefit = 0.0;
};

std::vector<Candidate> candidates(const MitigationPlan& plan, int remaining, const CostSchedule& schedule, int rhat) {
  std::vector<Candidate> out;
  for (int k = 0; k < plan.num_substations(); ++k) {
    const int cur = plan.level(k);
    for (int level = cur + 1; level < rhat; ++level) {
      const int cost = schedule.cost_to_level(k, level) - schedule.cost_to_level(k, cur);
      if (cost <= remaining) out.push_back({k, level, cost});
    }
  }
  return out;
}

MitigationPlan upgraded(MitigationPlan plan, const Candidate& c) {
  plan.set_level(c.substation, c.level);
  return plan;
}

// Highest benefit/cost ratio, ties to the smallest (substation id, level).
const Candidate* select(const std::vector<Candidate>& cands, const GridNetwork& network) {
  const Candidate* best = nullptr;
  for (const auto& c : cands) {
    if (!best) {
      best = &c;
      continue;
    }
    const double lhs = c.benefit * best->cost, rhs = best->benefit * c.cost;
    if (lhs > rhs) {
      best = &c;
    } else if (lhs == rhs) {
      const auto& a = network.substations()[static_cast<size_t>(c.substation)].id;
      const auto& b = network.substations()[static_cast<size_t>(best->substation)].id;
      if (a < b || (a == b && c.level < best->level)) best = &c;
    }
  }
  return best;
}

template <bool Parallel>
GreedyResult run_greedy(const AttributeWeights& weights, Budget budget, const GridNetwork& network,
                        const FloodScenarioSet& scenarios, const CostSchedule& schedule, int rhat) {
  weights.check();
  if (budget.f < 0) throw std::invalid_argument("greedy: negative budget");
  GreedyResult res{MitigationPlan(network.num_substations(), rhat), {}};
  int remaining = budget.f;
  while (remaining > 0) {
    auto cands = candidates(res.plan, remaining, schedule, rhat);
    if (cands.empty()) break;
    const long count = static_cast<long>(cands.size());
    if constexpr (Parallel) {
#pragma omp parallel for schedule(dynamic)
      for (long i = 0; i < count; ++i) {
        auto& c = cands[static_cast<size_t>(i)];
        c.benefit = benefit(res.plan, upgraded(res.plan, c), weights, network, scenarios);
      }
    } else {
      for (auto& c : cands) c.benefit = benefit(res.plan, upgraded(res.plan, c), weights, network, scenarios);
    }
    double top = 0.0;
    for (const auto& c : cands) top = std::max(top, c.benefit);
    if (top <= 0.0) break;
    const Candidate* pick = select(cands, network);
    res.steps.push_back({pick->substation, res.plan.level(pick->substation), pick->level, pick->cost, pick->benefit});
    res.plan.set_level(pick->substation, pick->level);
    remaining -= pick->cost;
  }
  return res;
}

}  // namespace

GreedyResult greedy(const AttributeWeights& weights, Budget budget, const GridNetwork& network,
                    const FloodScenarioSet& scenarios, const CostSchedule& schedule, int rhat) {
  return run_greedy<true>(weights, budget, network, scenarios, schedule, rhat);
}

GreedyResult greedy_serial(const AttributeWeights& weights, Budget budget, const GridNetwork& network,
                           const FloodScenarioSet& scenarios, const CostSchedule& schedule, int rhat) {
  return run_greedy<false>(weights, budget, network, scenarios, schedule, rhat);
}

std::vector<PortfolioEntry> portfolio(Budget budget, const GridNetwork& network, const FloodScenarioSet& scenarios,
                                      const CostSchedule& schedule, int rhat, const std::vector<double>& eta_flow) {
  std::vector<PortfolioEntry> out;
  for (double eta : eta_flow) {
    auto plan = greedy(AttributeWeights{1.0, 0.0, eta}, budget, network, scenarios, schedule, rhat).plan;
    bool merged = false;
    for (auto& e : out) {
      if (e.plan == plan) {
        e.eta_flow.push_back(eta);
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back({std::move(plan), {eta}});
  }
  return out;
}

}  // namespace floodsp
