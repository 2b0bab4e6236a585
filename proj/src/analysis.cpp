#include "floodsp/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>

namespace floodsp {

namespace {

struct SpareTerms {
  double load = 0, gen = 0, flow = 0;        // proportions
  double load_pu = 0, gen_pu = 0, flow_pu = 0;  // absolute
};

SpareTerms spare_terms(const MitigationPlan& plan, const MitigationPlan& zero, const GridNetwork& network,
                       const FloodScenario& sc) {
  const auto base = status_closure(network, zero, sc);
  const auto with = status_closure(network, plan, sc);
  double lost_load = 0, lost_gen = 0, lost_flow = 0;
  SpareTerms t;
  for (int i = 0; i < network.num_buses(); ++i) {
    const auto u = static_cast<size_t>(i);
    const auto& b = network.buses()[u];
    lost_load += (1 - base.alpha[u]) * b.p_load;
    lost_gen += (1 - base.alpha[u]) * b.p_gen_max;
    t.load_pu += (with.alpha[u] - base.alpha[u]) * b.p_load;
    t.gen_pu += (with.alpha[u] - base.alpha[u]) * b.p_gen_max;
  }
  for (int e = 0; e < network.num_branches(); ++e) {
    const auto u = static_cast<size_t>(e);
    lost_flow += (1 - base.beta[u]) * network.branches()[u].flow_limit;
    t.flow_pu += (with.beta[u] - base.beta[u]) * network.branches()[u].flow_limit;
  }
  t.load = lost_load > 0 ? t.load_pu / lost_load : 0.0;
  t.gen = lost_gen > 0 ? t.gen_pu / lost_gen : 0.0;
  t.flow = lost_flow > 0 ? t.flow_pu / lost_flow : 0.0;
  return t;
}

SparedCapacity combine(const std::vector<SpareTerms>& terms, const FloodScenarioSet& scenarios) {
  SparedCapacity out;
  for (size_t w = 0; w < terms.size(); ++w) {
    const double p = scenarios.scenarios[w].probability;
    out.load += p * terms[w].load;
    out.generation += p * terms[w].gen;
    out.transmission += p * terms[w].flow;
    out.load_pu += p * terms[w].load_pu;
    out.generation_pu += p * terms[w].gen_pu;
    out.transmission_pu += p * terms[w].flow_pu;
  }
  return out;
}

}  // namespace

SparedCapacity spared_capacity(const MitigationPlan& plan, const GridNetwork& network, const FloodScenarioSet& scenarios) {
  const MitigationPlan zero(plan.num_substations(), plan.rhat());
  std::vector<SpareTerms> terms(scenarios.scenarios.size());
  const long count = static_cast<long>(terms.size());
#pragma omp parallel for schedule(static)
  for (long w = 0; w < count; ++w) {
    terms[static_cast<size_t>(w)] = spare_terms(plan, zero, network, scenarios.scenarios[static_cast<size_t>(w)]);
  }
  return combine(terms, scenarios);
}

SparedCapacity spared_capacity_serial(const MitigationPlan& plan, const GridNetwork& network,
                                      const FloodScenarioSet& scenarios) {
  const MitigationPlan zero(plan.num_substations(), plan.rhat());
  std::vector<SpareTerms> terms;
  for (const auto& sc : scenarios.scenarios) terms.push_back(spare_terms(plan, zero, network, sc));
  return combine(terms, scenarios);
}

SweepReport sweep(const GridNetwork& network, const FloodScenarioSet& scenarios, const CostSchedule& schedule, int rhat,
                  const LossWeights& weights, const SweepOptions& options) {
  using Clock = std::chrono::steady_clock;
  const int top = options.max_budget.value_or(max_useful_budget(network, scenarios, schedule, rhat));
  if (top < 0) throw std::invalid_argument("sweep: negative maximum budget");
  ExtensiveOptions eo;
  eo.relax_status = options.relax_status;
  auto form = build_extensive_form(network, scenarios, schedule, Budget{0}, rhat, weights, eo);

  SweepReport report;
  report.rhat = rhat;
  std::map<std::vector<int>, std::vector<double>> completed;
  auto complete = [&](const MitigationPlan& plan) -> const std::vector<double>& {
    auto key = plan.levels();
    auto it = completed.find(key);
    if (it == completed.end()) it = completed.emplace(std::move(key), complete_solution(form, network, scenarios, plan, weights)).first;
    return it->second;
  };

  std::optional<MitigationPlan> previous;
  std::optional<lp::Basis> basis;
  for (int f = 0; f <= top; ++f) {
    const auto start = Clock::now();
    SweepRow row;
    row.budget = f;
    try {
      set_budget(form, Budget{f});
      lp::BnbConfig cfg = options.bnb;
      for (const auto& entry : portfolio(Budget{f}, network, scenarios, schedule, rhat)) {
        const auto& v = complete(entry.plan);
        row.heuristic_objective = std::min(row.heuristic_objective, form.model.objective_value(v));
        cfg.candidates.push_back(v);
      }
      if (previous) cfg.candidates.push_back(complete(*previous));
      if (basis) cfg.root_basis = basis;
      const auto sol = solve_extensive_form(form, cfg);
      row.status = lp::to_string(sol.milp.status);
      row.nodes = sol.milp.nodes;
      row.lp_iterations = sol.milp.lp_iterations;
      row.bound = sol.milp.bound;
      if (!sol.milp.root_basis.status.empty()) basis = sol.milp.root_basis;
      if (sol.solved()) {
        row.objective = sol.objective;
        row.plan = sol.plan;
        row.plan_cost = plan_cost(sol.plan, schedule);
        row.spared = spared_capacity(sol.plan, network, scenarios);
        previous = sol.plan;
        if (options.check_unique) {
          lp::BnbConfig ucfg = options.bnb;
          std::vector<double> point;
          for (int v : form.x_vars) point.push_back(sol.milp.values[static_cast<size_t>(v)]);
          row.unique = lp::check_uniqueness(form.model, form.x_vars, point, sol.objective, ucfg).unique;
        }
      } else {
        row.plan = MitigationPlan(network.num_substations(), rhat);
      }
    } catch (const std::exception& e) {
      row.status = "error";
      row.error = e.what();
      row.plan = MitigationPlan(network.num_substations(), rhat);
    }
    row.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (options.progress) options.progress(f, row.objective);
    report.rows.push_back(std::move(row));
  }
  report.transitions = nestedness(report).transitions;
  return report;
}

Nestedness nestedness(const std::vector<BudgetPlan>& plans) {
  Nestedness out;
  if (plans.empty()) return out;
  const size_t K = plans.front().levels.size();
  out.change_counts.assign(K, 0);
  std::map<std::pair<int, int>, LevelInterval> intervals;
  for (size_t i = 1; i < plans.size(); ++i) {
    const auto& a = plans[i - 1];
    const auto& b = plans[i];
    if (b.levels.size() != K) throw std::invalid_argument("nestedness: plans differ in size");
    bool nested = true;
    for (size_t k = 0; k < K; ++k) {
      const int from = a.levels[k], to = b.levels[k];
      if (from > to) nested = false;
      if (from == to) continue;
      ++out.change_counts[k];
      out.transitions.push_back({static_cast<int>(k), from, to, b.budget, to > from});
      for (int level = from + 1; level <= to; ++level) {
        auto& iv = intervals[{static_cast<int>(k), level}];
        iv.substation = static_cast<int>(k);
        iv.level = level;
        if (iv.first < 0) iv.first = b.budget;
        iv.last = b.budget;
      }
    }
    if (!nested) out.violations.emplace_back(a.budget, b.budget);
  }
  for (const auto& [key, iv] : intervals) out.intervals.push_back(iv);
  return out;
}

Nestedness nestedness(const SweepReport& report) {
  std::vector<BudgetPlan> plans;
  for (const auto& row : report.rows) {
    if (row.status == "error" || row.plan.num_substations() == 0) continue;
    plans.push_back({row.budget, row.plan.levels()});
  }
  return nestedness(plans);
}

RhatComparison compare_rhat(const GridNetwork& network, const FloodScenarioSet& scenarios,
                            const CostSchedule& schedule, const LossWeights& weights, Budget budget,
                            const std::vector<int>& rhat_values, const lp::BnbConfig& config) {
  RhatComparison out;
  out.budget = budget.f;
  for (int rhat : rhat_values) {
    if (rhat < 2) throw std::invalid_argument("compare_rhat: rhat must be >= 2");
    const auto form = build_extensive_form(network, scenarios, schedule, budget, rhat, weights);
    lp::BnbConfig cfg = config;
    for (const auto& entry : portfolio(budget, network, scenarios, schedule, rhat))
      cfg.candidates.push_back(complete_solution(form, network, scenarios, entry.plan, weights));
    const auto sol = solve_extensive_form(form, cfg);
    RhatResult r;
    r.rhat = rhat;
    r.status = lp::to_string(sol.milp.status);
    if (sol.solved()) {
      r.objective = sol.objective;
      r.levels = sol.plan.levels();
    }
    out.results.push_back(std::move(r));
  }
  for (size_t i = 1; i < out.results.size(); ++i) {
    std::vector<int> diff;
    const auto& a = out.results.front().levels;
    const auto& b = out.results[i].levels;
    for (size_t k = 0; k < std::min(a.size(), b.size()); ++k) {
      if (a[k] != b[k]) diff.push_back(static_cast<int>(k));
    }
    out.differing.push_back(std::move(diff));
  }
  std::vector<RhatResult> sorted = out.results;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.rhat < b.rhat; });
  for (size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].objective > sorted[i - 1].objective + 1e-6) out.ordered = false;
  }
  return out;
}

}  // namespace floodsp
