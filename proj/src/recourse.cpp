#include "floodsp/recourse.hpp"

#include <algorithm>
#include <stdexcept>

namespace floodsp {

void LossWeights::check() const {
  if (shed < 0.0 || over < 0.0) throw std::invalid_argument("loss weights must be nonnegative");
  if (shed == 0.0 && over == 0.0) throw std::invalid_argument("loss weights may not both be zero");
}

StatusVector status_closure(const GridNetwork& network, const MitigationPlan& plan, const FloodScenario& scenario) {
  if (plan.num_substations() != network.num_substations() ||
      static_cast<int>(scenario.levels.size()) != network.num_substations())
    throw std::invalid_argument("status_closure: dimension mismatch");
  std::vector<std::uint8_t> sub_alpha(static_cast<size_t>(network.num_substations()), 1);
  for (int k = 0; k < network.num_substations(); ++k) {
    for (int r = 1; r <= plan.rhat(); ++r) {
      if (scenario.flooded(k, r) && !plan.at(k, r)) sub_alpha[static_cast<size_t>(k)] = 0;
    }
  }
  StatusVector st;
  st.alpha.reserve(network.buses().size());
  for (const auto& b : network.buses()) st.alpha.push_back(sub_alpha[static_cast<size_t>(b.substation)]);
  st.beta.reserve(network.branches().size());
  for (const auto& br : network.branches()) {
    st.beta.push_back(st.alpha[static_cast<size_t>(br.from)] & st.alpha[static_cast<size_t>(br.to)]);
  }
  return st;
}

lp::Model recourse_model(const GridNetwork& network, const StatusVector& status, const LossWeights& weights,
                         RecourseIndex* index) {
  using lp::Sense;
  using lp::Term;
  const int n = network.num_buses();
  const int m = network.num_branches();
  if (static_cast<int>(status.alpha.size()) != n || static_cast<int>(status.beta.size()) != m)
    throw std::invalid_argument("recourse: status dimension mismatch");
  const auto& lim = network.angle_limits();
  const int ref = network.reference_bus();

  lp::Model model;
  RecourseIndex idx;
  idx.p_hat.assign(static_cast<size_t>(n), -1);
  idx.p_check.assign(static_cast<size_t>(n), -1);
  idx.delta.assign(static_cast<size_t>(n), -1);
  idx.theta.assign(static_cast<size_t>(n), -1);
  idx.flow.assign(static_cast<size_t>(m), -1);

  for (int i = 0; i < n; ++i) {
    const auto& b = network.buses()[static_cast<size_t>(i)];
    model.add_objective_offset(weights.shed * b.p_load);
    const auto u = static_cast<size_t>(i);
    const bool up = status.alpha[u] != 0;
    // Dead buses carry no dispatch; their whole load is shed.
    if (!up) continue;
    idx.p_hat[u] = model.add_variable("p_hat_" + b.id, b.p_gen_min, b.p_gen_max, 0.0);
    idx.p_check[u] = model.add_variable("p_check_" + b.id, 0.0, lp::kInfinity, weights.over);
    if (b.p_load > 0.0) idx.delta[u] = model.add_variable("delta_" + b.id, 0.0, 1.0, -weights.shed * b.p_load);
    const double th = i == ref ? 0.0 : lim.abs_max;
    idx.theta[u] = model.add_variable("theta_" + b.id, -th, th, 0.0);
    model.add_constraint("overgen_" + b.id, {{idx.p_check[u], 1.0}, {idx.p_hat[u], -1.0}}, Sense::kLessEqual, 0.0);
  }
  for (int e = 0; e < m; ++e) {
    if (!status.beta[static_cast<size_t>(e)]) continue;
    const auto& br = network.branches()[static_cast<size_t>(e)];
    const int f = idx.theta[static_cast<size_t>(br.from)];
    const int t = idx.theta[static_cast<size_t>(br.to)];
    const int p = model.add_variable("flow_" + br.id, -br.flow_limit, br.flow_limit, 0.0);
    idx.flow[static_cast<size_t>(e)] = p;
    model.add_constraint("ohm_" + br.id, {{p, 1.0}, {f, br.susceptance}, {t, -br.susceptance}}, Sense::kEqual, 0.0);
    model.add_constraint("dtheta_hi_" + br.id, {{f, 1.0}, {t, -1.0}}, Sense::kLessEqual, lim.diff_max);
    model.add_constraint("dtheta_lo_" + br.id, {{f, 1.0}, {t, -1.0}}, Sense::kGreaterEqual, -lim.diff_max);
  }
  for (int i = 0; i < n; ++i) {
    const auto u = static_cast<size_t>(i);
    if (!status.alpha[u]) continue;
    const auto& b = network.buses()[u];
    std::vector<Term> kcl{{idx.p_hat[u], 1.0}, {idx.p_check[u], -1.0}};
    if (idx.delta[u] >= 0) kcl.push_back({idx.delta[u], -b.p_load});
    for (int e : network.incident(i)) {
      const int p = idx.flow[static_cast<size_t>(e)];
      if (p < 0) continue;
      kcl.push_back({p, network.branches()[static_cast<size_t>(e)].to == i ? 1.0 : -1.0});
    }
    model.add_constraint("kcl_" + b.id, std::move(kcl), Sense::kEqual, 0.0);
  }
  if (index) *index = std::move(idx);
  return model;
}

RecourseResult solve_recourse_lp(const GridNetwork& network, const StatusVector& status, const LossWeights& weights) {
  RecourseIndex idx;
  const auto model = recourse_model(network, status, weights, &idx);
  const auto sol = lp::solve_lp(model);
  if (!sol.optimal()) throw std::runtime_error(std::string("recourse LP not solved: ") + lp::to_string(sol.status));
  RecourseResult out;
  out.loss = sol.objective;
  const auto n = static_cast<size_t>(network.num_buses());
  auto pick = [&](const std::vector<int>& cols, size_t count) {
    std::vector<double> v(count, 0.0);
    for (size_t i = 0; i < count; ++i) {
      if (cols[i] >= 0) v[i] = sol.x[static_cast<size_t>(cols[i])];
    }
    return v;
  };
  out.dispatch.p_hat = pick(idx.p_hat, n);
  out.dispatch.p_check = pick(idx.p_check, n);
  out.dispatch.delta = pick(idx.delta, n);
  out.dispatch.theta = pick(idx.theta, n);
  out.dispatch.p_flow = pick(idx.flow, static_cast<size_t>(network.num_branches()));
  // A dead load bus has no delta column; report it unserved.
  for (size_t i = 0; i < n; ++i) {
    const double load = network.buses()[i].p_load;
    if (idx.delta[i] < 0 && load == 0.0 && status.alpha[i]) out.dispatch.delta[i] = 1.0;
    out.served_load += load * out.dispatch.delta[i];
    out.overgeneration += out.dispatch.p_check[i];
  }
  return out;
}

namespace {

PlanEvaluation make_evaluation(const FloodScenarioSet& scenarios) {
  PlanEvaluation ev;
  ev.losses.assign(scenarios.scenarios.size(), 0.0);
  ev.served_load.assign(scenarios.scenarios.size(), 0.0);
  return ev;
}

void finish(PlanEvaluation& ev, const FloodScenarioSet& scenarios) {
  for (size_t w = 0; w < ev.losses.size(); ++w) ev.expected_loss += scenarios.scenarios[w].probability * ev.losses[w];
}

}  // namespace

PlanEvaluation evaluate_plan(const GridNetwork& network, const MitigationPlan& plan, const FloodScenarioSet& scenarios,
                             const LossWeights& weights) {
  auto ev = make_evaluation(scenarios);
  const long count = static_cast<long>(scenarios.scenarios.size());
  std::string error;
#pragma omp parallel for schedule(dynamic)
  for (long w = 0; w < count; ++w) {
    try {
      const auto st = status_closure(network, plan, scenarios.scenarios[static_cast<size_t>(w)]);
      const auto res = solve_recourse_lp(network, st, weights);
      ev.losses[static_cast<size_t>(w)] = res.loss;
      ev.served_load[static_cast<size_t>(w)] = res.served_load;
    } catch (const std::exception& e) {
#pragma omp critical(floodsp_eval_error)
      if (error.empty()) error = e.what();
    }
  }
  if (!error.empty()) throw std::runtime_error(error);
  finish(ev, scenarios);
  return ev;
}

PlanEvaluation evaluate_plan_serial(const GridNetwork& network, const MitigationPlan& plan,
                                    const FloodScenarioSet& scenarios, const LossWeights& weights) {
  auto ev = make_evaluation(scenarios);
  for (size_t w = 0; w < scenarios.scenarios.size(); ++w) {
    const auto st = status_closure(network, plan, scenarios.scenarios[w]);
    const auto res = solve_recourse_lp(network, st, weights);
    ev.losses[w] = res.loss;
    ev.served_load[w] = res.served_load;
  }
  finish(ev, scenarios);
  return ev;
}

}  // namespace floodsp
