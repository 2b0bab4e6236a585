#include "floodsp/extensive_form.hpp"

#include <cmath>
#include <stdexcept>

namespace floodsp {

using lp::Sense;
using lp::Term;

double branch_big_m(const Branch& branch, const AngleLimits& limits) {
  return std::abs(branch.susceptance) * 2.0 * limits.abs_max + branch.flow_limit;
}

void append_alpha_rows(lp::Model& model, std::span<const int> x_vars, std::span<const int> xi, int alpha_var,
                       const std::string& tag) {
  if (x_vars.size() != xi.size()) throw std::invalid_argument("alpha rows: dimension mismatch");
  std::vector<Term> lower{{alpha_var, 1.0}};
  int flooded = 0;
  for (size_t r = 0; r < xi.size(); ++r) {
    if (!xi[r]) continue;
    ++flooded;
    lower.push_back({x_vars[r], -1.0});
    model.add_constraint("a_ub_" + tag + "_" + std::to_string(r + 1), {{alpha_var, 1.0}, {x_vars[r], -1.0}},
                         Sense::kLessEqual, 0.0);
  }
  model.add_constraint("a_lb_" + tag, std::move(lower), Sense::kGreaterEqual, 1.0 - flooded);
}

void append_beta_rows(lp::Model& model, StatusRef an, StatusRef am, int beta_var, const std::string& tag) {
  std::vector<Term> lower{{beta_var, 1.0}};
  double rhs = -1.0;
  for (const auto& a : {an, am}) {
    if (a.is_constant()) {
      rhs += a.value;
      if (a.value == 0) model.add_constraint("b_ub_" + tag, {{beta_var, 1.0}}, Sense::kLessEqual, 0.0);
    } else {
      lower.push_back({a.var, -1.0});
      model.add_constraint("b_ub_" + tag + (a.var == an.var ? "_n" : "_m"), {{beta_var, 1.0}, {a.var, -1.0}},
                           Sense::kLessEqual, 0.0);
    }
  }
  model.add_constraint("b_lb_" + tag, std::move(lower), Sense::kGreaterEqual, rhs);
}

ExtensiveForm build_extensive_form(const GridNetwork& network, const FloodScenarioSet& scenarios,
                                   const CostSchedule& schedule, Budget budget, int rhat, const LossWeights& weights,
                                   const ExtensiveOptions& options) {
  const int K = network.num_substations();
  const int n = network.num_buses();
  const int m = network.num_branches();
  if (schedule.num_substations() != K) throw std::invalid_argument("extensive form: cost schedule does not match network");
  if (rhat < 1) throw std::invalid_argument("extensive form: rhat must be >= 1");
  if (budget.f < 0) throw std::invalid_argument("extensive form: negative budget");
  for (const auto& s : scenarios.scenarios) {
    if (static_cast<int>(s.levels.size()) != K) throw std::invalid_argument("extensive form: scenario does not cover every substation");
  }
  for (const auto& [bus, level] : options.service_levels) {
    if (bus < 0 || bus >= n) throw std::invalid_argument("service level: unknown bus");
    if (network.buses()[static_cast<size_t>(bus)].p_load <= 0.0)
      throw std::invalid_argument("service level on zero-load bus " + network.buses()[static_cast<size_t>(bus)].id);
    if (level < 0.0 || level > 1.0) throw std::invalid_argument("service level must lie in [0, 1]");
  }

  ExtensiveForm form;
  form.substations = K;
  form.rhat = rhat;
  auto& model = form.model;
  const auto& lim = network.angle_limits();
  const auto status_kind = options.relax_status ? lp::VarKind::kContinuous : lp::VarKind::kBinary;

  // First stage.
  std::vector<Term> budget_row;
  for (int k = 0; k < K; ++k) {
    const auto& sid = network.substations()[static_cast<size_t>(k)].id;
    for (int r = 1; r <= rhat; ++r) {
      const int v = model.add_binary("x_" + sid + "_" + std::to_string(r));
      if (r == rhat) model.set_bounds(v, 0.0, 0.0);
      form.x_vars.push_back(v);
      budget_row.push_back({v, static_cast<double>(schedule.marginal(k, r))});
      if (r > 1) model.add_constraint("cum_" + sid + "_" + std::to_string(r), {{v, 1.0}, {v - 1, -1.0}}, Sense::kLessEqual, 0.0);
    }
  }
  form.budget_row = model.add_constraint("budget", std::move(budget_row), Sense::kLessEqual, budget.f);
  form.binary_count = K * rhat;

  for (const auto& br : network.branches()) form.big_m.push_back(branch_big_m(br, lim));

  const int ref = network.reference_bus();
  std::map<int, std::vector<Term>> service_rows;
  for (int w = 0; w < scenarios.size(); ++w) {
    const auto& sc = scenarios.scenarios[static_cast<size_t>(w)];
    const double pr = sc.probability;
    const std::string pre = "w" + std::to_string(w + 1) + "_";
    ScenarioColumns cols;

    for (int k = 0; k < K; ++k) {
      const int level = sc.levels[static_cast<size_t>(k)];
      const auto& sid = network.substations()[static_cast<size_t>(k)].id;
      if (level == 0) {
        cols.alpha.push_back({-1, 1});
      } else if (level >= rhat) {
        cols.alpha.push_back({-1, 0});
      } else {
        const int a = model.add_variable(pre + "alpha_" + sid, 0.0, 1.0, 0.0, status_kind);
        if (status_kind == lp::VarKind::kBinary) ++form.binary_count;
        std::vector<int> xi(static_cast<size_t>(rhat), 0);
        for (int r = 1; r <= std::min(level, rhat); ++r) xi[static_cast<size_t>(r - 1)] = 1;
        append_alpha_rows(model, std::span<const int>(form.x_vars).subspan(static_cast<size_t>(k * rhat), static_cast<size_t>(rhat)),
                          xi, a, pre + sid);
        cols.alpha.push_back({a, 0});
      }
    }
    auto bus_status = [&](int bus) { return cols.alpha[static_cast<size_t>(network.buses()[static_cast<size_t>(bus)].substation)]; };

    for (int e = 0; e < m; ++e) {
      const auto& br = network.branches()[static_cast<size_t>(e)];
      const StatusRef an = bus_status(br.from), am = bus_status(br.to);
      if ((an.is_constant() && an.value == 0) || (am.is_constant() && am.value == 0)) {
        cols.beta.push_back({-1, 0});
      } else if (an.is_constant() && am.is_constant()) {
        cols.beta.push_back({-1, 1});
      } else if (an.var == am.var) {
        cols.beta.push_back(an);
      } else {
        const int b = model.add_variable(pre + "beta_" + br.id, 0.0, 1.0, 0.0, status_kind);
        if (status_kind == lp::VarKind::kBinary) ++form.binary_count;
        append_beta_rows(model, an, am, b, pre + br.id);
        cols.beta.push_back({b, 0});
      }
    }

    auto& d = cols.dispatch;
    d.p_hat.assign(static_cast<size_t>(n), -1);
    d.p_check.assign(static_cast<size_t>(n), -1);
    d.delta.assign(static_cast<size_t>(n), -1);
    d.theta.assign(static_cast<size_t>(n), -1);
    d.flow.assign(static_cast<size_t>(m), -1);
    for (int i = 0; i < n; ++i) {
      const auto& bus = network.buses()[static_cast<size_t>(i)];
      const auto u = static_cast<size_t>(i);
      model.add_objective_offset(pr * weights.shed * bus.p_load);
      const StatusRef a = bus_status(i);
      if (a.is_constant() && a.value == 0) continue;
      const std::string name = pre + bus.id;
      if (a.is_constant()) {
        d.p_hat[u] = model.add_variable("p_hat_" + name, bus.p_gen_min, bus.p_gen_max, 0.0);
      } else {
        d.p_hat[u] = model.add_variable("p_hat_" + name, std::min(bus.p_gen_min, 0.0), std::max(bus.p_gen_max, 0.0), 0.0);
        model.add_constraint("gen_ub_" + name, {{d.p_hat[u], 1.0}, {a.var, -bus.p_gen_max}}, Sense::kLessEqual, 0.0);
        model.add_constraint("gen_lb_" + name, {{d.p_hat[u], 1.0}, {a.var, -bus.p_gen_min}}, Sense::kGreaterEqual, 0.0);
      }
      d.p_check[u] = model.add_variable("p_check_" + name, 0.0, lp::kInfinity, pr * weights.over);
      model.add_constraint("overgen_" + name, {{d.p_check[u], 1.0}, {d.p_hat[u], -1.0}}, Sense::kLessEqual, 0.0);
      if (bus.p_load > 0.0) {
        d.delta[u] = model.add_variable("delta_" + name, 0.0, 1.0, -pr * weights.shed * bus.p_load);
        if (!a.is_constant()) model.add_constraint("served_" + name, {{d.delta[u], 1.0}, {a.var, -1.0}}, Sense::kLessEqual, 0.0);
      }
      const double th = i == ref ? 0.0 : lim.abs_max;
      d.theta[u] = model.add_variable("theta_" + name, -th, th, 0.0);
    }

    for (int e = 0; e < m; ++e) {
      const auto& br = network.branches()[static_cast<size_t>(e)];
      const StatusRef b = cols.beta[static_cast<size_t>(e)];
      if (b.is_constant() && b.value == 0) continue;
      const std::string name = pre + br.id;
      const int tn = d.theta[static_cast<size_t>(br.from)], tm = d.theta[static_cast<size_t>(br.to)];
      const int p = model.add_variable("flow_" + name, -br.flow_limit, br.flow_limit, 0.0);
      d.flow[static_cast<size_t>(e)] = p;
      if (b.is_constant()) {
        model.add_constraint("ohm_" + name, {{p, 1.0}, {tn, br.susceptance}, {tm, -br.susceptance}}, Sense::kEqual, 0.0);
        model.add_constraint("dth_hi_" + name, {{tn, 1.0}, {tm, -1.0}}, Sense::kLessEqual, lim.diff_max);
        model.add_constraint("dth_lo_" + name, {{tn, 1.0}, {tm, -1.0}}, Sense::kGreaterEqual, -lim.diff_max);
        continue;
      }
      const double M = form.big_m[static_cast<size_t>(e)];
      const double slack = 2.0 * lim.abs_max - lim.diff_max;
      model.add_constraint("flow_ub_" + name, {{p, 1.0}, {b.var, -br.flow_limit}}, Sense::kLessEqual, 0.0);
      model.add_constraint("flow_lb_" + name, {{p, 1.0}, {b.var, br.flow_limit}}, Sense::kGreaterEqual, 0.0);
      model.add_constraint("ohm_lo_" + name, {{p, -1.0}, {tn, -br.susceptance}, {tm, br.susceptance}, {b.var, -M}},
                           Sense::kGreaterEqual, -M);
      model.add_constraint("ohm_hi_" + name, {{p, -1.0}, {tn, -br.susceptance}, {tm, br.susceptance}, {b.var, M}},
                           Sense::kLessEqual, M);
      model.add_constraint("dth_hi_" + name, {{tn, 1.0}, {tm, -1.0}, {b.var, slack}}, Sense::kLessEqual, 2.0 * lim.abs_max);
      model.add_constraint("dth_lo_" + name, {{tn, 1.0}, {tm, -1.0}, {b.var, -slack}}, Sense::kGreaterEqual, -2.0 * lim.abs_max);
    }

    for (int i = 0; i < n; ++i) {
      const auto u = static_cast<size_t>(i);
      if (d.p_hat[u] < 0) continue;
      const auto& bus = network.buses()[u];
      std::vector<Term> kcl{{d.p_hat[u], 1.0}, {d.p_check[u], -1.0}};
      if (d.delta[u] >= 0) kcl.push_back({d.delta[u], -bus.p_load});
      for (int e : network.incident(i)) {
        const int p = d.flow[static_cast<size_t>(e)];
        if (p >= 0) kcl.push_back({p, network.branches()[static_cast<size_t>(e)].to == i ? 1.0 : -1.0});
      }
      model.add_constraint("kcl_" + pre + bus.id, std::move(kcl), Sense::kEqual, 0.0);
      if (options.service_levels.count(i) && d.delta[u] >= 0) service_rows[i].push_back({d.delta[u], pr});
    }
    form.scenarios.push_back(std::move(cols));
  }

  for (const auto& [bus, level] : options.service_levels) {
    model.add_constraint("service_" + network.buses()[static_cast<size_t>(bus)].id, service_rows[bus], Sense::kGreaterEqual, level);
  }
  return form;
}

int add_no_good_cut(ExtensiveForm& form, const MitigationPlan& plan) {
  if (plan.num_substations() != form.substations || plan.rhat() != form.rhat)
    throw std::invalid_argument("no-good cut: plan dimension mismatch");
  std::vector<double> point;
  for (int k = 0; k < form.substations; ++k) {
    for (int r = 1; r <= form.rhat; ++r) point.push_back(plan.at(k, r) ? 1.0 : 0.0);
  }
  return lp::add_no_good_cut(form.model, form.x_vars, point);
}

void fix_first_stage(ExtensiveForm& form, const MitigationPlan& plan, const CostSchedule& schedule, Budget budget) {
  if (plan.num_substations() != form.substations || plan.rhat() != form.rhat)
    throw std::invalid_argument("fix_first_stage: plan dimension mismatch");
  if (!is_feasible(plan, schedule, budget, form.rhat)) throw std::invalid_argument("fix_first_stage: plan is infeasible");
  for (int k = 0; k < form.substations; ++k) {
    for (int r = 1; r <= form.rhat; ++r) {
      const double v = plan.at(k, r) ? 1.0 : 0.0;
      form.model.set_bounds(form.x_var(k, r), v, v);
    }
  }
}

MitigationPlan extract_plan(const ExtensiveForm& form, std::span<const double> values) {
  MitigationPlan plan(form.substations, form.rhat);
  for (int k = 0; k < form.substations; ++k) {
    for (int r = 1; r <= form.rhat; ++r) plan.set(k, r, values[static_cast<size_t>(form.x_var(k, r))] > 0.5);
  }
  return plan;
}

std::vector<StatusVector> extract_statuses(const ExtensiveForm& form, const GridNetwork& network,
                                           std::span<const double> values) {
  auto read = [&](StatusRef s) -> std::uint8_t {
    return s.is_constant() ? static_cast<std::uint8_t>(s.value) : (values[static_cast<size_t>(s.var)] > 0.5 ? 1 : 0);
  };
  std::vector<StatusVector> out;
  for (const auto& cols : form.scenarios) {
    StatusVector st;
    for (const auto& b : network.buses()) st.alpha.push_back(read(cols.alpha[static_cast<size_t>(b.substation)]));
    for (const auto& s : cols.beta) st.beta.push_back(read(s));
    out.push_back(std::move(st));
  }
  return out;
}

lp::WarmStart warm_start(const ExtensiveForm& form, const MitigationPlan& plan) {
  lp::WarmStart ws;
  for (int k = 0; k < form.substations; ++k) {
    for (int r = 1; r <= form.rhat; ++r) ws.emplace_back(form.x_var(k, r), plan.at(k, r) ? 1.0 : 0.0);
  }
  return ws;
}

std::vector<double> complete_solution(const ExtensiveForm& form, const GridNetwork& network,
                                      const FloodScenarioSet& scenarios, const MitigationPlan& plan,
                                      const LossWeights& weights) {
  if (plan.num_substations() != form.substations || plan.rhat() != form.rhat)
    throw std::invalid_argument("complete_solution: plan dimension mismatch");
  if (static_cast<int>(form.scenarios.size()) != scenarios.size())
    throw std::invalid_argument("complete_solution: scenario count mismatch");
  std::vector<double> v(static_cast<size_t>(form.model.num_variables()), 0.0);
  for (int k = 0; k < form.substations; ++k) {
    for (int r = 1; r <= form.rhat; ++r) v[static_cast<size_t>(form.x_var(k, r))] = plan.at(k, r) ? 1.0 : 0.0;
  }
  const long count = scenarios.size();
  std::string error;
#pragma omp parallel for schedule(dynamic)
  for (long w = 0; w < count; ++w) {
    try {
      const auto& cols = form.scenarios[static_cast<size_t>(w)];
      const auto st = status_closure(network, plan, scenarios.scenarios[static_cast<size_t>(w)]);
      for (int k = 0; k < form.substations; ++k) {
        const auto a = cols.alpha[static_cast<size_t>(k)];
        if (a.is_constant()) continue;
        const auto& buses = network.substations()[static_cast<size_t>(k)].buses;
        v[static_cast<size_t>(a.var)] = st.alpha[static_cast<size_t>(buses.front())];
      }
      for (size_t e = 0; e < cols.beta.size(); ++e) {
        if (!cols.beta[e].is_constant()) v[static_cast<size_t>(cols.beta[e].var)] = st.beta[e];
      }
      const auto res = solve_recourse_lp(network, st, weights);
      auto put = [&](const std::vector<int>& idx, const std::vector<double>& val) {
        for (size_t i = 0; i < idx.size(); ++i) {
          if (idx[i] >= 0) v[static_cast<size_t>(idx[i])] = val[i];
        }
      };
      put(cols.dispatch.p_hat, res.dispatch.p_hat);
      put(cols.dispatch.p_check, res.dispatch.p_check);
      put(cols.dispatch.delta, res.dispatch.delta);
      put(cols.dispatch.theta, res.dispatch.theta);
      put(cols.dispatch.flow, res.dispatch.p_flow);
    } catch (const std::exception& e) {
#pragma omp critical(floodsp_complete_error)
      if (error.empty()) error = e.what();
    }
  }
  if (!error.empty()) throw std::runtime_error(error);
  return v;
}

void set_budget(ExtensiveForm& form, Budget budget) {
  if (budget.f < 0) throw std::invalid_argument("negative budget");
  form.model.set_rhs(form.budget_row, budget.f);
}

ExtensiveSolution solve_extensive_form(const ExtensiveForm& form, const lp::BnbConfig& config) {
  ExtensiveSolution out;
  out.milp = lp::solve_milp(form.model, config);
  if (out.milp.has_incumbent()) {
    out.plan = extract_plan(form, out.milp.values);
    out.objective = out.milp.objective;
  }
  return out;
}

}  // namespace floodsp
