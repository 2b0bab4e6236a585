#include "floodsp/mitigation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace floodsp {

using nlohmann::json;

int base_units(VoltageClass v) {
  switch (v) {
    case VoltageClass::kV115_161: return 1;
    case VoltageClass::kV230: return 2;
    case VoltageClass::kV500: return 3;
  }
  return 1;
}

CostSchedule::CostSchedule(std::vector<int> base_units) : base_(std::move(base_units)) {
  for (int b : base_) {
    if (b < 1) throw std::invalid_argument("cost schedule: base units must be >= 1");
  }
}

CostSchedule CostSchedule::from_network(const GridNetwork& network) {
  std::vector<int> base;
  for (const auto& s : network.substations()) base.push_back(base_units(s.voltage));
  return CostSchedule(std::move(base));
}

MitigationPlan::MitigationPlan(int substations, int rhat)
    : substations_(substations), rhat_(rhat), x_(static_cast<size_t>(substations) * static_cast<size_t>(rhat), 0) {
  if (substations < 0 || rhat < 1) throw std::invalid_argument("plan: invalid dimensions");
}

MitigationPlan MitigationPlan::from_levels(std::span<const int> levels, int rhat) {
  MitigationPlan plan(static_cast<int>(levels.size()), rhat);
  for (int k = 0; k < plan.num_substations(); ++k) plan.set_level(k, levels[static_cast<size_t>(k)]);
  return plan;
}

size_t MitigationPlan::index(int k, int r) const {
  if (k < 0 || k >= substations_ || r < 1 || r > rhat_) throw std::out_of_range("plan: index out of range");
  return static_cast<size_t>(k) * static_cast<size_t>(rhat_) + static_cast<size_t>(r - 1);
}

int MitigationPlan::level(int k) const {
  int r = 0;
  while (r < rhat_ && at(k, r + 1)) ++r;
  return r;
}

void MitigationPlan::set_level(int k, int level) {
  if (level < 0 || level > rhat_) throw std::invalid_argument("plan: level outside [0, rhat]");
  for (int r = 1; r <= rhat_; ++r) set(k, r, r <= level);
}

std::vector<int> MitigationPlan::levels() const {
  std::vector<int> out;
  for (int k = 0; k < substations_; ++k) out.push_back(level(k));
  return out;
}

bool MitigationPlan::covers(const MitigationPlan& other) const {
  if (other.substations_ != substations_ || other.rhat_ != rhat_) throw std::invalid_argument("plan: dimension mismatch");
  for (size_t i = 0; i < x_.size(); ++i) {
    if (x_[i] < other.x_[i]) return false;
  }
  return true;
}

namespace {

void check_dims(const MitigationPlan& plan, const CostSchedule& schedule) {
  if (plan.num_substations() != schedule.num_substations()) throw std::invalid_argument("plan and cost schedule dimensions differ");
}

}  // namespace

int plan_cost(const MitigationPlan& plan, const CostSchedule& schedule) {
  check_dims(plan, schedule);
  int cost = 0;
  for (int k = 0; k < plan.num_substations(); ++k) {
    for (int r = 1; r <= plan.rhat(); ++r) {
      if (plan.at(k, r)) cost += schedule.marginal(k, r);
    }
  }
  return cost;
}

bool is_feasible(const MitigationPlan& plan, const CostSchedule& schedule, Budget budget, int rhat) {
  check_dims(plan, schedule);
  if (plan.rhat() != rhat) throw std::invalid_argument("plan level dimension differs from rhat");
  for (int k = 0; k < plan.num_substations(); ++k) {
    for (int r = 1; r < rhat; ++r) {
      if (plan.at(k, r + 1) && !plan.at(k, r)) return false;
    }
    if (plan.at(k, rhat)) return false;
  }
  return plan_cost(plan, schedule) <= budget.f;
}

int max_useful_budget(const GridNetwork& network, const FloodScenarioSet& scenarios, const CostSchedule& schedule,
                      int rhat) {
  int total = 0;
  for (int k = 0; k < network.num_substations(); ++k) {
    int worst = 0;
    for (const auto& s : scenarios.scenarios) {
      const int level = s.levels[static_cast<size_t>(k)];
      if (level < rhat) worst = std::max(worst, level);
    }
    total += schedule.cost_to_level(k, std::min(worst, rhat - 1));
  }
  return total;
}

PlanEnumerator::PlanEnumerator(const CostSchedule& schedule, Budget budget, int rhat, std::vector<int> subset)
    : schedule_(&schedule), budget_(budget), rhat_(rhat), subset_(std::move(subset)), levels_(subset_.size(), 0) {
  if (rhat < 1) throw std::invalid_argument("enumerate_plans: rhat must be >= 1");
  for (int k : subset_) {
    if (k < 0 || k >= schedule.num_substations()) throw std::out_of_range("enumerate_plans: substation out of range");
  }
  if (std::pow(static_cast<double>(rhat), static_cast<double>(subset_.size())) > kGuard)
    throw std::length_error("enumerate_plans: rhat^|subset| exceeds the enumeration guard");
}

bool PlanEnumerator::next(MitigationPlan& out) {
  if (done_) return false;
  auto cost = [&] {
    int c = 0;
    for (size_t i = 0; i < subset_.size(); ++i) c += schedule_->cost_to_level(subset_[i], levels_[i]);
    return c;
  };
  // Odometer over levels 0..rhat-1, last subset entry fastest.
  auto advance = [&] {
    for (size_t i = subset_.size(); i-- > 0;) {
      if (++levels_[i] < rhat_) return true;
      levels_[i] = 0;
    }
    return false;
  };
  if (started_ && !advance()) {
    done_ = true;
    return false;
  }
  started_ = true;
  while (cost() > budget_.f) {
    if (!advance()) {
      done_ = true;
      return false;
    }
  }
  out = MitigationPlan(schedule_->num_substations(), rhat_);
  for (size_t i = 0; i < subset_.size(); ++i) out.set_level(subset_[i], levels_[i]);
  return true;
}

std::vector<MitigationPlan> enumerate_plans(const CostSchedule& schedule, Budget budget, int rhat,
                                            std::vector<int> subset) {
  PlanEnumerator it(schedule, budget, rhat, std::move(subset));
  std::vector<MitigationPlan> out;
  MitigationPlan plan;
  while (it.next(plan)) out.push_back(plan);
  return out;
}

json plan_to_json(const MitigationPlan& plan, const GridNetwork& network) {
  json levels = json::object();
  for (int k = 0; k < plan.num_substations(); ++k) {
    if (plan.level(k) > 0) levels[network.substations()[static_cast<size_t>(k)].id] = plan.level(k);
  }
  return json{{"levels", std::move(levels)}};
}

MitigationPlan plan_from_json(const json& doc, const GridNetwork& network, int rhat) {
  for (const auto& [key, value] : doc.items()) {
    if (key != "levels") throw std::invalid_argument("plan: unknown key '" + key + "'");
  }
  std::vector<int> levels(static_cast<size_t>(network.num_substations()), 0);
  for (const auto& [sub, level] : doc.at("levels").items()) {
    const auto k = network.find_substation(sub);
    if (!k) throw std::invalid_argument("plan: unknown substation '" + sub + "'");
    const int v = level.get<int>();
    if (v < 0 || v >= rhat) throw std::invalid_argument("plan: level for " + sub + " must lie in [0, rhat - 1]");
    levels[static_cast<size_t>(*k)] = v;
  }
  return MitigationPlan::from_levels(levels, rhat);
}

MitigationPlan load_plan(const std::filesystem::path& path, const GridNetwork& network, int rhat) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open plan file " + path.string());
  return plan_from_json(json::parse(in), network, rhat);
}

}  // namespace floodsp
