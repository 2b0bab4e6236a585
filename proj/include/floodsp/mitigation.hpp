#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <json.hpp>

#include "floodsp/grid.hpp"
#include "floodsp/scenario.hpp"

namespace floodsp {

/// Barrier segments per level increment: 1, 2, 3 for 115/161, 230, 500 kV.
int base_units(VoltageClass v);

/// Marginal cost c_kr = base_units[k] * r.
class CostSchedule {
 public:
  CostSchedule() = default;
  explicit CostSchedule(std::vector<int> base_units);
  static CostSchedule from_network(const GridNetwork& network);

  [[nodiscard]] int num_substations() const { return static_cast<int>(base_.size()); }
  [[nodiscard]] int base(int k) const { return base_[static_cast<size_t>(k)]; }
  [[nodiscard]] int marginal(int k, int r) const { return base(k) * r; }
  /// Cost of raising substation k from level 0 to `level`.
  [[nodiscard]] int cost_to_level(int k, int level) const { return base(k) * level * (level + 1) / 2; }

 private:
  std::vector<int> base_;
};

/// Cumulative first-stage decision x_kr for r = 1..rhat, row-major.
class MitigationPlan {
 public:
  MitigationPlan() = default;
  MitigationPlan(int substations, int rhat);
  /// Expands levels into the cumulative x matrix. Levels may not exceed rhat.
  static MitigationPlan from_levels(std::span<const int> levels, int rhat);

  [[nodiscard]] int num_substations() const { return substations_; }
  [[nodiscard]] int rhat() const { return rhat_; }
  /// r is 1-based.
  [[nodiscard]] bool at(int k, int r) const { return x_[index(k, r)] != 0; }
  void set(int k, int r, bool value) { x_[index(k, r)] = value ? 1 : 0; }
  /// Number of leading ones in row k (the protected flood level).
  [[nodiscard]] int level(int k) const;
  void set_level(int k, int level);
  [[nodiscard]] std::vector<int> levels() const;
  [[nodiscard]] const std::vector<std::uint8_t>& raw() const { return x_; }
  /// Elementwise x >= other.
  [[nodiscard]] bool covers(const MitigationPlan& other) const;

  bool operator==(const MitigationPlan&) const = default;

 private:
  [[nodiscard]] size_t index(int k, int r) const;
  int substations_ = 0;
  int rhat_ = 0;
  std::vector<std::uint8_t> x_;
};

struct Budget {
  int f = 0;
};

/// Cumulative rows, x_k,rhat = 0, and cost <= f. Throws on dimension mismatch.
bool is_feasible(const MitigationPlan& plan, const CostSchedule& schedule, Budget budget, int rhat);
int plan_cost(const MitigationPlan& plan, const CostSchedule& schedule);

/// Budget beyond which no further flooding can be prevented.
int max_useful_budget(const GridNetwork& network, const FloodScenarioSet& scenarios, const CostSchedule& schedule,
                      int rhat);

/// Every feasible plan supported on `subset` (other substations stay at 0),
/// each exactly once, in lexicographic order of the subset's levels.
class PlanEnumerator {
 public:
  static constexpr double kGuard = 1e7;

  PlanEnumerator(const CostSchedule& schedule, Budget budget, int rhat, std::vector<int> subset);
  bool next(MitigationPlan& out);

 private:
  const CostSchedule* schedule_;
  Budget budget_;
  int rhat_;
  std::vector<int> subset_;
  std::vector<int> levels_;
  bool started_ = false;
  bool done_ = false;
};

std::vector<MitigationPlan> enumerate_plans(const CostSchedule& schedule, Budget budget, int rhat,
                                            std::vector<int> subset);

/// {"levels": {substation: level}}; missing substations are unprotected.
nlohmann::json plan_to_json(const MitigationPlan& plan, const GridNetwork& network);
MitigationPlan plan_from_json(const nlohmann::json& doc, const GridNetwork& network, int rhat);
MitigationPlan load_plan(const std::filesystem::path& path, const GridNetwork& network, int rhat);

}  // namespace floodsp
