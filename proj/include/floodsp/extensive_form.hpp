#pragma once

#include <map>
#include <span>
#include <vector>

#include "floodsp/grid.hpp"
#include "floodsp/lp.hpp"
#include "floodsp/milp.hpp"
#include "floodsp/mitigation.hpp"
#include "floodsp/recourse.hpp"
#include "floodsp/scenario.hpp"

namespace floodsp {

struct ExtensiveOptions {
  /// Declare alpha/beta continuous in [0, 1]; binary x still forces them integral.
  bool relax_status = false;
  /// Bus index -> minimum expected served fraction.
  std::map<int, double> service_levels;
};

/// A status that is either a model column or a constant folded at build time.
struct StatusRef {
  int var = -1;
  int value = 0;

  [[nodiscard]] bool is_constant() const { return var < 0; }
};

struct ScenarioColumns {
  std::vector<StatusRef> alpha;  // per substation
  std::vector<StatusRef> beta;   // per branch
  RecourseIndex dispatch;        // -1 where folded away
};

struct ExtensiveForm {
  lp::Model model;
  int substations = 0;
  int rhat = 0;
  std::vector<int> x_vars;  // substation-major, levels 1..rhat
  std::vector<ScenarioColumns> scenarios;
  std::vector<double> big_m;  // per branch
  int binary_count = 0;
  int budget_row = -1;

  [[nodiscard]] int x_var(int k, int r) const { return x_vars[static_cast<size_t>(k * rhat + r - 1)]; }
};

/// Per-branch big-M constant |b| * 2 * theta_max + flow limit.
double branch_big_m(const Branch& branch, const AngleLimits& limits);

/// Rows linking a substation status column to the first stage:
///   alpha >= sum_r (1 - xi_r (1 - x_r)) - |R| + 1
///   alpha <= 1 - xi_r (1 - x_r)   for each r with xi_r = 1
/// with xi folded into the coefficients.
void append_alpha_rows(lp::Model& model, std::span<const int> x_vars, std::span<const int> xi, int alpha_var,
                       const std::string& tag);
/// beta >= a_n + a_m - 1, beta <= a_n, beta <= a_m, constants folded.
void append_beta_rows(lp::Model& model, StatusRef an, StatusRef am, int beta_var, const std::string& tag);

ExtensiveForm build_extensive_form(const GridNetwork& network, const FloodScenarioSet& scenarios,
                                   const CostSchedule& schedule, Budget budget, int rhat, const LossWeights& weights,
                                   const ExtensiveOptions& options = {});

/// Appends sum over x*_kr = 0 of x_kr >= 1.
int add_no_good_cut(ExtensiveForm& form, const MitigationPlan& plan);
/// Fixes every x column to the plan. Throws if the plan breaks the form's X.
void fix_first_stage(ExtensiveForm& form, const MitigationPlan& plan, const CostSchedule& schedule, Budget budget);

MitigationPlan extract_plan(const ExtensiveForm& form, std::span<const double> values);
std::vector<StatusVector> extract_statuses(const ExtensiveForm& form, const GridNetwork& network,
                                           std::span<const double> values);
lp::WarmStart warm_start(const ExtensiveForm& form, const MitigationPlan& plan);

/// Full column vector for a fixed plan: statuses from status_closure and
/// dispatch from the per-scenario recourse LPs (solved in parallel).
std::vector<double> complete_solution(const ExtensiveForm& form, const GridNetwork& network,
                                      const FloodScenarioSet& scenarios, const MitigationPlan& plan,
                                      const LossWeights& weights);

/// Changes the budget right-hand side in place.
void set_budget(ExtensiveForm& form, Budget budget);

struct ExtensiveSolution {
  lp::MilpSolution milp;
  MitigationPlan plan;
  double objective = lp::kInfinity;

  [[nodiscard]] bool solved() const { return milp.has_incumbent(); }
};

ExtensiveSolution solve_extensive_form(const ExtensiveForm& form, const lp::BnbConfig& config = {});

}  // namespace floodsp
