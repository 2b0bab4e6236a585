#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "floodsp/lp.hpp"
#include "floodsp/simplex.hpp"

namespace floodsp::lp {

enum class Branching : std::uint8_t { kMostFractional, kPseudoCost };

/// Partial assignment of binary variables used to seed the incumbent.
using WarmStart = std::vector<std::pair<int, double>>;

/// One solver statistics record; emitted as a JSON line when a sink is set.
struct SolverEvent {
  std::string kind;  // "warm-start", "incumbent", "progress", "done"
  long nodes = 0;
  double incumbent = kInfinity;
  double bound = -kInfinity;
};

struct BnbConfig {
  double abs_gap = 0.0;
  double rel_gap = 0.0;
  double integrality_tol = 1e-6;
  long node_limit = 0;        // 0 = unlimited
  double time_limit_s = 0.0;  // 0 = unlimited; breaks determinism when hit
  Branching branching = Branching::kMostFractional;
  std::vector<WarmStart> warm_starts;
  /// Complete candidate solutions; each is accepted as an incumbent if it
  /// satisfies every row and bound within feasibility_tol and is integral.
  std::vector<std::vector<double>> candidates;
  double feasibility_tol = 1e-7;
  /// Starting basis for the root LP, e.g. the root basis of a model that
  /// differs only in right-hand sides. Ignored on dimension mismatch.
  std::optional<Basis> root_basis;
  LpOptions lp;
  std::function<void(const SolverEvent&)> log;
};

enum class MilpStatus : std::uint8_t { kOptimal, kGapLimit, kNodeLimit, kTimeLimit, kInfeasible, kError };

const char* to_string(MilpStatus status);

struct MilpSolution {
  MilpStatus status = MilpStatus::kError;
  std::vector<double> values;
  double objective = kInfinity;
  double bound = -kInfinity;
  long nodes = 0;
  long lp_iterations = 0;
  /// Objective of the best feasible warm start (infinity when none).
  double warm_start_objective = kInfinity;
  /// Optimal basis of the root relaxation (empty if the root failed).
  Basis root_basis;

  [[nodiscard]] bool has_incumbent() const { return !values.empty(); }
};

/// Best-bound branch-and-bound over the model's binary variables.
MilpSolution solve_milp(const Model& model, const BnbConfig& config = {});

/// Appends the no-good cut sum_{j in vars, x*_j = 0} x_j >= 1 and returns its row.
int add_no_good_cut(Model& model, std::span<const int> vars, std::span<const double> point);

struct UniquenessResult {
  bool unique = false;
  /// Optimal solution of the cut problem when it ties the original optimum.
  std::optional<std::vector<double>> witness;
  double cut_objective = kInfinity;
  MilpStatus cut_status = MilpStatus::kError;
};

/// Re-solves with the no-good cut over `vars` at `point`; unique iff the cut
/// problem is infeasible or its optimum exceeds `objective` by more than tol.
UniquenessResult check_uniqueness(const Model& model, std::span<const int> vars, std::span<const double> point,
                                  double objective, const BnbConfig& config, double tol = 1e-6);

}  // namespace floodsp::lp
