#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace floodsp::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class VarKind : std::uint8_t { kContinuous, kBinary };
enum class Sense : std::uint8_t { kLessEqual, kGreaterEqual, kEqual };

struct Term {
  int var = -1;
  double coef = 0.0;
};

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInfinity;
  double cost = 0.0;
  VarKind kind = VarKind::kContinuous;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
};

/// A linear (mixed-binary) minimization problem: min c'x + offset subject to
/// rows a'x {<=,>=,=} rhs and variable bounds. Binaries carry bounds inside
/// [0, 1]; a fixed binary simply has equal bounds.
class Model {
 public:
  int add_variable(std::string name, double lower, double upper, double cost,
                   VarKind kind = VarKind::kContinuous);
  int add_binary(std::string name, double cost = 0.0);

  /// Duplicate variable indices in `terms` are merged; zero coefficients dropped.
  int add_constraint(std::string name, std::vector<Term> terms, Sense sense, double rhs);

  void set_bounds(int var, double lower, double upper);
  void set_cost(int var, double cost);
  void set_rhs(int row, double rhs);
  void add_objective_offset(double delta) { offset_ += delta; }

  [[nodiscard]] const std::vector<Variable>& variables() const { return vars_; }
  [[nodiscard]] const std::vector<Constraint>& constraints() const { return rows_; }
  [[nodiscard]] const Variable& variable(int j) const { return vars_.at(static_cast<size_t>(j)); }
  [[nodiscard]] double objective_offset() const { return offset_; }
  [[nodiscard]] int num_variables() const { return static_cast<int>(vars_.size()); }
  [[nodiscard]] int num_constraints() const { return static_cast<int>(rows_.size()); }
  [[nodiscard]] std::vector<int> binaries() const;

  [[nodiscard]] double objective_value(std::span<const double> x) const;
  /// Largest bound or row violation of `x` (0 when feasible).
  [[nodiscard]] double max_violation(std::span<const double> x) const;

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
  double offset_ = 0.0;
};

enum class LpStatus : std::uint8_t {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kIterationLimit,
  kNumericalFailure,
};

const char* to_string(LpStatus status);

struct LpOptions {
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-7;
  long iteration_limit = 0;  // 0 = automatic
  int refactor_interval = 64;
  int degenerate_streak = 40;  // switch to Bland's rule after this many
  double duality_tol = 1e-6;
  /// Relative cost perturbation used by the dual phase against degeneracy (0 disables).
  double cost_perturbation = 1e-6;
};

struct LpSolution {
  LpStatus status = LpStatus::kNumericalFailure;
  std::vector<double> x;
  std::vector<double> row_duals;
  std::vector<double> reduced_costs;
  double objective = 0.0;
  /// Lagrangian dual value recomputed from `row_duals` alone.
  double dual_objective = 0.0;
  double primal_residual = 0.0;
  long iterations = 0;

  [[nodiscard]] bool optimal() const { return status == LpStatus::kOptimal; }
  [[nodiscard]] double duality_gap() const;
};

/// Solves the continuous relaxation (integrality ignored, bounds kept).
LpSolution solve_lp(const Model& model, const LpOptions& options = {});

/// Process-wide record of every optimal LP solve: count and worst
/// |primal - dual| objective gap.
struct DualityAudit {
  long solves = 0;
  double max_gap = 0.0;
};
DualityAudit duality_audit();
void reset_duality_audit();

/// CPLEX LP-format text: Minimize / Subject To / Bounds / Binaries / End.
void write_lp_format(const Model& model, std::ostream& out);

}  // namespace floodsp::lp
