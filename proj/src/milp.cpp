#include "floodsp/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "floodsp/simplex.hpp"

namespace floodsp::lp {

const char* to_string(MilpStatus status) {
  switch (status) {
    case MilpStatus::kOptimal: return "optimal";
    case MilpStatus::kGapLimit: return "gap-limit";
    case MilpStatus::kNodeLimit: return "node-limit";
    case MilpStatus::kTimeLimit: return "time-limit";
    case MilpStatus::kInfeasible: return "infeasible";
    case MilpStatus::kError: return "error";
  }
  return "unknown";
}

namespace {

struct Node {
  double bound = -kInfinity;
  long id = 0;
  std::vector<std::pair<int, double>> fixes;
  Basis basis;
  int branch_var = -1;
  double branch_frac = 0.0;
  bool branch_up = false;
  double parent_obj = -kInfinity;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

class PseudoCosts {
 public:
  explicit PseudoCosts(int n) : down_(static_cast<size_t>(n), 0.0), up_(static_cast<size_t>(n), 0.0),
                                 down_n_(static_cast<size_t>(n), 0), up_n_(static_cast<size_t>(n), 0) {}

  void record(int var, bool up, double frac, double gain) {
    const double unit = gain / std::max(frac, 1e-9);
    const auto j = static_cast<size_t>(var);
    if (up) {
      up_[j] += unit;
      ++up_n_[j];
    } else {
      down_[j] += unit;
      ++down_n_[j];
    }
  }

  // Product score; -1 when either side is still unobserved.
  [[nodiscard]] double score(int var, double value) const {
    const auto j = static_cast<size_t>(var);
    if (down_n_[j] == 0 || up_n_[j] == 0) return -1.0;
    const double f = value - std::floor(value);
    const double dn = down_[j] / down_n_[j] * f;
    const double upc = up_[j] / up_n_[j] * (1.0 - f);
    return std::max(dn, 1e-6) * std::max(upc, 1e-6);
  }

 private:
  std::vector<double> down_, up_;
  std::vector<int> down_n_, up_n_;
};

}  // namespace

MilpSolution solve_milp(const Model& model, const BnbConfig& config) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  SimplexEngine engine(model, config.lp);
  const auto bins = model.binaries();
  const double itol = config.integrality_tol;
  MilpSolution result;
  PseudoCosts pseudo(model.num_variables());

  auto emit = [&](const char* kind, double bound) {
    if (config.log) config.log(SolverEvent{kind, result.nodes, result.objective, bound});
  };

  auto gap_allowance = [&](double incumbent) {
    return std::max({config.abs_gap, config.rel_gap * std::abs(incumbent), 1e-9});
  };

  // Returns the branching column or -1 when every binary is integral.
  auto choose_branch = [&](std::span<const double> v) {
    int pick = -1;
    double best = -1.0;
    bool pseudo_seen = false;
    for (int j : bins) {
      const double val = v[static_cast<size_t>(j)];
      const double frac = std::abs(val - std::round(val));
      if (frac <= itol) continue;
      double score = 0.5 - std::abs(0.5 - (val - std::floor(val)));
      if (config.branching == Branching::kPseudoCost) {
        const double ps = pseudo.score(j, val);
        if (ps >= 0.0) {
          if (!pseudo_seen) best = -1.0;
          pseudo_seen = true;
          score = ps;
        } else if (pseudo_seen) {
          continue;
        }
      }
      if (score > best + 1e-12) {
        best = score;
        pick = j;
      }
    }
    return pick;
  };

  auto accept = [&](double obj, std::span<const double> v) {
    if (obj < result.objective) {
      result.objective = obj;
      result.values.assign(v.begin(), v.end());
      for (int j : bins) result.values[static_cast<size_t>(j)] = std::round(result.values[static_cast<size_t>(j)]);
      return true;
    }
    return false;
  };

  const auto basis_size = static_cast<size_t>(model.num_variables() + model.num_constraints());
  if (config.root_basis && config.root_basis->status.size() == basis_size) engine.set_basis(*config.root_basis);
  const Basis root_start = engine.basis();

  for (const auto& cand : config.candidates) {
    if (cand.size() != static_cast<size_t>(model.num_variables())) continue;
    if (model.max_violation(cand) > config.feasibility_tol) continue;
    if (choose_branch(cand) >= 0) continue;
    const double obj = model.objective_value(cand);
    result.warm_start_objective = std::min(result.warm_start_objective, obj);
    if (accept(obj, cand)) emit("warm-start", -kInfinity);
  }

  for (const auto& ws : config.warm_starts) {
    engine.reset_bounds();
    bool valid = true;
    for (const auto& [var, value] : ws) {
      if (var < 0 || var >= model.num_variables()) {
        valid = false;
        break;
      }
      const double v = std::round(value);
      if (v < model.variable(var).lower - itol || v > model.variable(var).upper + itol) {
        valid = false;
        break;
      }
      engine.set_bounds(var, v, v);
    }
    if (!valid) continue;
    if (engine.solve() != LpStatus::kOptimal) continue;
    const auto v = engine.values();
    if (choose_branch(v) >= 0) continue;
    const double obj = engine.objective();
    result.warm_start_objective = std::min(result.warm_start_objective, obj);
    if (accept(obj, v)) emit("warm-start", -kInfinity);
  }
  engine.reset_bounds();

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long next_id = 0;
  open.push(Node{-kInfinity, next_id++, {}, root_start});
  bool numerical_trouble = false;
  MilpStatus stop = MilpStatus::kOptimal;
  double last_bound = -kInfinity;

  while (!open.empty()) {
    const double global_bound = std::min(open.top().bound, result.objective);
    if (global_bound > last_bound) {
      last_bound = global_bound;
      emit("progress", global_bound);
    }
    if (result.has_incumbent() && global_bound >= result.objective - gap_allowance(result.objective)) {
      stop = global_bound >= result.objective - 1e-9 ? MilpStatus::kOptimal : MilpStatus::kGapLimit;
      break;
    }
    if (config.node_limit > 0 && result.nodes >= config.node_limit) {
      stop = MilpStatus::kNodeLimit;
      break;
    }
    if (config.time_limit_s > 0.0 && elapsed() >= config.time_limit_s) {
      stop = MilpStatus::kTimeLimit;
      break;
    }

    Node node = open.top();
    open.pop();
    if (result.has_incumbent() && node.bound >= result.objective - gap_allowance(result.objective)) continue;

    engine.reset_bounds();
    for (const auto& [var, value] : node.fixes) engine.set_bounds(var, value, value);
    engine.set_basis(node.basis);
    auto st = engine.solve();
    ++result.nodes;
    if (st != LpStatus::kOptimal && st != LpStatus::kInfeasible) {
      // Retry from the logical basis before giving up on the node.
      Basis slack;
      slack.status.assign(static_cast<size_t>(model.num_variables()), VarStatus::kAtLower);
      slack.status.resize(static_cast<size_t>(model.num_variables() + model.num_constraints()), VarStatus::kBasic);
      engine.set_basis(slack);
      st = engine.solve();
    }
    if (st == LpStatus::kInfeasible) continue;
    if (st != LpStatus::kOptimal) {
      numerical_trouble = true;
      continue;
    }
    const double obj = engine.objective();
    if (node.id == 0) result.root_basis = engine.basis();
    if (node.branch_var >= 0 && std::isfinite(node.parent_obj)) {
      pseudo.record(node.branch_var, node.branch_up, node.branch_up ? 1.0 - node.branch_frac : node.branch_frac,
                    std::max(0.0, obj - node.parent_obj));
    }
    if (result.has_incumbent() && obj >= result.objective - gap_allowance(result.objective)) continue;

    const auto v = engine.values();
    const int j = choose_branch(v);
    if (j < 0) {
      if (accept(obj, v)) emit("incumbent", std::min(obj, open.empty() ? obj : open.top().bound));
      continue;
    }
    const double val = v[static_cast<size_t>(j)];
    const double frac = val - std::floor(val);
    auto basis = engine.basis();
    for (const double side : {0.0, 1.0}) {
      Node child;
      child.bound = obj;
      child.id = next_id++;
      child.fixes = node.fixes;
      child.fixes.emplace_back(j, side);
      child.basis = basis;
      child.branch_var = j;
      child.branch_frac = frac;
      child.branch_up = side > 0.5;
      child.parent_obj = obj;
      open.push(std::move(child));
    }
  }

  result.lp_iterations = engine.iterations();
  if (open.empty()) {
    result.bound = result.has_incumbent() ? result.objective : kInfinity;
    result.status = result.has_incumbent() ? MilpStatus::kOptimal : MilpStatus::kInfeasible;
  } else {
    result.bound = std::min(open.top().bound, result.objective);
    result.status = stop;
    if (stop == MilpStatus::kOptimal) result.bound = result.objective;
  }
  if (numerical_trouble) result.status = MilpStatus::kError;
  emit("done", result.bound);
  return result;
}

int add_no_good_cut(Model& model, std::span<const int> vars, std::span<const double> point) {
  if (vars.size() != point.size()) throw std::invalid_argument("no-good cut: dimension mismatch");
  std::vector<Term> terms;
  for (size_t i = 0; i < vars.size(); ++i) {
    if (point[i] < 0.5) terms.push_back(Term{vars[i], 1.0});
  }
  return model.add_constraint("no_good_" + std::to_string(model.num_constraints()), std::move(terms),
                              Sense::kGreaterEqual, 1.0);
}

UniquenessResult check_uniqueness(const Model& model, std::span<const int> vars, std::span<const double> point,
                                  double objective, const BnbConfig& config, double tol) {
  Model cut = model;
  add_no_good_cut(cut, vars, point);
  const auto sol = solve_milp(cut, config);
  UniquenessResult out;
  out.cut_status = sol.status;
  out.cut_objective = sol.objective;
  if (!sol.has_incumbent()) {
    out.unique = sol.status == MilpStatus::kInfeasible;
    return out;
  }
  out.unique = sol.objective > objective + tol;
  if (!out.unique) out.witness = sol.values;
  return out;
}

}  // namespace floodsp::lp
