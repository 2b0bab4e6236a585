#include "floodsp/simplex.hpp"

#include <Eigen/Core>
#include "sparse_lu.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace floodsp::lp {

namespace {

std::mutex audit_mutex;
DualityAudit audit_state;

void record_audit(double gap) {
  std::lock_guard<std::mutex> lock(audit_mutex);
  ++audit_state.solves;
  audit_state.max_gap = std::max(audit_state.max_gap, gap);
}

// Contribution of min_{l <= v <= u} (coef * v) to a Lagrangian dual value.
double box_minimum(double coef, double lower, double upper, double eps) {
  if (coef > eps) return std::isfinite(lower) ? coef * lower : -kInfinity;
  if (coef < -eps) return std::isfinite(upper) ? coef * upper : -kInfinity;
  return 0.0;
}

}  // namespace

DualityAudit duality_audit() {
  std::lock_guard<std::mutex> lock(audit_mutex);
  return audit_state;
}

void reset_duality_audit() {
  std::lock_guard<std::mutex> lock(audit_mutex);
  audit_state = {};
}

struct SimplexEngine::Impl {
  using Vec = Eigen::VectorXd;

  struct Eta {
    int row = 0;
    double pivot = 1.0;
    std::vector<int> idx;
    std::vector<double> val;
  };

  const Model* model = nullptr;
  LpOptions opt;
  int n = 0;
  int m = 0;

  std::vector<int> col_start;
  std::vector<int> col_row;
  std::vector<double> col_val;
  std::vector<double> col_scale;  // sqrt(1 + |a_j|^2), used by pricing

  std::vector<double> cost;
  std::vector<double> base_cost;
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<double> row_lo;
  std::vector<double> row_hi;

  std::vector<VarStatus> status;
  std::vector<double> x;
  std::vector<double> d;
  std::vector<int> head;
  std::vector<int> where;

  SparseLu lu;
  std::vector<int> b_start, b_row;
  std::vector<double> b_val;
  std::vector<Eta> etas;
  std::vector<double> dse;  // dual steepest-edge weights by basis position
  bool factored = false;    // lu plus etas represent the current basis

  long iters = 0;
  long iter_limit = 0;
  LpStatus last = LpStatus::kNumericalFailure;
  int degenerate_run = 0;
  bool bland = false;

  explicit Impl(const Model& mdl, LpOptions options) : model(&mdl), opt(options) {
    n = mdl.num_variables();
    m = mdl.num_constraints();
    std::vector<std::vector<std::pair<int, double>>> cols(static_cast<size_t>(n));
    row_lo.assign(static_cast<size_t>(m), -kInfinity);
    row_hi.assign(static_cast<size_t>(m), kInfinity);
    for (int i = 0; i < m; ++i) {
      const auto& row = mdl.constraints()[static_cast<size_t>(i)];
      for (const auto& t : row.terms) cols[static_cast<size_t>(t.var)].emplace_back(i, t.coef);
      switch (row.sense) {
        case Sense::kLessEqual: row_hi[static_cast<size_t>(i)] = row.rhs; break;
        case Sense::kGreaterEqual: row_lo[static_cast<size_t>(i)] = row.rhs; break;
        case Sense::kEqual:
          row_lo[static_cast<size_t>(i)] = row.rhs;
          row_hi[static_cast<size_t>(i)] = row.rhs;
          break;
      }
    }
    col_start.assign(static_cast<size_t>(n) + 1, 0);
    for (int j = 0; j < n; ++j) {
      double sq = 1.0;
      for (const auto& [r, v] : cols[static_cast<size_t>(j)]) {
        col_row.push_back(r);
        col_val.push_back(v);
        sq += v * v;
      }
      col_start[static_cast<size_t>(j) + 1] = static_cast<int>(col_row.size());
      col_scale.push_back(std::sqrt(sq));
    }
    for (int i = 0; i < m; ++i) col_scale.push_back(std::sqrt(2.0));

    const auto total = static_cast<size_t>(n + m);
    cost.assign(total, 0.0);
    lo.assign(total, 0.0);
    hi.assign(total, 0.0);
    for (int j = 0; j < n; ++j) {
      const auto& v = mdl.variables()[static_cast<size_t>(j)];
      cost[static_cast<size_t>(j)] = v.cost;
    }
    base_cost = cost;
    reset_bounds();
    slack_basis();
    iter_limit = opt.iteration_limit > 0 ? opt.iteration_limit : 200L * (n + m) + 20000L;
  }

  void reset_bounds() {
    for (int j = 0; j < n; ++j) {
      const auto& v = model->variables()[static_cast<size_t>(j)];
      lo[static_cast<size_t>(j)] = v.lower;
      hi[static_cast<size_t>(j)] = v.upper;
    }
    for (int i = 0; i < m; ++i) {
      lo[static_cast<size_t>(n + i)] = row_lo[static_cast<size_t>(i)];
      hi[static_cast<size_t>(n + i)] = row_hi[static_cast<size_t>(i)];
    }
  }

  [[nodiscard]] VarStatus resting_status(int j, VarStatus wanted) const {
    const bool has_lo = std::isfinite(lo[static_cast<size_t>(j)]);
    const bool has_hi = std::isfinite(hi[static_cast<size_t>(j)]);
    if (wanted == VarStatus::kAtUpper && has_hi) return VarStatus::kAtUpper;
    if (wanted == VarStatus::kAtLower && has_lo) return VarStatus::kAtLower;
    if (has_lo && has_hi) {
      return std::abs(lo[static_cast<size_t>(j)]) <= std::abs(hi[static_cast<size_t>(j)])
                 ? VarStatus::kAtLower
                 : VarStatus::kAtUpper;
    }
    if (has_lo) return VarStatus::kAtLower;
    if (has_hi) return VarStatus::kAtUpper;
    return VarStatus::kFree;
  }

  void slack_basis() {
    const auto total = static_cast<size_t>(n + m);
    status.assign(total, VarStatus::kAtLower);
    where.assign(total, -1);
    head.assign(static_cast<size_t>(m), -1);
    for (int j = 0; j < n; ++j) status[static_cast<size_t>(j)] = resting_status(j, VarStatus::kAtLower);
    for (int i = 0; i < m; ++i) {
      status[static_cast<size_t>(n + i)] = VarStatus::kBasic;
      head[static_cast<size_t>(i)] = n + i;
      where[static_cast<size_t>(n + i)] = i;
    }
    x.assign(total, 0.0);
    d.assign(total, 0.0);
    dse.assign(static_cast<size_t>(m), 1.0);
    etas.clear();
    factored = false;
  }

  [[nodiscard]] double nonbasic_value(int j) const {
    switch (status[static_cast<size_t>(j)]) {
      case VarStatus::kAtLower: return lo[static_cast<size_t>(j)];
      case VarStatus::kAtUpper: return hi[static_cast<size_t>(j)];
      default: return 0.0;
    }
  }

  void settle_nonbasics() {
    for (int j = 0; j < n + m; ++j) {
      auto& s = status[static_cast<size_t>(j)];
      if (s == VarStatus::kBasic) continue;
      s = resting_status(j, s);
      x[static_cast<size_t>(j)] = nonbasic_value(j);
    }
  }

  // --- factorization -------------------------------------------------------

  bool refactor() {
    etas.clear();
    b_start.assign(1, 0);
    b_row.clear();
    b_val.clear();
    for (int p = 0; p < m; ++p) {
      const int j = head[static_cast<size_t>(p)];
      if (j >= n) {
        b_row.push_back(j - n);
        b_val.push_back(-1.0);
      } else {
        for (int k = col_start[static_cast<size_t>(j)]; k < col_start[static_cast<size_t>(j) + 1]; ++k) {
          b_row.push_back(col_row[static_cast<size_t>(k)]);
          b_val.push_back(col_val[static_cast<size_t>(k)]);
        }
      }
      b_start.push_back(static_cast<int>(b_row.size()));
    }
    factored = lu.factorize(m, b_start, b_row, b_val);
    return factored;
  }

  // Rebuilds a factorizable basis: keeps the current one if possible,
  // otherwise falls back to all logicals.
  void ensure_factor() {
    if (refactor()) return;
    for (int j = 0; j < n + m; ++j) {
      if (status[static_cast<size_t>(j)] == VarStatus::kBasic && j < n)
        status[static_cast<size_t>(j)] = resting_status(j, VarStatus::kAtLower);
    }
    std::fill(where.begin(), where.end(), -1);
    for (int i = 0; i < m; ++i) {
      status[static_cast<size_t>(n + i)] = VarStatus::kBasic;
      head[static_cast<size_t>(i)] = n + i;
      where[static_cast<size_t>(n + i)] = i;
    }
    dse.assign(static_cast<size_t>(m), 1.0);
    if (!refactor()) throw std::runtime_error("simplex: logical basis failed to factor");
  }

  void ftran(Vec& v) const {
    if (m == 0) return;
    lu.solve(v.data());
    for (const auto& e : etas) {
      const double t = v[e.row] / e.pivot;
      if (t != 0.0) {
        for (size_t k = 0; k < e.idx.size(); ++k) v[e.idx[k]] -= e.val[k] * t;
      }
      v[e.row] = t;
    }
  }

  void btran(Vec& v) const {
    if (m == 0) return;
    for (auto it = etas.rbegin(); it != etas.rend(); ++it) {
      double acc = v[it->row];
      for (size_t k = 0; k < it->idx.size(); ++k) acc -= v[it->idx[k]] * it->val[k];
      v[it->row] = acc / it->pivot;
    }
    lu.solve_transpose(v.data());
  }

  void push_eta(const Vec& alpha, int r) {
    Eta e;
    e.row = r;
    e.pivot = alpha[r];
    for (int i = 0; i < m; ++i) {
      if (i != r && alpha[i] != 0.0) {
        e.idx.push_back(i);
        e.val.push_back(alpha[i]);
      }
    }
    etas.push_back(std::move(e));
  }

  [[nodiscard]] double column_dot(int j, const Vec& y) const {
    if (j >= n) return -y[j - n];
    double s = 0.0;
    for (int k = col_start[static_cast<size_t>(j)]; k < col_start[static_cast<size_t>(j) + 1]; ++k)
      s += col_val[static_cast<size_t>(k)] * y[col_row[static_cast<size_t>(k)]];
    return s;
  }

  void load_column(int j, Vec& out) const {
    out.setZero(m);
    if (j >= n) {
      out[j - n] = -1.0;
      return;
    }
    for (int k = col_start[static_cast<size_t>(j)]; k < col_start[static_cast<size_t>(j) + 1]; ++k)
      out[col_row[static_cast<size_t>(k)]] = col_val[static_cast<size_t>(k)];
  }

  void compute_primal() {
    Vec rhs = Vec::Zero(m);
    for (int j = 0; j < n + m; ++j) {
      if (status[static_cast<size_t>(j)] == VarStatus::kBasic) continue;
      const double v = x[static_cast<size_t>(j)];
      if (v == 0.0) continue;
      if (j >= n) {
        rhs[j - n] += v;
      } else {
        for (int k = col_start[static_cast<size_t>(j)]; k < col_start[static_cast<size_t>(j) + 1]; ++k)
          rhs[col_row[static_cast<size_t>(k)]] -= col_val[static_cast<size_t>(k)] * v;
      }
    }
    ftran(rhs);
    for (int p = 0; p < m; ++p) x[static_cast<size_t>(head[static_cast<size_t>(p)])] = rhs[p];
  }

  void compute_duals(const std::vector<double>& c) {
    Vec y(m);
    for (int p = 0; p < m; ++p) y[p] = c[static_cast<size_t>(head[static_cast<size_t>(p)])];
    btran(y);
    for (int j = 0; j < n + m; ++j) {
      d[static_cast<size_t>(j)] =
          status[static_cast<size_t>(j)] == VarStatus::kBasic ? 0.0 : c[static_cast<size_t>(j)] - column_dot(j, y);
    }
  }

  [[nodiscard]] Vec row_duals(const std::vector<double>& c) const {
    Vec y(m);
    for (int p = 0; p < m; ++p) y[p] = c[static_cast<size_t>(head[static_cast<size_t>(p)])];
    btran(y);
    return y;
  }

  [[nodiscard]] bool is_fixed(int j) const { return lo[static_cast<size_t>(j)] == hi[static_cast<size_t>(j)]; }

  [[nodiscard]] double primal_infeasibility(int j) const {
    const double v = x[static_cast<size_t>(j)];
    if (v < lo[static_cast<size_t>(j)]) return lo[static_cast<size_t>(j)] - v;
    if (v > hi[static_cast<size_t>(j)]) return v - hi[static_cast<size_t>(j)];
    return 0.0;
  }

  [[nodiscard]] double feas_tol(int j) const {
    const double scale = std::max({1.0, std::abs(std::isfinite(lo[static_cast<size_t>(j)]) ? lo[static_cast<size_t>(j)] : 0.0),
                                   std::abs(std::isfinite(hi[static_cast<size_t>(j)]) ? hi[static_cast<size_t>(j)] : 0.0)});
    return opt.primal_tol * scale;
  }

  // Moves nonbasic columns to the bound matching their reduced-cost sign.
  // Returns false when some column would need an infinite bound.
  bool make_dual_feasible() {
    bool moved = false;
    for (int j = 0; j < n + m; ++j) {
      auto& s = status[static_cast<size_t>(j)];
      if (s == VarStatus::kBasic || is_fixed(j)) continue;
      const double dj = d[static_cast<size_t>(j)];
      VarStatus want = s;
      if (dj > opt.dual_tol) {
        if (!std::isfinite(lo[static_cast<size_t>(j)])) return false;
        want = VarStatus::kAtLower;
      } else if (dj < -opt.dual_tol) {
        if (!std::isfinite(hi[static_cast<size_t>(j)])) return false;
        want = VarStatus::kAtUpper;
      }
      if (want != s) {
        s = want;
        x[static_cast<size_t>(j)] = nonbasic_value(j);
        moved = true;
      }
    }
    if (moved) compute_primal();
    return true;
  }

  void note_step(double step) {
    if (std::abs(step) <= 1e-12) {
      if (++degenerate_run >= opt.degenerate_streak) bland = true;
    } else {
      degenerate_run = 0;
      bland = false;
    }
  }

  void pivot(int q, int r, const Vec& alpha) {
    const int p = head[static_cast<size_t>(r)];
    head[static_cast<size_t>(r)] = q;
    where[static_cast<size_t>(q)] = r;
    where[static_cast<size_t>(p)] = -1;
    status[static_cast<size_t>(q)] = VarStatus::kBasic;
    push_eta(alpha, r);
  }

  // Refactor on schedule; returns false if the basis had to be rebuilt.
  bool maybe_refactor(const std::vector<double>& c) {
    if (static_cast<int>(etas.size()) < opt.refactor_interval) return true;
    const bool ok = refactor();
    if (!ok) ensure_factor();
    settle_nonbasics();
    compute_primal();
    compute_duals(c);
    return ok;
  }

  // --- dual simplex ---------------------------------------------------------

  LpStatus dual_loop() {
    Vec rho(m);
    Vec alpha(m);
    Vec tau(m);
    std::vector<double> row_alpha(static_cast<size_t>(n + m), 0.0);
    bool rechecked = false;
    while (true) {
      if (iters >= iter_limit) return LpStatus::kIterationLimit;
      if (!maybe_refactor(cost)) return LpStatus::kNumericalFailure;

      int r = -1;
      double best = 0.0;
      for (int p = 0; p < m; ++p) {
        const int j = head[static_cast<size_t>(p)];
        const double viol = primal_infeasibility(j);
        if (viol <= feas_tol(j)) continue;
        if (bland) {
          if (r < 0 || j < head[static_cast<size_t>(r)]) r = p;
        } else if (viol * viol > best * dse[static_cast<size_t>(p)]) {
          best = viol * viol / dse[static_cast<size_t>(p)];
          r = p;
        }
      }
      if (r < 0) return LpStatus::kOptimal;

      const int leaving = head[static_cast<size_t>(r)];
      const bool to_upper = x[static_cast<size_t>(leaving)] > hi[static_cast<size_t>(leaving)];
      const double sgn = to_upper ? 1.0 : -1.0;
      const double target = to_upper ? hi[static_cast<size_t>(leaving)] : lo[static_cast<size_t>(leaving)];

      rho.setZero(m);
      rho[r] = 1.0;
      btran(rho);

      // Harris two-pass ratio test on the pivot row.
      double bound = kInfinity;
      for (int j = 0; j < n + m; ++j) {
        const auto s = status[static_cast<size_t>(j)];
        row_alpha[static_cast<size_t>(j)] = 0.0;
        if (s == VarStatus::kBasic || is_fixed(j)) continue;
        const double a = column_dot(j, rho);
        row_alpha[static_cast<size_t>(j)] = a;
        const double at = sgn * a;
        const bool eligible = (s == VarStatus::kAtLower && at > opt.pivot_tol) ||
                              (s == VarStatus::kAtUpper && at < -opt.pivot_tol) ||
                              (s == VarStatus::kFree && std::abs(at) > opt.pivot_tol);
        if (!eligible) continue;
        bound = std::min(bound, (std::abs(d[static_cast<size_t>(j)]) + opt.dual_tol) / std::abs(at));
      }
      if (!std::isfinite(bound)) {
        if (!rechecked && !etas.empty()) {
          rechecked = true;
          ensure_factor();
          settle_nonbasics();
          compute_primal();
          compute_duals(cost);
          continue;
        }
        return LpStatus::kInfeasible;
      }
      rechecked = false;

      int q = -1;
      double q_mag = 0.0;
      double q_ratio = kInfinity;
      for (int j = 0; j < n + m; ++j) {
        const auto s = status[static_cast<size_t>(j)];
        if (s == VarStatus::kBasic || is_fixed(j)) continue;
        const double at = sgn * row_alpha[static_cast<size_t>(j)];
        const bool eligible = (s == VarStatus::kAtLower && at > opt.pivot_tol) ||
                              (s == VarStatus::kAtUpper && at < -opt.pivot_tol) ||
                              (s == VarStatus::kFree && std::abs(at) > opt.pivot_tol);
        if (!eligible) continue;
        const double ratio = std::abs(d[static_cast<size_t>(j)]) / std::abs(at);
        if (bland) {
          if (ratio < q_ratio - 1e-12 || (ratio <= q_ratio + 1e-12 && (q < 0 || j < q))) {
            q = j;
            q_ratio = ratio;
          }
        } else if (ratio <= bound && std::abs(at) > q_mag) {
          q = j;
          q_mag = std::abs(at);
        }
      }
      if (q < 0) return LpStatus::kNumericalFailure;

      load_column(q, alpha);
      ftran(alpha);
      const double arq = alpha[r];
      const double check = row_alpha[static_cast<size_t>(q)];
      if (std::abs(arq) < opt.pivot_tol || std::abs(arq - check) > 1e-6 * (1.0 + std::abs(arq))) {
        if (etas.empty()) return LpStatus::kNumericalFailure;
        ensure_factor();
        settle_nonbasics();
        compute_primal();
        compute_duals(cost);
        continue;
      }

      // Steepest-edge update: tau = B^-1 rho, |rho|^2 is the exact weight of row r.
      tau = rho;
      ftran(tau);
      const double wr = rho.squaredNorm();
      for (int p = 0; p < m; ++p) {
        if (p == r || alpha[p] == 0.0) continue;
        const double ratio = alpha[p] / arq;
        auto& w = dse[static_cast<size_t>(p)];
        w = std::max(w - 2.0 * ratio * tau[p] + ratio * ratio * wr, 1e-8);
      }
      dse[static_cast<size_t>(r)] = std::max(wr / (arq * arq), 1e-8);

      const double theta_d = d[static_cast<size_t>(q)] / arq;
      const double theta_p = (x[static_cast<size_t>(leaving)] - target) / arq;
      for (int p = 0; p < m; ++p) x[static_cast<size_t>(head[static_cast<size_t>(p)])] -= theta_p * alpha[p];
      x[static_cast<size_t>(q)] += theta_p;
      for (int j = 0; j < n + m; ++j) {
        if (status[static_cast<size_t>(j)] == VarStatus::kBasic) continue;
        d[static_cast<size_t>(j)] -= theta_d * row_alpha[static_cast<size_t>(j)];
      }
      d[static_cast<size_t>(q)] = 0.0;
      d[static_cast<size_t>(leaving)] = -theta_d;

      pivot(q, r, alpha);
      status[static_cast<size_t>(leaving)] = to_upper ? VarStatus::kAtUpper : VarStatus::kAtLower;
      x[static_cast<size_t>(leaving)] = target;
      note_step(theta_d);
      ++iters;
    }
  }

  // --- primal simplex (composite phase 1 / phase 2) -------------------------

  LpStatus primal_loop() {
    Vec alpha(m);
    std::vector<double> phase_cost(static_cast<size_t>(n + m), 0.0);
    while (true) {
      if (iters >= iter_limit) return LpStatus::kIterationLimit;
      if (static_cast<int>(etas.size()) >= opt.refactor_interval) {
        ensure_factor();
        settle_nonbasics();
        compute_primal();
      }

      bool phase1 = false;
      for (int p = 0; p < m; ++p) {
        const int j = head[static_cast<size_t>(p)];
        if (primal_infeasibility(j) > feas_tol(j)) {
          phase1 = true;
          break;
        }
      }
      if (phase1) {
        std::fill(phase_cost.begin(), phase_cost.end(), 0.0);
        for (int p = 0; p < m; ++p) {
          const int j = head[static_cast<size_t>(p)];
          if (x[static_cast<size_t>(j)] < lo[static_cast<size_t>(j)] - feas_tol(j)) phase_cost[static_cast<size_t>(j)] = -1.0;
          else if (x[static_cast<size_t>(j)] > hi[static_cast<size_t>(j)] + feas_tol(j)) phase_cost[static_cast<size_t>(j)] = 1.0;
        }
        compute_duals(phase_cost);
      } else {
        compute_duals(cost);
      }

      int q = -1;
      double best = 0.0;
      for (int j = 0; j < n + m; ++j) {
        const auto s = status[static_cast<size_t>(j)];
        if (s == VarStatus::kBasic || is_fixed(j)) continue;
        const double dj = d[static_cast<size_t>(j)];
        const bool eligible = (s == VarStatus::kAtLower && dj < -opt.dual_tol) ||
                              (s == VarStatus::kAtUpper && dj > opt.dual_tol) ||
                              (s == VarStatus::kFree && std::abs(dj) > opt.dual_tol);
        if (!eligible) continue;
        if (bland) {
          q = j;
          break;
        }
        const double score = std::abs(dj) / col_scale[static_cast<size_t>(j)];
        if (score > best) {
          best = score;
          q = j;
        }
      }
      if (q < 0) return phase1 ? LpStatus::kInfeasible : LpStatus::kOptimal;

      const double dir = d[static_cast<size_t>(q)] < 0.0 ? 1.0 : -1.0;
      load_column(q, alpha);
      ftran(alpha);

      // Ratio test; a basic column changes by -dir * alpha_i per unit step.
      auto limit_of = [&](int p, double rate) -> double {
        const int j = head[static_cast<size_t>(p)];
        const double v = x[static_cast<size_t>(j)];
        const double l = lo[static_cast<size_t>(j)];
        const double u = hi[static_cast<size_t>(j)];
        const double tol = feas_tol(j);
        if (rate > 0.0) {
          if (v < l - tol) return (l - v) / rate;
          if (v > u + tol) return kInfinity;
          return std::isfinite(u) ? std::max(u - v, 0.0) / rate : kInfinity;
        }
        if (v > u + tol) return (v - u) / -rate;
        if (v < l - tol) return kInfinity;
        return std::isfinite(l) ? std::max(v - l, 0.0) / -rate : kInfinity;
      };

      double harris = kInfinity;
      for (int p = 0; p < m; ++p) {
        const double rate = -dir * alpha[p];
        if (std::abs(rate) <= opt.pivot_tol) continue;
        const double lim = limit_of(p, rate);
        if (!std::isfinite(lim)) continue;
        harris = std::min(harris, lim + feas_tol(head[static_cast<size_t>(p)]) / std::abs(rate));
      }
      int r = -1;
      double step = kInfinity;
      double r_mag = 0.0;
      for (int p = 0; p < m; ++p) {
        const double rate = -dir * alpha[p];
        if (std::abs(rate) <= opt.pivot_tol) continue;
        const double lim = limit_of(p, rate);
        if (!std::isfinite(lim) || lim > harris) continue;
        if (bland) {
          if (r < 0 || lim < step - 1e-12 ||
              (lim <= step + 1e-12 && head[static_cast<size_t>(p)] < head[static_cast<size_t>(r)])) {
            r = p;
            step = lim;
          }
        } else if (std::abs(rate) > r_mag) {
          r = p;
          r_mag = std::abs(rate);
          step = lim;
        }
      }

      const double span = hi[static_cast<size_t>(q)] - lo[static_cast<size_t>(q)];
      if (std::isfinite(span) && (r < 0 || span <= step)) {
        // Bound flip of the entering column, no basis change.
        for (int p = 0; p < m; ++p) x[static_cast<size_t>(head[static_cast<size_t>(p)])] -= dir * span * alpha[p];
        status[static_cast<size_t>(q)] =
            status[static_cast<size_t>(q)] == VarStatus::kAtLower ? VarStatus::kAtUpper : VarStatus::kAtLower;
        x[static_cast<size_t>(q)] = nonbasic_value(q);
        note_step(span);
        ++iters;
        continue;
      }
      if (r < 0) {
        if (phase1) return LpStatus::kNumericalFailure;
        return LpStatus::kUnbounded;
      }

      step = std::max(step, 0.0);
      const int leaving = head[static_cast<size_t>(r)];
      const double rate_r = -dir * alpha[r];
      for (int p = 0; p < m; ++p) x[static_cast<size_t>(head[static_cast<size_t>(p)])] -= dir * step * alpha[p];
      x[static_cast<size_t>(q)] += dir * step;
      // The leaving column rests on whichever bound it reached.
      const double lv = x[static_cast<size_t>(leaving)];
      VarStatus rest;
      if (rate_r > 0.0) {
        rest = (std::isfinite(hi[static_cast<size_t>(leaving)]) &&
                std::abs(lv - hi[static_cast<size_t>(leaving)]) <= std::abs(lv - lo[static_cast<size_t>(leaving)]))
                   ? VarStatus::kAtUpper
                   : VarStatus::kAtLower;
      } else {
        rest = (std::isfinite(lo[static_cast<size_t>(leaving)]) &&
                std::abs(lv - lo[static_cast<size_t>(leaving)]) <= std::abs(lv - hi[static_cast<size_t>(leaving)]))
                   ? VarStatus::kAtLower
                   : VarStatus::kAtUpper;
      }
      if (std::abs(alpha[r]) < opt.pivot_tol) return LpStatus::kNumericalFailure;
      pivot(q, r, alpha);
      status[static_cast<size_t>(leaving)] = resting_status(leaving, rest);
      x[static_cast<size_t>(leaving)] = nonbasic_value(leaving);
      note_step(step);
      ++iters;
    }
  }

  // --- driver ---------------------------------------------------------------

  [[nodiscard]] double max_primal_infeasibility() const {
    double worst = 0.0;
    for (int p = 0; p < m; ++p) {
      const int j = head[static_cast<size_t>(p)];
      worst = std::max(worst, primal_infeasibility(j) / std::max(1.0, feas_tol(j) / opt.primal_tol));
    }
    return worst;
  }

  [[nodiscard]] double max_dual_infeasibility() const {
    double worst = 0.0;
    for (int j = 0; j < n + m; ++j) {
      const auto s = status[static_cast<size_t>(j)];
      if (s == VarStatus::kBasic || is_fixed(j)) continue;
      const double dj = d[static_cast<size_t>(j)];
      if (s == VarStatus::kAtLower) worst = std::max(worst, -dj);
      else if (s == VarStatus::kAtUpper) worst = std::max(worst, dj);
      else worst = std::max(worst, std::abs(dj));
    }
    return worst;
  }

  // Shifts nonbasic structural costs away from zero reduced cost; basic costs
  // are untouched so the duals and dual feasibility are preserved.
  void perturb_costs() {
    if (opt.cost_perturbation <= 0.0) return;
    for (int j = 0; j < n; ++j) {
      const auto u = static_cast<size_t>(j);
      const auto s = status[u];
      if (s != VarStatus::kAtLower && s != VarStatus::kAtUpper) continue;
      if (is_fixed(j)) continue;
      const double noise = 1.0 + static_cast<double>((static_cast<unsigned>(j) * 2654435761u) >> 22) / 1024.0;
      const double delta = opt.cost_perturbation * (1.0 + std::abs(base_cost[u])) * noise;
      const double shift = s == VarStatus::kAtLower ? delta : -delta;
      cost[u] = base_cost[u] + shift;
      d[u] += shift;
    }
  }

  // Returns true if costs had been perturbed.
  bool restore_costs() {
    if (cost == base_cost) return false;
    cost = base_cost;
    compute_duals(cost);
    return true;
  }

  LpStatus solve() {
    degenerate_run = 0;
    bland = false;
    if (!factored) ensure_factor();
    settle_nonbasics();
    compute_primal();
    compute_duals(cost);

    LpStatus st = LpStatus::kNumericalFailure;
    for (int round = 0; round < 4; ++round) {
      if (round == 0) perturb_costs();
      if (make_dual_feasible()) {
        st = dual_loop();
      }
      if (restore_costs() && st == LpStatus::kOptimal && max_dual_infeasibility() > opt.dual_tol) st = LpStatus::kNumericalFailure;
      if (st == LpStatus::kInfeasible || st == LpStatus::kIterationLimit) break;
      if (st != LpStatus::kOptimal) {
        bland = false;
        degenerate_run = 0;
        st = primal_loop();
        if (st != LpStatus::kOptimal) break;
      }
      // Verify from a fresh factorization.
      ensure_factor();
      settle_nonbasics();
      compute_primal();
      compute_duals(cost);
      if (max_primal_infeasibility() <= 10 * opt.primal_tol && max_dual_infeasibility() <= 10 * opt.dual_tol) break;
      st = LpStatus::kNumericalFailure;
      bland = true;
    }
    last = st;
    if (st == LpStatus::kOptimal) {
      const double gap = std::abs(primal_objective() - dual_objective(row_duals(cost)));
      record_audit(gap);
      if (!(gap <= opt.duality_tol * std::max(1.0, std::abs(primal_objective())))) last = LpStatus::kNumericalFailure;
    }
    return last;
  }

  [[nodiscard]] double primal_objective() const {
    double obj = model->objective_offset();
    for (int j = 0; j < n; ++j) obj += cost[static_cast<size_t>(j)] * x[static_cast<size_t>(j)];
    return obj;
  }

  [[nodiscard]] double dual_objective(const Vec& y) const {
    double val = model->objective_offset();
    for (int j = 0; j < n; ++j) {
      const double dj = cost[static_cast<size_t>(j)] - column_dot(j, y);
      val += box_minimum(dj, lo[static_cast<size_t>(j)], hi[static_cast<size_t>(j)], 1e-11);
    }
    for (int i = 0; i < m; ++i) val += box_minimum(y[i], row_lo[static_cast<size_t>(i)], row_hi[static_cast<size_t>(i)], 1e-11);
    return val;
  }
};

SimplexEngine::SimplexEngine(const Model& model, LpOptions options)
    : impl_(std::make_unique<Impl>(model, options)) {}
SimplexEngine::~SimplexEngine() = default;
SimplexEngine::SimplexEngine(SimplexEngine&&) noexcept = default;
SimplexEngine& SimplexEngine::operator=(SimplexEngine&&) noexcept = default;

void SimplexEngine::set_bounds(int var, double lower, double upper) {
  if (var < 0 || var >= impl_->n) throw std::out_of_range("simplex: variable index");
  impl_->lo[static_cast<size_t>(var)] = lower;
  impl_->hi[static_cast<size_t>(var)] = upper;
}

void SimplexEngine::reset_bounds() { impl_->reset_bounds(); }
double SimplexEngine::lower(int var) const { return impl_->lo.at(static_cast<size_t>(var)); }
double SimplexEngine::upper(int var) const { return impl_->hi.at(static_cast<size_t>(var)); }

LpStatus SimplexEngine::solve() { return impl_->solve(); }

Basis SimplexEngine::basis() const { return Basis{impl_->status}; }

void SimplexEngine::set_basis(const Basis& basis) {
  auto& im = *impl_;
  if (basis.status.size() != static_cast<size_t>(im.n + im.m)) throw std::invalid_argument("simplex: basis size");
  const auto basic = std::count(basis.status.begin(), basis.status.end(), VarStatus::kBasic);
  if (basic != im.m) throw std::invalid_argument("simplex: basis must have one basic column per row");
  bool same_basic = im.factored;
  for (int j = 0; same_basic && j < im.n + im.m; ++j) {
    same_basic = (basis.status[static_cast<size_t>(j)] == VarStatus::kBasic) == (im.where[static_cast<size_t>(j)] >= 0);
  }
  if (same_basic) {
    im.status = basis.status;
    return;
  }
  im.status = basis.status;
  std::fill(im.where.begin(), im.where.end(), -1);
  int p = 0;
  for (int j = 0; j < im.n + im.m; ++j) {
    if (im.status[static_cast<size_t>(j)] == VarStatus::kBasic) {
      im.head[static_cast<size_t>(p)] = j;
      im.where[static_cast<size_t>(j)] = p;
      ++p;
    }
  }
  im.dse.assign(static_cast<size_t>(im.m), 1.0);
  im.etas.clear();
  im.factored = false;
}

LpSolution SimplexEngine::solution() const {
  const auto& im = *impl_;
  LpSolution sol;
  sol.status = im.last;
  sol.iterations = im.iters;
  sol.x.assign(im.x.begin(), im.x.begin() + im.n);
  const auto y = im.row_duals(im.cost);
  sol.row_duals.assign(y.data(), y.data() + im.m);
  sol.reduced_costs.resize(static_cast<size_t>(im.n));
  for (int j = 0; j < im.n; ++j) sol.reduced_costs[static_cast<size_t>(j)] = im.cost[static_cast<size_t>(j)] - im.column_dot(j, y);
  sol.objective = im.primal_objective();
  sol.dual_objective = im.dual_objective(y);
  sol.primal_residual = im.model->max_violation(sol.x);
  return sol;
}

double SimplexEngine::objective() const { return impl_->primal_objective(); }
std::span<const double> SimplexEngine::values() const {
  return {impl_->x.data(), static_cast<size_t>(impl_->n)};
}
long SimplexEngine::iterations() const { return impl_->iters; }
LpStatus SimplexEngine::status() const { return impl_->last; }

LpSolution solve_lp(const Model& model, const LpOptions& options) {
  SimplexEngine engine(model, options);
  engine.solve();
  return engine.solution();
}

}  // namespace floodsp::lp
