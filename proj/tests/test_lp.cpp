#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "floodsp/milp.hpp"
#include "floodsp/simplex.hpp"
#include "oracles/vertex_enumeration.hpp"

using namespace floodsp::lp;

namespace {

Model random_boxed_lp(std::mt19937_64& rng, int n, int m) {
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  std::uniform_int_distribution<int> sense(0, 2);
  Model model;
  for (int j = 0; j < n; ++j) {
    const double lo = std::round(coef(rng));
    model.add_variable("v" + std::to_string(j), lo, lo + 1.0 + std::abs(std::round(coef(rng))), std::round(coef(rng) * 2) / 2);
  }
  for (int i = 0; i < m; ++i) {
    std::vector<Term> terms;
    for (int j = 0; j < n; ++j) {
      const double c = std::round(coef(rng));
      if (c != 0.0) terms.push_back({j, c});
    }
    const int s = sense(rng);
    // Keep equalities rare so most instances stay feasible.
    const Sense sn = s == 0 ? Sense::kLessEqual : (s == 1 ? Sense::kGreaterEqual : (i == 0 ? Sense::kEqual : Sense::kLessEqual));
    model.add_constraint("r" + std::to_string(i), terms, sn, std::round(coef(rng) * 2));
  }
  return model;
}

}  // namespace

TEST_CASE("single variable LP with row upper bound") {
  Model model;
  const int x = model.add_variable("x", 0.0, kInfinity, -1.0);
  model.add_constraint("cap", {{x, 1.0}}, Sense::kLessEqual, 1.0);
  const auto sol = solve_lp(model);
  REQUIRE(sol.status == LpStatus::kOptimal);
  CHECK(sol.x[0] == doctest::Approx(1.0));
  CHECK(sol.objective == doctest::Approx(-1.0));
  CHECK(sol.duality_gap() <= 1e-9);
}

TEST_CASE("contradictory rows are infeasible") {
  Model model;
  const int x = model.add_variable("x", -kInfinity, kInfinity, 0.0);
  model.add_constraint("lo", {{x, 1.0}}, Sense::kGreaterEqual, 1.0);
  model.add_constraint("hi", {{x, 1.0}}, Sense::kLessEqual, 0.0);
  CHECK(solve_lp(model).status == LpStatus::kInfeasible);
}

TEST_CASE("unbounded ray is reported") {
  Model model;
  const int x = model.add_variable("x", 0.0, kInfinity, -1.0);
  const int y = model.add_variable("y", 0.0, kInfinity, 0.0);
  model.add_constraint("r", {{x, 1.0}, {y, -1.0}}, Sense::kLessEqual, 2.0);
  CHECK(solve_lp(model).status == LpStatus::kUnbounded);
}

TEST_CASE("free variables and equality rows") {
  // min x + 2y  s.t.  x + y = 3,  x - y >= -1,  y free, x in [0, 10]
  Model model;
  const int x = model.add_variable("x", 0.0, 10.0, 1.0);
  const int y = model.add_variable("y", -kInfinity, kInfinity, 2.0);
  model.add_constraint("sum", {{x, 1.0}, {y, 1.0}}, Sense::kEqual, 3.0);
  model.add_constraint("diff", {{x, 1.0}, {y, -1.0}}, Sense::kGreaterEqual, -1.0);
  const auto sol = solve_lp(model);
  REQUIRE(sol.optimal());
  // y as small as possible: y = 3 - x with x <= 10 gives y = -7.
  CHECK(sol.x[0] == doctest::Approx(10.0));
  CHECK(sol.x[1] == doctest::Approx(-7.0));
  CHECK(sol.objective == doctest::Approx(-4.0));
  CHECK(sol.duality_gap() <= 1e-9);
}

TEST_CASE("random boxed LPs match vertex enumeration") {
  std::mt19937_64 rng(20240917);
  int compared = 0;
  int infeasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + trial % 3;
    const int m = 1 + trial % 4;
    const auto model = random_boxed_lp(rng, n, m);
    const auto sol = solve_lp(model);
    const auto oracle = floodsp::oracle::enumerate_vertices(model);
    if (!oracle) {
      CHECK(sol.status == LpStatus::kInfeasible);
      ++infeasible;
      continue;
    }
    REQUIRE(sol.status == LpStatus::kOptimal);
    CHECK(sol.objective == doctest::Approx(oracle->objective).epsilon(1e-9));
    CHECK(sol.primal_residual <= 1e-8);
    CHECK(sol.duality_gap() <= 1e-6);
    ++compared;
  }
  CHECK(compared > 100);
  CHECK(infeasible > 0);
}

TEST_CASE("reduced costs are sign-consistent at the optimum") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto model = random_boxed_lp(rng, 4, 3);
    const auto sol = solve_lp(model);
    if (!sol.optimal()) continue;
    for (int j = 0; j < model.num_variables(); ++j) {
      const auto& v = model.variable(j);
      const double dj = sol.reduced_costs[static_cast<size_t>(j)];
      if (dj > 1e-7) CHECK(sol.x[static_cast<size_t>(j)] == doctest::Approx(v.lower));
      if (dj < -1e-7) CHECK(sol.x[static_cast<size_t>(j)] == doctest::Approx(v.upper));
    }
  }
}

TEST_CASE("engine re-solve after bound change equals a fresh solve") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    auto model = random_boxed_lp(rng, 4, 3);
    SimplexEngine engine(model);
    if (engine.solve() != LpStatus::kOptimal) continue;
    const int var = trial % 4;
    const double mid = 0.5 * (model.variable(var).lower + model.variable(var).upper);
    engine.set_bounds(var, model.variable(var).lower, mid);
    const auto warm = engine.solve();
    model.set_bounds(var, model.variable(var).lower, mid);
    const auto fresh = solve_lp(model);
    REQUIRE(warm == fresh.status);
    if (fresh.optimal()) CHECK(engine.objective() == doctest::Approx(fresh.objective).epsilon(1e-9));
  }
}

namespace {

// max 3w1 + 5w2 + w3  s.t.  4w1 + 8w2 + 3w3 <= C, as a minimization.
Model toy_knapsack(double capacity) {
  Model model;
  const int w1 = model.add_binary("w1", -3.0);
  const int w2 = model.add_binary("w2", -5.0);
  const int w3 = model.add_binary("w3", -1.0);
  model.add_constraint("capacity", {{w1, 4.0}, {w2, 8.0}, {w3, 3.0}}, Sense::kLessEqual, capacity);
  return model;
}

}  // namespace

TEST_CASE("toy knapsack decisions flip between capacities 7 and 8") {
  const auto seven = solve_milp(toy_knapsack(7.0));
  REQUIRE(seven.status == MilpStatus::kOptimal);
  CHECK(seven.values == std::vector<double>{1.0, 0.0, 1.0});
  CHECK(-seven.objective == doctest::Approx(4.0));
  const auto eight = solve_milp(toy_knapsack(8.0));
  REQUIRE(eight.status == MilpStatus::kOptimal);
  CHECK(eight.values == std::vector<double>{0.0, 1.0, 0.0});
  CHECK(-eight.objective == doctest::Approx(5.0));
}

TEST_CASE("branch-and-bound matches enumeration on random knapsacks") {
  std::mt19937_64 rng(31337);
  std::uniform_int_distribution<int> val(1, 20);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 4 + trial % 6;
    Model model;
    std::vector<int> value(static_cast<size_t>(n)), weight(static_cast<size_t>(n));
    std::vector<Term> row;
    for (int j = 0; j < n; ++j) {
      value[static_cast<size_t>(j)] = val(rng);
      weight[static_cast<size_t>(j)] = val(rng);
      model.add_binary("w" + std::to_string(j), -value[static_cast<size_t>(j)]);
      row.push_back({j, static_cast<double>(weight[static_cast<size_t>(j)])});
    }
    const int cap = 5 * n;
    model.add_constraint("cap", row, Sense::kLessEqual, cap);
    int best = 0;
    for (int mask = 0; mask < (1 << n); ++mask) {
      int v = 0, w = 0;
      for (int j = 0; j < n; ++j) {
        if (mask & (1 << j)) {
          v += value[static_cast<size_t>(j)];
          w += weight[static_cast<size_t>(j)];
        }
      }
      if (w <= cap) best = std::max(best, v);
    }
    for (auto rule : {Branching::kMostFractional, Branching::kPseudoCost}) {
      BnbConfig cfg;
      cfg.branching = rule;
      const auto sol = solve_milp(model, cfg);
      REQUIRE(sol.status == MilpStatus::kOptimal);
      CHECK(-sol.objective == doctest::Approx(best));
      CHECK(sol.bound == doctest::Approx(sol.objective));
    }
  }
}

TEST_CASE("bound sequence is monotone and runs are reproducible") {
  Model model;
  std::vector<Term> row;
  for (int j = 0; j < 12; ++j) {
    model.add_binary("w" + std::to_string(j), -(3.0 + (j * 7) % 11));
    row.push_back({j, 2.0 + (j * 5) % 9});
  }
  model.add_constraint("cap", row, Sense::kLessEqual, 27.0);
  std::vector<double> bounds;
  BnbConfig cfg;
  cfg.log = [&](const SolverEvent& e) {
    if (e.kind == "progress") bounds.push_back(e.bound);
  };
  const auto a = solve_milp(model, cfg);
  for (size_t i = 1; i < bounds.size(); ++i) CHECK(bounds[i] >= bounds[i - 1]);
  cfg.log = nullptr;
  const auto b = solve_milp(model, cfg);
  CHECK(a.values == b.values);
  CHECK(a.nodes == b.nodes);
}

TEST_CASE("warm start seeds the incumbent and never worsens it") {
  const auto model = toy_knapsack(7.0);
  BnbConfig cfg;
  cfg.warm_starts.push_back({{0, 1.0}, {1, 0.0}, {2, 0.0}});  // value 3, feasible
  cfg.warm_starts.push_back({{0, 1.0}, {1, 1.0}, {2, 0.0}});  // over capacity
  const auto sol = solve_milp(model, cfg);
  CHECK(sol.warm_start_objective == doctest::Approx(-3.0));
  CHECK(sol.objective <= sol.warm_start_objective);
  CHECK(sol.objective == doctest::Approx(-4.0));
}

TEST_CASE("infeasible MILP") {
  Model model;
  const int a = model.add_binary("a");
  const int b = model.add_binary("b");
  model.add_constraint("both", {{a, 1.0}, {b, 1.0}}, Sense::kGreaterEqual, 1.5);
  model.add_constraint("atmost", {{a, 1.0}, {b, 1.0}}, Sense::kLessEqual, 1.2);
  CHECK(solve_milp(model).status == MilpStatus::kInfeasible);
}

TEST_CASE("toy knapsack optimum at capacity 7 is unique") {
  const auto model = toy_knapsack(7.0);
  const auto sol = solve_milp(model);
  const std::vector<int> vars{0, 1, 2};
  const auto u = check_uniqueness(model, vars, sol.values, sol.objective, {});
  CHECK(u.unique);
  // Exhaustive check over the 8 points: the runner-up is strictly worse.
  CHECK(u.cut_objective > sol.objective);
}

TEST_CASE("no-good cut over an all-zero point forbids only the zero point") {
  Model model;
  const int a = model.add_binary("a", 1.0);
  const int b = model.add_binary("b", 1.0);
  const std::vector<int> vars{a, b};
  const std::vector<double> zero{0.0, 0.0};
  add_no_good_cut(model, vars, zero);
  const auto& row = model.constraints().back();
  CHECK(row.sense == Sense::kGreaterEqual);
  CHECK(row.rhs == 1.0);
  CHECK(row.terms.size() == 2);
  const auto sol = solve_milp(model);
  CHECK(sol.objective == doctest::Approx(1.0));
}

TEST_CASE("LP-format export layout") {
  Model model;
  const int x = model.add_variable("x", 0.0, 4.0, 1.5);
  const int y = model.add_binary("y", -2.0);
  const int z = model.add_variable("z", -kInfinity, kInfinity, 0.0);
  model.add_objective_offset(3.0);
  model.add_constraint("c1", {{x, 1.0}, {y, -1.0}}, Sense::kLessEqual, 2.0);
  model.add_constraint("c2", {{z, 2.0}, {x, 1.0}}, Sense::kEqual, 0.5);
  std::ostringstream out;
  write_lp_format(model, out);
  CHECK(out.str() ==
        "\\ floodsp extensive-form export\n"
        "Minimize\n"
        " obj: 1.5 x - 2 y + 3\n"
        "Subject To\n"
        " c1: 1 x - 1 y <= 2\n"
        " c2: 1 x + 2 z = 0.5\n"
        "Bounds\n"
        " 0 <= x <= 4\n"
        " z free\n"
        "Binaries\n"
        " y\n"
        "End\n");
}
