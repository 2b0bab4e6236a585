#include <doctest.h>

#include <random>

#include "floodsp/extensive_form.hpp"
#include "floodsp/fixtures.hpp"
#include "oracles/brute_force.hpp"
#include "oracles/random_instance.hpp"

using namespace floodsp;

namespace {

int bit(int mask, int i) { return (mask >> i) & 1; }

// Feasibility of an exact 0/1 point against the rows only (bounds hold by construction).
bool satisfies(const lp::Model& model, const std::vector<double>& point) { return model.max_violation(point) == 0.0; }

}  // namespace

TEST_CASE("substation status rows admit exactly the product value for |R| = 3") {
  for (int xi_mask = 0; xi_mask < 8; ++xi_mask) {
    const std::vector<int> xi{bit(xi_mask, 0), bit(xi_mask, 1), bit(xi_mask, 2)};
    lp::Model model;
    std::vector<int> x;
    for (int r = 0; r < 3; ++r) x.push_back(model.add_binary("x" + std::to_string(r)));
    const int alpha = model.add_binary("alpha");
    append_alpha_rows(model, x, xi, alpha, "k");
    for (int x_mask = 0; x_mask < 8; ++x_mask) {
      int product = 1;
      for (int r = 0; r < 3; ++r) product *= 1 - xi[static_cast<size_t>(r)] * (1 - bit(x_mask, r));
      for (int a = 0; a < 2; ++a) {
        CAPTURE(xi_mask);
        CAPTURE(x_mask);
        CAPTURE(a);
        const std::vector<double> point{double(bit(x_mask, 0)), double(bit(x_mask, 1)), double(bit(x_mask, 2)), double(a)};
        CHECK(satisfies(model, point) == (a == product));
      }
    }
  }
}

TEST_CASE("branch status rows admit exactly the product of end statuses") {
  // Both ends as columns, and each end folded to a constant.
  for (int shape = 0; shape < 4; ++shape) {
    for (int an = 0; an < 2; ++an) {
      for (int am = 0; am < 2; ++am) {
        lp::Model model;
        const int vn = model.add_binary("an");
        const int vm = model.add_binary("am");
        const int beta = model.add_binary("beta");
        const StatusRef rn = shape & 1 ? StatusRef{-1, an} : StatusRef{vn, 0};
        const StatusRef rm = shape & 2 ? StatusRef{-1, am} : StatusRef{vm, 0};
        append_beta_rows(model, rn, rm, beta, "e");
        for (int b = 0; b < 2; ++b) {
          CAPTURE(shape);
          CAPTURE(an);
          CAPTURE(am);
          CAPTURE(b);
          CHECK(satisfies(model, {double(an), double(am), double(b)}) == (b == an * am));
        }
      }
    }
  }
}

TEST_CASE("relaxed statuses are pinned by integral plans") {
  const auto fx = make_fixture("star8");
  const auto schedule = CostSchedule::from_network(fx.network);
  ExtensiveOptions opt;
  opt.relax_status = true;
  for (int rhat : {3, 4}) {
    const int fmax = max_useful_budget(fx.network, fx.scenarios, schedule, rhat);
    auto form = build_extensive_form(fx.network, fx.scenarios, schedule, Budget{fmax}, rhat, LossWeights{}, opt);
    CHECK(form.binary_count == fx.network.num_substations() * rhat);
    for (const auto& plan : enumerate_plans(schedule, Budget{fmax}, rhat, {0, 1, 2, 3})) {
      auto fixed = form;
      fix_first_stage(fixed, plan, schedule, Budget{fmax});
      const auto sol = lp::solve_lp(fixed.model);
      REQUIRE(sol.optimal());
      const auto statuses = extract_statuses(fixed, fx.network, sol.x);
      for (int w = 0; w < fx.scenarios.size(); ++w) {
        CHECK(statuses[static_cast<size_t>(w)] == status_closure(fx.network, plan, fx.scenarios.scenarios[static_cast<size_t>(w)]));
      }
      CHECK(sol.objective == doctest::Approx(evaluate_plan_serial(fx.network, plan, fx.scenarios, LossWeights{}).expected_loss));
    }
  }
}

TEST_CASE("branch-and-bound optimum equals brute force on small fixtures") {
  for (const char* name : {"tiny3", "star8"}) {
    const auto fx = make_fixture(name);
    const auto schedule = CostSchedule::from_network(fx.network);
    for (int rhat : {3, 4}) {
      const int fmax = max_useful_budget(fx.network, fx.scenarios, schedule, rhat);
      const auto values = oracle::all_plan_values(fx.network, fx.scenarios, schedule, fmax, rhat, LossWeights{});
      auto form = build_extensive_form(fx.network, fx.scenarios, schedule, Budget{0}, rhat, LossWeights{});
      for (int f = 0; f <= fmax; ++f) {
        CAPTURE(name);
        CAPTURE(rhat);
        CAPTURE(f);
        set_budget(form, Budget{f});
        const auto sol = solve_extensive_form(form);
        REQUIRE(sol.milp.status == lp::MilpStatus::kOptimal);
        const auto best = oracle::best_within(values, f);
        CHECK(sol.objective == doctest::Approx(best.value).epsilon(1e-9));
        CHECK(is_feasible(sol.plan, schedule, Budget{f}, rhat));
        CHECK(evaluate_plan_serial(fx.network, sol.plan, fx.scenarios, LossWeights{}).expected_loss ==
              doctest::Approx(sol.objective).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("branch-and-bound optimum equals brute force on random instances") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 12; ++trial) {
    const int subs = oracle::pick(rng, 1, 4);
    const auto inst = oracle::random_instance(rng, subs, oracle::pick(rng, 1, 4));
    const auto schedule = CostSchedule::from_network(inst.network);
    const int rhat = 3 + trial % 2;
    const int fmax = max_useful_budget(inst.network, inst.scenarios, schedule, rhat);
    const auto values = oracle::all_plan_values(inst.network, inst.scenarios, schedule, fmax, rhat, LossWeights{});
    for (int f : {0, fmax / 3, fmax / 2, fmax}) {
      CAPTURE(trial);
      CAPTURE(f);
      const auto form = build_extensive_form(inst.network, inst.scenarios, schedule, Budget{f}, rhat, LossWeights{});
      const auto sol = solve_extensive_form(form);
      REQUIRE(sol.solved());
      CHECK(sol.objective == doctest::Approx(oracle::best_within(values, f).value).epsilon(1e-9));
    }
  }
}

TEST_CASE("completed solutions are feasible incumbents with the plan's value") {
  const auto fx = make_fixture("star8");
  const auto schedule = CostSchedule::from_network(fx.network);
  const auto form = build_extensive_form(fx.network, fx.scenarios, schedule, Budget{10}, 3, LossWeights{});
  for (const auto& plan : enumerate_plans(schedule, Budget{10}, 3, {0, 1, 2, 3})) {
    const auto full = complete_solution(form, fx.network, fx.scenarios, plan, LossWeights{});
    CHECK(form.model.max_violation(full) <= 1e-7);
    CHECK(form.model.objective_value(full) ==
          doctest::Approx(evaluate_plan_serial(fx.network, plan, fx.scenarios, LossWeights{}).expected_loss));
    CHECK(extract_plan(form, full) == plan);
  }
}

TEST_CASE("no-good cut excludes the optimum and every plan it covers") {
  const auto fx = make_fixture("tiny3");
  const auto schedule = CostSchedule::from_network(fx.network);
  auto form = build_extensive_form(fx.network, fx.scenarios, schedule, Budget{4}, 3, LossWeights{});
  const auto first = solve_extensive_form(form);
  REQUIRE(first.solved());
  add_no_good_cut(form, first.plan);
  const auto second = solve_extensive_form(form);
  REQUIRE(second.solved());
  CHECK(second.objective >= first.objective - 1e-9);
  CHECK_FALSE(first.plan.covers(second.plan));

  // At f = 5 the optimum spends the whole budget, so every affordable plan is
  // covered by it and the cut leaves nothing.
  auto full = build_extensive_form(fx.network, fx.scenarios, schedule, Budget{5}, 3, LossWeights{});
  const auto best = solve_extensive_form(full);
  REQUIRE(best.solved());
  CHECK(best.objective == doctest::Approx(0.0));
  CHECK(best.plan.levels() == std::vector<int>{1, 2});
  add_no_good_cut(full, best.plan);
  CHECK(solve_extensive_form(full).milp.status == lp::MilpStatus::kInfeasible);
}

TEST_CASE("fixing an infeasible plan is rejected") {
  const auto fx = make_fixture("tiny3");
  const auto schedule = CostSchedule::from_network(fx.network);
  auto form = build_extensive_form(fx.network, fx.scenarios, schedule, Budget{2}, 3, LossWeights{});
  CHECK_THROWS(fix_first_stage(form, MitigationPlan::from_levels(std::vector<int>{1, 2}, 3), schedule, Budget{2}));
  CHECK_THROWS(build_extensive_form(fx.network, fx.scenarios, schedule, Budget{-1}, 3, LossWeights{}));
  CHECK_THROWS(build_extensive_form(fx.network, fx.scenarios, CostSchedule({1}), Budget{1}, 3, LossWeights{}));
}

TEST_CASE("service levels constrain expected served fraction") {
  const auto fx = make_fixture("tiny3");
  const auto schedule = CostSchedule::from_network(fx.network);
  ExtensiveOptions opt;
  // Bus 3 is served only when S2 stays dry in w1 and both stay up in w2.
  opt.service_levels[2] = 1.0;
  const auto form = build_extensive_form(fx.network, fx.scenarios, schedule, Budget{5}, 3, LossWeights{}, opt);
  const auto sol = solve_extensive_form(form);
  REQUIRE(sol.solved());
  CHECK(sol.plan.levels() == std::vector<int>{1, 2});
  const auto tight = build_extensive_form(fx.network, fx.scenarios, schedule, Budget{3}, 3, LossWeights{}, opt);
  CHECK(solve_extensive_form(tight).milp.status == lp::MilpStatus::kInfeasible);
  opt.service_levels[0] = 0.5;
  CHECK_THROWS(build_extensive_form(fx.network, fx.scenarios, schedule, Budget{5}, 3, LossWeights{}, opt));
}
