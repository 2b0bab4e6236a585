#pragma once

// Small random networks and scenario sets for property tests. Every network
// is connected through a spanning chain, has one reference bus with
// generation, and loads and limits drawn from short grids so instances stay
// reproducible across platforms.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "floodsp/grid.hpp"
#include "floodsp/scenario.hpp"

namespace floodsp::oracle {

struct RandomInstance {
  GridNetwork network;
  FloodScenarioSet scenarios;
};

inline int pick(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline GridNetwork random_network(std::mt19937_64& rng, int substations) {
  std::vector<Bus> buses;
  std::vector<Substation> subs;
  const VoltageClass classes[3] = {VoltageClass::kV115_161, VoltageClass::kV230, VoltageClass::kV500};
  for (int k = 0; k < substations; ++k) {
    Substation s;
    s.id = "S" + std::to_string(k);
    s.voltage = classes[pick(rng, 0, 2)];
    const int count = pick(rng, 1, 2);
    for (int i = 0; i < count; ++i) {
      Bus b;
      b.id = s.id + "b" + std::to_string(i);
      b.p_load = 0.25 * pick(rng, 0, 6);
      if (buses.empty() || pick(rng, 0, 3) == 0) {
        b.p_gen_max = 0.5 * pick(rng, 1, 6);
        b.p_gen_min = pick(rng, 0, 3) == 0 ? 0.25 : 0.0;
      }
      b.is_reference = buses.empty();
      s.buses.push_back(static_cast<int>(buses.size()));
      buses.push_back(std::move(b));
    }
    subs.push_back(std::move(s));
  }
  std::vector<Branch> branches;
  const int n = static_cast<int>(buses.size());
  auto line = [&](int from, int to) {
    branches.push_back(Branch{"L" + std::to_string(branches.size()), from, to, -2.5 * pick(rng, 2, 8),
                              0.25 * pick(rng, 1, 8)});
  };
  for (int i = 1; i < n; ++i) line(pick(rng, 0, i - 1), i);
  const int extra = pick(rng, 0, n / 2);
  for (int e = 0; e < extra; ++e) {
    const int a = pick(rng, 0, n - 1);
    const int b = pick(rng, 0, n - 1);
    if (a != b) line(a, b);
  }
  return GridNetwork(std::move(buses), std::move(branches), std::move(subs));
}

/// `count` scenarios with random levels in [0, level_count] and probabilities
/// proportional to small integers.
inline FloodScenarioSet random_scenarios(std::mt19937_64& rng, int substations, int count, int level_count) {
  FloodScenarioSet set;
  set.level_count = level_count;
  set.unattainable_level = 3;
  std::vector<int> weight;
  int total = 0;
  for (int w = 0; w < count; ++w) {
    weight.push_back(pick(rng, 1, 5));
    total += weight.back();
  }
  for (int w = 0; w < count; ++w) {
    FloodScenario s;
    s.id = "w" + std::to_string(w);
    s.probability = static_cast<double>(weight[static_cast<size_t>(w)]) / total;
    for (int k = 0; k < substations; ++k) s.levels.push_back(pick(rng, 0, 3) == 0 ? 0 : pick(rng, 0, level_count));
    set.scenarios.push_back(std::move(s));
  }
  return set;
}

inline RandomInstance random_instance(std::mt19937_64& rng, int substations, int scenarios, int level_count = 4) {
  RandomInstance inst;
  inst.network = random_network(rng, substations);
  inst.scenarios = random_scenarios(rng, substations, scenarios, level_count);
  return inst;
}

}  // namespace floodsp::oracle
