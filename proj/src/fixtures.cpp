#include "floodsp/fixtures.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "floodsp/geo.hpp"

namespace floodsp {

namespace {

struct Builder {
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::vector<Substation> subs;

  int bus(std::string id, double load, double gmin = 0.0, double gmax = 0.0, bool ref = false) {
    buses.push_back(Bus{std::move(id), -1, load, gmin, gmax, ref});
    return static_cast<int>(buses.size()) - 1;
  }
  void line(int from, int to, double b, double limit) {
    branches.push_back(Branch{"L" + std::to_string(branches.size() + 1), from, to, b, limit});
  }
  void substation(std::string id, std::vector<int> members, VoltageClass v, std::optional<GeoPoint> at = std::nullopt) {
    subs.push_back(Substation{std::move(id), std::move(members), v, at});
  }
  GridNetwork build() { return GridNetwork(std::move(buses), std::move(branches), std::move(subs)); }
};

FloodScenario scenario(std::string id, double p, std::vector<int> levels) {
  return FloodScenario{std::move(id), p, std::move(levels)};
}

Fixture tiny3() {
  Builder g;
  const int b1 = g.bus("1", 0.0, 0.0, 3.0, true);
  const int b2 = g.bus("2", 1.0);
  const int b3 = g.bus("3", 1.0);
  g.line(b1, b2, -10.0, 1.5);
  g.line(b2, b3, -10.0, 1.5);
  g.line(b1, b3, -10.0, 1.5);
  g.substation("S1", {b1, b2}, VoltageClass::kV230, GeoPoint{-95.3, 29.7});
  g.substation("S2", {b3}, VoltageClass::kV115_161, GeoPoint{-95.1, 29.6});
  Fixture f{"tiny3", g.build(), {}, 3};
  f.scenarios.level_count = 3;
  f.scenarios.unattainable_level = 3;
  f.scenarios.scenarios = {scenario("w1", 0.5, {0, 1}), scenario("w2", 0.5, {1, 2})};
  return f;
}

Fixture star8() {
  Builder g;
  const int c1 = g.bus("c1", 0.0, 0.0, 4.0, true);
  const int c2 = g.bus("c2", 0.5);
  const int a1 = g.bus("a1", 1.0);
  const int a2 = g.bus("a2", 0.0, 0.0, 1.0);
  const int b1 = g.bus("b1", 1.2);
  const int b2 = g.bus("b2", 0.3);
  const int d1 = g.bus("d1", 0.8);
  const int d2 = g.bus("d2", 0.0, 0.2, 0.6);
  g.line(c1, c2, -20.0, 3.0);
  g.line(c1, a1, -10.0, 0.8);
  g.line(a1, a2, -15.0, 1.0);
  g.line(c1, b1, -10.0, 1.5);
  g.line(b1, b2, -12.0, 0.6);
  g.line(c2, d1, -8.0, 1.0);
  g.line(d1, d2, -10.0, 0.7);
  g.line(a2, b2, -5.0, 0.5);
  g.substation("C", {c1, c2}, VoltageClass::kV500, GeoPoint{-95.4, 29.9});
  g.substation("A", {a1, a2}, VoltageClass::kV230, GeoPoint{-95.0, 29.5});
  g.substation("B", {b1, b2}, VoltageClass::kV115_161, GeoPoint{-95.2, 29.4});
  g.substation("D", {d1, d2}, VoltageClass::kV115_161, GeoPoint{-95.6, 29.6});
  Fixture f{"star8", g.build(), {}, 3};
  f.scenarios.level_count = 4;
  f.scenarios.unattainable_level = 3;
  // Levels ordered C, A, B, D.
  f.scenarios.scenarios = {scenario("w1", 0.4, {0, 1, 2, 0}), scenario("w2", 0.3, {0, 0, 3, 1}),
                           scenario("w3", 0.2, {1, 2, 0, 0}), scenario("w4", 0.1, {0, 3, 1, 2})};
  return f;
}

Fixture ring12() {
  Builder g;
  std::vector<int> ids;
  const double load[6] = {0.0, 0.9, 0.6, 1.1, 0.4, 0.8};
  const double gen[6] = {3.0, 0.0, 1.2, 0.0, 0.8, 0.0};
  for (int s = 0; s < 6; ++s) {
    const std::string tag = std::to_string(s + 1);
    ids.push_back(g.bus("g" + tag, 0.0, 0.0, gen[s], s == 0));
    ids.push_back(g.bus("l" + tag, load[s]));
  }
  for (int s = 0; s < 6; ++s) {
    g.line(ids[static_cast<size_t>(2 * s)], ids[static_cast<size_t>(2 * s + 1)], -25.0, 2.0);
    g.line(ids[static_cast<size_t>(2 * s + 1)], ids[static_cast<size_t>((2 * s + 2) % 12)], -10.0, 0.5 + 0.25 * (s % 3));
  }
  const VoltageClass vc[6] = {VoltageClass::kV500, VoltageClass::kV115_161, VoltageClass::kV230,
                              VoltageClass::kV115_161, VoltageClass::kV230, VoltageClass::kV115_161};
  for (int s = 0; s < 6; ++s) {
    g.substation("R" + std::to_string(s + 1), {ids[static_cast<size_t>(2 * s)], ids[static_cast<size_t>(2 * s + 1)]}, vc[s],
                 GeoPoint{-95.0 - 0.1 * s, 29.5 + 0.05 * s});
  }
  Fixture f{"ring12", g.build(), {}, 3};
  f.scenarios.level_count = 4;
  f.scenarios.unattainable_level = 3;
  f.scenarios.scenarios = {scenario("w1", 0.5, {0, 1, 2, 1, 0, 0}), scenario("w2", 0.3, {0, 0, 1, 2, 2, 1}),
                           scenario("w3", 0.2, {1, 2, 0, 0, 3, 2})};
  return f;
}

Fixture coastal40() {
  const Coastline coast = gulf_coastline();
  std::mt19937_64 rng(40);
  auto u = [&] { return uniform_open(rng()); };
  Builder g;
  const int K = 20;
  std::vector<std::pair<int, int>> pairs;
  for (int k = 0; k < K; ++k) {
    const std::string tag = std::to_string(k + 1);
    const bool generator = k % 4 == 1;
    const double gmax = generator ? 3.0 + 2.0 * u() : 0.0;
    const int first = g.bus("n" + tag + "a", generator ? 0.2 + 0.3 * u() : 0.5 + u(), 0.0, gmax, k == 1);
    const int second = g.bus("n" + tag + "b", 0.3 + 0.7 * u());
    pairs.emplace_back(first, second);
    const double s = (k + 0.5) / K * coast.length_km();
    const GeoPoint site = geo::destination(coast.point_at(s), 315.0, 5.0 + 45.0 * u());
    const VoltageClass vc = k % 5 == 0 ? VoltageClass::kV500 : (k % 3 == 0 ? VoltageClass::kV230 : VoltageClass::kV115_161);
    g.substation("K" + tag, {first, second}, vc, site);
  }
  for (int k = 0; k < K; ++k) g.line(pairs[static_cast<size_t>(k)].first, pairs[static_cast<size_t>(k)].second, -30.0, 3.0);
  for (int k = 0; k + 1 < K; ++k) {
    g.line(pairs[static_cast<size_t>(k)].first, pairs[static_cast<size_t>(k + 1)].first, -10.0 - 10.0 * u(), 1.5 + 1.5 * u());
  }
  for (int k = 0; k + 3 < K; k += 4) {
    g.line(pairs[static_cast<size_t>(k)].second, pairs[static_cast<size_t>(k + 3)].second, -8.0, 1.0 + u());
  }
  Fixture f{"coastal40", g.build(), {}, 3};
  LandfallDistribution dist{coast, 0.4 * coast.length_km(), 89.0};
  InundationKernel kernel;
  kernel.peak_depth_m = 1.8;
  kernel.decay_km = 25.0;
  kernel.track_bearing_deg = 315.0;
  kernel.dry_below_m = 0.1;
  f.scenarios = generate_scenarios(f.network, dist, kernel, DepthThresholds{}, 25, 2017);
  return f;
}

}  // namespace

Coastline gulf_coastline() {
  return Coastline({{-97.40, 26.00}, {-97.30, 27.00}, {-97.00, 27.80}, {-96.50, 28.30},
                    {-95.50, 28.80}, {-94.80, 29.30}, {-93.80, 29.70}});
}

Fixture make_fixture(std::string_view name) {
  if (name == "tiny3") return tiny3();
  if (name == "star8") return star8();
  if (name == "ring12") return ring12();
  if (name == "coastal40") return coastal40();
  throw std::invalid_argument("unknown fixture '" + std::string(name) + "'");
}

std::vector<std::string> fixture_names() { return {"tiny3", "star8", "ring12", "coastal40"}; }

}  // namespace floodsp
