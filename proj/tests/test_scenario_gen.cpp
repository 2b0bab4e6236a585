#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include "floodsp/fixtures.hpp"
#include "floodsp/geo.hpp"
#include "floodsp/scenario_gen.hpp"

using namespace floodsp;

namespace {

// Solves erf(radius / (sigma sqrt 2)) = 2/3 for sigma by bisection.
double sigma_by_bisection(double radius) {
  double lo = radius * 1e-3, hi = radius * 1e3;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double mass = std::erf(radius / (mid * std::numbers::sqrt2));
    (mass > 2.0 / 3.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

Coastline equator(double lon_span) { return Coastline({{0.0, 0.0}, {lon_span / 2, 0.0}, {lon_span, 0.0}}); }

}  // namespace

TEST_CASE("cone radius to sigma matches a bisection oracle") {
  for (double r : {1.0, 50.0, 89.0, 250.0}) {
    CAPTURE(r);
    CHECK(sigma_from_cone(r) == doctest::Approx(sigma_by_bisection(r)).epsilon(1e-10));
  }
  CHECK_THROWS(sigma_from_cone(0.0));
}

TEST_CASE("uniform_open never returns an endpoint") {
  CHECK(uniform_open(0) > 0.0);
  CHECK(uniform_open(std::numeric_limits<std::uint64_t>::max()) < 1.0);
  CHECK(uniform_open(std::uint64_t{1} << 63) == doctest::Approx(0.5));
}

TEST_CASE("coastline arc length parametrization") {
  const auto coast = equator(10.0);
  const double expected = geo::kEarthRadiusKm * 10.0 * std::numbers::pi / 180.0;
  CHECK(coast.length_km() == doctest::Approx(expected));
  CHECK(coast.point_at(expected / 4).lon == doctest::Approx(2.5));
  CHECK(coast.point_at(-5.0).lon == 0.0);
  CHECK(coast.point_at(1e9).lon == 10.0);
  CHECK_THROWS(Coastline({{0.0, 0.0}}));
  CHECK_THROWS(Coastline({{0.0, 0.0}, {0.0, 0.0}}));
  CHECK_THROWS(coastline_from_json(nlohmann::json::parse(R"({"vertices": [[0, 0], [1]]})")));
  CHECK(coastline_from_json(nlohmann::json::parse(R"({"vertices": [[0, 0], [1, 0]]})")).vertices().size() == 2);
}

TEST_CASE("inundation kernel halves every decay length") {
  InundationKernel k;
  k.peak_depth_m = 2.0;
  k.decay_km = 30.0;
  CHECK(k.depth(0.0) == 2.0);
  CHECK(k.depth(30.0) == doctest::Approx(1.0));
  CHECK(k.depth(90.0) == doctest::Approx(0.25));
  CHECK(k.depth(1e4) > 0.0);
  k.dry_below_m = 0.3;
  CHECK(k.depth(90.0) == 0.0);
  CHECK(k.depth(30.0) == doctest::Approx(1.0));
}

TEST_CASE("stratified landfalls put one draw in each probability stratum") {
  const LandfallDistribution dist{equator(40.0), 2200.0, 89.0};
  const double sigma_km = sigma_by_bisection(89.0) * geo::kKmPerNmi;
  for (int count : {1, 7, 25}) {
    const auto s = stratified_landfalls(dist, count, 99);
    REQUIRE(s.size() == static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
      const double u = normal_cdf((s[static_cast<size_t>(i)] - dist.mean_km) / sigma_km);
      CHECK(u > static_cast<double>(i) / count - 1e-9);
      CHECK(u < static_cast<double>(i + 1) / count + 1e-9);
    }
  }
}

TEST_CASE("sampling is deterministic in the seed and clamped to the coast") {
  const LandfallDistribution dist{equator(2.0), 10.0, 89.0};
  const auto a = sample_landfalls(dist, 200, 5);
  CHECK(a == sample_landfalls(dist, 200, 5));
  CHECK(a != sample_landfalls(dist, 200, 6));
  for (double s : a) {
    CHECK(s >= 0.0);
    CHECK(s <= dist.coastline.length_km());
  }
  CHECK_THROWS(sample_landfalls(dist, 0, 1));
  CHECK_THROWS(sample_landfalls(LandfallDistribution{equator(2.0), -1.0, 89.0}, 3, 1));
}

TEST_CASE("generated scenarios follow the kernel and thresholds") {
  // Substations on the meridian through the landfall point, north of the coast.
  std::vector<Bus> buses;
  std::vector<Substation> subs;
  for (int k = 0; k < 3; ++k) {
    buses.push_back({"b" + std::to_string(k), -1, 0.0, 0.0, k == 0 ? 1.0 : 0.0, k == 0});
    subs.push_back({"S" + std::to_string(k), {k}, VoltageClass::kV230, GeoPoint{1.0 + 0.3 * k, 0.1}});
  }
  const GridNetwork net(buses, {{"e1", 0, 1, -1.0, 1.0}, {"e2", 1, 2, -1.0, 1.0}}, subs);
  const LandfallDistribution dist{equator(2.0), 111.0, 10.0};
  InundationKernel kernel;
  kernel.track_bearing_deg = 0.0;
  kernel.peak_depth_m = 1.5;
  kernel.decay_km = 20.0;
  const auto set = generate_scenarios(net, dist, kernel, DepthThresholds{}, 5, 2017);
  CHECK(set.level_count == 4);
  CHECK(set.unattainable_level == 3);
  REQUIRE(set.size() == 5);
  CHECK(set.scenarios[0].id == "landfall-01");
  const auto falls = stratified_landfalls(dist, 5, 2017);
  for (int i = 0; i < 5; ++i) {
    const auto& sc = set.scenarios[static_cast<size_t>(i)];
    CHECK(sc.probability == doctest::Approx(0.2));
    const GeoPoint origin = dist.coastline.point_at(falls[static_cast<size_t>(i)]);
    for (int k = 0; k < 3; ++k) {
      // Distance to the meridian through the landfall point.
      const auto& at = *subs[static_cast<size_t>(k)].location;
      const double rad = std::numbers::pi / 180.0;
      const double d = geo::kEarthRadiusKm * std::asin(std::cos(at.lat * rad) * std::abs(std::sin((at.lon - origin.lon) * rad)));
      CHECK(sc.levels[static_cast<size_t>(k)] == depth_to_level(kernel.depth(d), DepthThresholds{}));
    }
  }
  CHECK(generate_scenarios(net, dist, kernel, DepthThresholds{}, 5, 2017).scenarios[3].levels == set.scenarios[3].levels);
}

TEST_CASE("scenario generation rejects bad inputs") {
  const auto fx = make_fixture("tiny3");
  const LandfallDistribution dist{equator(2.0), 100.0, 89.0};
  InundationKernel kernel;
  kernel.decay_km = 0.0;
  CHECK_THROWS(generate_scenarios(fx.network, dist, kernel, DepthThresholds{}, 3, 1));
  const GridNetwork bare({{"a", -1, 0.0, 0.0, 1.0, true}}, {}, {{"S", {0}, VoltageClass::kV230, {}}});
  CHECK_THROWS_WITH(generate_scenarios(bare, dist, InundationKernel{}, DepthThresholds{}, 3, 1),
                    doctest::Contains("no coordinates"));
}

TEST_CASE("coastal40 scenarios are reproducible") {
  const auto a = make_fixture("coastal40");
  const auto b = make_fixture("coastal40");
  REQUIRE(a.scenarios.size() == 25);
  for (int i = 0; i < 25; ++i) CHECK(a.scenarios.scenarios[static_cast<size_t>(i)].levels == b.scenarios.scenarios[static_cast<size_t>(i)].levels);
}
