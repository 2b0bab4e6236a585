#include <doctest.h>

#include <algorithm>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "floodsp/geo.hpp"
#include "floodsp/geo_remap.hpp"

using namespace floodsp;
using namespace floodsp::remap;

namespace {

// Minimum over all injections rows -> columns.
double brute_force_assignment(const std::vector<std::vector<double>>& cost) {
  const size_t na = cost.size(), nb = cost.front().size();
  std::vector<int> cols(nb);
  for (size_t b = 0; b < nb; ++b) cols[b] = static_cast<int>(b);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (size_t a = 0; a < na; ++a) total += cost[a][static_cast<size_t>(cols[a])];
    best = std::min(best, total);
  } while (std::next_permutation(cols.begin(), cols.end()));
  return best;
}

std::vector<std::vector<double>> random_costs(std::mt19937_64& rng, int na, int nb) {
  std::uniform_int_distribution<int> d(0, 40);
  std::vector<std::vector<double>> c(static_cast<size_t>(na), std::vector<double>(static_cast<size_t>(nb)));
  for (auto& row : c) {
    for (auto& v : row) v = d(rng);
  }
  return c;
}

}  // namespace

TEST_CASE("great-circle distances") {
  CHECK(distance_km({10.0, 20.0}, {10.0, 20.0}) == 0.0);
  CHECK(distance_km({0.0, 0.0}, {180.0, 0.0}) == doctest::Approx(std::numbers::pi * geo::kEarthRadiusKm));
  CHECK(distance_km({-95.0, 29.0}, {-95.0, 30.0}) == doctest::Approx(111.19).epsilon(1e-4));
  CHECK(distance_km({0.0, 90.0}, {123.0, 90.0}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(distance_km({0.0, 91.0}, {0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(distance_km({0.0, std::numeric_limits<double>::quiet_NaN()}, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("assignment LP is integral and optimal on random instances") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 40; ++trial) {
    const int na = trial % 2 ? 3 : 5;
    const int nb = trial % 2 ? 4 : 7;
    const auto cost = random_costs(rng, na, nb);
    const auto a = assign(cost);
    CHECK(a.max_fractionality <= 1e-9);
    CHECK(a.total == brute_force_assignment(cost));
    std::vector<int> sorted = a.target;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
    CHECK(a.total <= greedy_nearest(cost).total);
  }
}

TEST_CASE("greedy nearest can be beaten") {
  const std::vector<std::vector<double>> cost{{1.0, 2.0}, {1.0, 10.0}};
  CHECK(greedy_nearest(cost).total == 11.0);
  const auto a = assign(cost);
  CHECK(a.total == 3.0);
  CHECK(a.target == std::vector<int>{1, 0});
}

TEST_CASE("assignment rejects impossible shapes") {
  CHECK_THROWS_AS(assign({{1.0}, {2.0}}), std::invalid_argument);
  CHECK_THROWS_AS(assign({{1.0, 2.0}, {1.0}}), std::invalid_argument);
  CHECK(assign({}).target.empty());
}

TEST_CASE("remap maps point sets and writes a mapping file") {
  std::istringstream from_csv("id,lon,lat\nA,-95.0,29.0\n\"B, north\",-95.0,30.0\n");
  std::istringstream to_csv("lat,lon,id\n30.01,-95.0,y\n29.01,-95.0,x\n45.0,-80.0,z\n");
  const auto from = read_points_csv(from_csv);
  const auto to = read_points_csv(to_csv);
  REQUIRE(from.size() == 2);
  CHECK(from[1].id == "B, north");
  CHECK(to[0].point.lat == 30.01);
  const auto a = remap::remap(from, to);
  CHECK(a.target == std::vector<int>{1, 0});
  std::ostringstream out;
  write_mapping_csv(out, from, to, a);
  CHECK(out.str().rfind("from_id,to_id,distance_km\nA,x,", 0) == 0);
  CHECK(out.str().find("\nB, north,y,") != std::string::npos);
  CHECK_THROWS(remap::remap(to, from));
}

TEST_CASE("point CSV errors name the line") {
  std::istringstream no_header("name,x,y\n");
  CHECK_THROWS_WITH(read_points_csv(no_header), doctest::Contains("header"));
  std::istringstream bad("id,lon,lat\nA,1.0,abc\n");
  CHECK_THROWS_WITH(read_points_csv(bad), doctest::Contains("line 2"));
  std::istringstream short_row("id,lon,lat\nA,1.0\n");
  CHECK_THROWS_WITH(read_points_csv(short_row), doctest::Contains("too few"));
  std::istringstream polar("id,lon,lat\nA,1.0,95\n");
  CHECK_THROWS_AS(read_points_csv(polar), std::invalid_argument);
  std::istringstream empty("");
  CHECK_THROWS(read_points_csv(empty));
  CHECK_THROWS(load_points_csv("/nonexistent/points.csv"));
}
