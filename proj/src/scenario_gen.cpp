#include "floodsp/scenario_gen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

#include "floodsp/geo.hpp"

namespace floodsp {

using nlohmann::json;

Coastline::Coastline(std::vector<GeoPoint> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 2) throw std::invalid_argument("coastline: need at least two vertices");
  cumulative_.push_back(0.0);
  for (size_t i = 1; i < vertices_.size(); ++i) {
    const double seg = geo::haversine_km(vertices_[i - 1], vertices_[i]);
    if (seg == 0.0) throw std::invalid_argument("coastline: consecutive vertices coincide");
    cumulative_.push_back(cumulative_.back() + seg);
  }
}

GeoPoint Coastline::point_at(double s_km) const {
  const double s = std::clamp(s_km, 0.0, length_km());
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  size_t i = static_cast<size_t>(it - cumulative_.begin());
  if (i >= cumulative_.size()) i = cumulative_.size() - 1;
  if (i == 0) i = 1;
  const double t = (s - cumulative_[i - 1]) / (cumulative_[i] - cumulative_[i - 1]);
  const auto& a = vertices_[i - 1];
  const auto& b = vertices_[i];
  return GeoPoint{a.lon + t * (b.lon - a.lon), a.lat + t * (b.lat - a.lat)};
}

Coastline coastline_from_json(const json& doc) {
  for (const auto& [key, value] : doc.items()) {
    if (key != "vertices") throw std::invalid_argument("coastline: unknown key '" + key + "'");
  }
  std::vector<GeoPoint> pts;
  for (const auto& v : doc.at("vertices")) {
    if (!v.is_array() || v.size() != 2) throw std::invalid_argument("coastline: vertices are [lon, lat] pairs");
    pts.push_back(GeoPoint{v[0].get<double>(), v[1].get<double>()});
  }
  return Coastline(std::move(pts));
}

Coastline load_coastline(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open coastline file " + path.string());
  return coastline_from_json(json::parse(in));
}

double InundationKernel::depth(double distance_km) const {
  const double d = peak_depth_m * std::exp2(-distance_km / decay_km);
  return d < dry_below_m ? 0.0 : d;
}

double sigma_from_cone(double cone_radius) {
  if (!(cone_radius > 0.0)) throw std::invalid_argument("sigma_from_cone: radius must be positive");
  static const double z = boost::math::quantile(boost::math::normal(), 5.0 / 6.0);
  return cone_radius / z;
}

double uniform_open(std::uint64_t bits) { return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52; }

namespace {

double landfall_at(const LandfallDistribution& dist, double u) {
  const double sigma_km = sigma_from_cone(dist.cone_radius_nmi) * geo::kKmPerNmi;
  // (i + u) / count can round onto an endpoint.
  const double v = std::clamp(u, std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0));
  const double s = dist.mean_km + sigma_km * boost::math::quantile(boost::math::normal(), v);
  return std::clamp(s, 0.0, dist.coastline.length_km());
}

void check_distribution(const LandfallDistribution& dist, int count) {
  if (count < 1) throw std::invalid_argument("landfall sampling: count must be >= 1");
  if (!(dist.cone_radius_nmi > 0.0)) throw std::invalid_argument("landfall sampling: cone radius must be positive");
  if (dist.mean_km < 0.0 || dist.mean_km > dist.coastline.length_km())
    throw std::invalid_argument("landfall sampling: mean lies outside the coastline");
}

}  // namespace

std::vector<double> stratified_landfalls(const LandfallDistribution& dist, int count, std::uint64_t seed) {
  check_distribution(dist, count);
  std::mt19937_64 rng(seed);
  std::vector<double> out;
  out.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(landfall_at(dist, (i + uniform_open(rng())) / count));
  return out;
}

std::vector<double> sample_landfalls(const LandfallDistribution& dist, int count, std::uint64_t seed) {
  check_distribution(dist, count);
  std::mt19937_64 rng(seed);
  std::vector<double> out;
  out.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(landfall_at(dist, uniform_open(rng())));
  return out;
}

FloodScenarioSet generate_scenarios(const GridNetwork& network, const LandfallDistribution& dist,
                                    const InundationKernel& kernel, const DepthThresholds& thresholds, int count,
                                    std::uint64_t seed) {
  thresholds.check();
  if (kernel.peak_depth_m < 0.0) throw std::invalid_argument("kernel: negative peak depth");
  if (!(kernel.decay_km > 0.0)) throw std::invalid_argument("kernel: decay distance must be positive");
  if (kernel.dry_below_m < 0.0) throw std::invalid_argument("kernel: negative dry cutoff");
  for (const auto& s : network.substations()) {
    if (!s.location) throw std::invalid_argument("generate_scenarios: substation " + s.id + " has no coordinates");
  }
  const auto landfalls = stratified_landfalls(dist, count, seed);
  FloodScenarioSet set;
  set.level_count = static_cast<int>(thresholds.heights.size()) + 1;
  set.unattainable_level = static_cast<int>(thresholds.heights.size());
  const int width = count >= 100 ? 3 : 2;
  for (int i = 0; i < count; ++i) {
    FloodScenario sc;
    char id[32];
    std::snprintf(id, sizeof id, "landfall-%0*d", width, i + 1);
    sc.id = id;
    sc.probability = 1.0 / count;
    const GeoPoint origin = dist.coastline.point_at(landfalls[static_cast<size_t>(i)]);
    for (const auto& s : network.substations()) {
      const double d = geo::cross_track_km(*s.location, origin, kernel.track_bearing_deg);
      sc.levels.push_back(depth_to_level(kernel.depth(d), thresholds));
    }
    set.scenarios.push_back(std::move(sc));
  }
  return set;
}

}  // namespace floodsp
