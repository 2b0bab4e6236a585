#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "floodsp/grid.hpp"
#include "floodsp/scenario.hpp"

namespace floodsp {

/// Piecewise-linear coastline parametrized by great-circle arc length (km).
class Coastline {
 public:
  Coastline() = default;
  explicit Coastline(std::vector<GeoPoint> vertices);

  [[nodiscard]] const std::vector<GeoPoint>& vertices() const { return vertices_; }
  [[nodiscard]] double length_km() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  /// Point at arc length s, clamped to [0, length].
  [[nodiscard]] GeoPoint point_at(double s_km) const;

 private:
  std::vector<GeoPoint> vertices_;
  std::vector<double> cumulative_;
};

Coastline coastline_from_json(const nlohmann::json& doc);
Coastline load_coastline(const std::filesystem::path& path);

/// Landfall position along the coast ~ Normal(mean_km, sigma), clamped.
struct LandfallDistribution {
  Coastline coastline;
  double mean_km = 0.0;
  double cone_radius_nmi = 89.0;
};

/// Surrogate inundation: depth = peak * 2^(-d / decay_km), d the distance
/// from a site to the straight storm track through the landfall point.
/// Stands in for a hydrologic model; it is not one. Depths below
/// dry_below_m are reported as 0 (the tail never reaches exactly zero).
struct InundationKernel {
  double peak_depth_m = 1.5;
  double decay_km = 40.0;
  double track_bearing_deg = 315.0;
  double dry_below_m = 0.0;

  [[nodiscard]] double depth(double distance_km) const;
};

/// sigma with P(|Z| <= radius) = 2/3 for Z ~ N(0, sigma^2).
double sigma_from_cone(double cone_radius);

/// Uniform draw in (0, 1) from the top 52 bits of a 64-bit Mersenne Twister
/// output, offset by half a step so neither endpoint is reachable.
double uniform_open(std::uint64_t bits);

/// One landfall per equal-probability stratum (i/count, (i+1)/count), drawn
/// uniformly within the stratum; arc-length km in stratum order.
std::vector<double> stratified_landfalls(const LandfallDistribution& dist, int count, std::uint64_t seed);
/// Plain Monte Carlo landfalls (arc-length km, clamped).
std::vector<double> sample_landfalls(const LandfallDistribution& dist, int count, std::uint64_t seed);

/// Equiprobable scenario set from stratified landfalls. Uses
/// level_count = thresholds + 1 and unattainable_level = thresholds.
FloodScenarioSet generate_scenarios(const GridNetwork& network, const LandfallDistribution& dist,
                                    const InundationKernel& kernel, const DepthThresholds& thresholds, int count,
                                    std::uint64_t seed);

}  // namespace floodsp
