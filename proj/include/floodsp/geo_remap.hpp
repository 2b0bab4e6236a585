#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "floodsp/grid.hpp"
#include "floodsp/lp.hpp"

namespace floodsp::remap {

struct LabeledPoint {
  std::string id;
  GeoPoint point;
};

/// Great-circle distance in km. Throws std::invalid_argument for latitudes
/// outside [-90, 90] or non-finite coordinates.
double distance_km(GeoPoint a, GeoPoint b);

struct Assignment {
  /// Index into the target set for every source point.
  std::vector<int> target;
  std::vector<double> distance;
  double total = 0.0;
  /// Largest min(x, 1 - x) over the LP solution.
  double max_fractionality = 0.0;
  long lp_iterations = 0;
};

/// Minimum-cost injection of rows into columns of `cost` (rows <= columns),
/// solved as the LP relaxation of the assignment problem. Throws
/// std::invalid_argument when there are more rows than columns and
/// std::runtime_error if the LP fails or returns a fractional point.
Assignment assign(const std::vector<std::vector<double>>& cost, const lp::LpOptions& options = {});

/// Maps every point of `from` to a distinct point of `to`, minimizing total distance.
Assignment remap(const std::vector<LabeledPoint>& from, const std::vector<LabeledPoint>& to,
                 const lp::LpOptions& options = {});

/// Each source in order takes its nearest unused target.
Assignment greedy_nearest(const std::vector<std::vector<double>>& cost);

/// CSV with header `id,lon,lat`.
std::vector<LabeledPoint> read_points_csv(std::istream& in);
std::vector<LabeledPoint> load_points_csv(const std::string& path);
/// CSV with header `from_id,to_id,distance_km`.
void write_mapping_csv(std::ostream& out, const std::vector<LabeledPoint>& from, const std::vector<LabeledPoint>& to,
                       const Assignment& assignment);

}  // namespace floodsp::remap
