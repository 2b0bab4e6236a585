#pragma once

#include "floodsp/grid.hpp"

namespace floodsp::geo {

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kKmPerNmi = 1.852;

/// Great-circle (haversine) distance on the sphere, km.
double haversine_km(GeoPoint a, GeoPoint b);
/// Initial bearing from a to b, degrees clockwise from north in [0, 360).
double initial_bearing_deg(GeoPoint a, GeoPoint b);
/// Point reached from `origin` after `distance_km` along `bearing_deg`.
GeoPoint destination(GeoPoint origin, double bearing_deg, double distance_km);
/// Unsigned distance from p to the great circle through `origin` at `bearing_deg`.
double cross_track_km(GeoPoint p, GeoPoint origin, double bearing_deg);

}  // namespace floodsp::geo
