#include "floodsp/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace floodsp::geo {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

}  // namespace

double haversine_km(GeoPoint a, GeoPoint b) {
  const double phi1 = a.lat * kDeg, phi2 = b.lat * kDeg;
  const double dphi = phi2 - phi1, dlam = (b.lon - a.lon) * kDeg;
  const double h = std::sin(dphi / 2) * std::sin(dphi / 2) + std::cos(phi1) * std::cos(phi2) * std::sin(dlam / 2) * std::sin(dlam / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

double initial_bearing_deg(GeoPoint a, GeoPoint b) {
  const double phi1 = a.lat * kDeg, phi2 = b.lat * kDeg, dlam = (b.lon - a.lon) * kDeg;
  const double y = std::sin(dlam) * std::cos(phi2);
  const double x = std::cos(phi1) * std::sin(phi2) - std::sin(phi1) * std::cos(phi2) * std::cos(dlam);
  const double deg = std::atan2(y, x) / kDeg;
  return std::fmod(deg + 360.0, 360.0);
}

GeoPoint destination(GeoPoint origin, double bearing_deg, double distance_km) {
  const double d = distance_km / kEarthRadiusKm, th = bearing_deg * kDeg;
  const double phi1 = origin.lat * kDeg, lam1 = origin.lon * kDeg;
  const double phi2 = std::asin(std::sin(phi1) * std::cos(d) + std::cos(phi1) * std::sin(d) * std::cos(th));
  const double lam2 = lam1 + std::atan2(std::sin(th) * std::sin(d) * std::cos(phi1), std::cos(d) - std::sin(phi1) * std::sin(phi2));
  return GeoPoint{std::remainder(lam2 / kDeg, 360.0), phi2 / kDeg};
}

double cross_track_km(GeoPoint p, GeoPoint origin, double bearing_deg) {
  const double d13 = haversine_km(origin, p) / kEarthRadiusKm;
  if (d13 == 0.0) return 0.0;
  const double th13 = initial_bearing_deg(origin, p) * kDeg;
  const double s = std::sin(d13) * std::sin(th13 - bearing_deg * kDeg);
  return std::abs(std::asin(std::clamp(s, -1.0, 1.0))) * kEarthRadiusKm;
}

}  // namespace floodsp::geo
