#include "campus/geo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace campus {

namespace {

constexpr double kPi = 3.14159265358979323846;

double to_rad(double deg) { return deg * kPi / 180.0; }

double median_of(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Does p lie on the segment [a, b]? Exact-ish test in the lat/lon plane.
bool on_segment(const GeoPoint& a, const GeoPoint& b, const GeoPoint& p) {
  const double cross =
      (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon);
  if (std::abs(cross) > 1e-12) return false;
  const double dot =
      (p.lon - a.lon) * (b.lon - a.lon) + (p.lat - a.lat) * (b.lat - a.lat);
  const double len2 =
      (b.lon - a.lon) * (b.lon - a.lon) + (b.lat - a.lat) * (b.lat - a.lat);
  return dot >= 0.0 && dot <= len2;
}

}  // namespace

double haversine_m(const GeoPoint& a, const GeoPoint& b) {
  const double dlat = to_rad(b.lat - a.lat);
  const double dlon = to_rad(b.lon - a.lon);
  const double s_lat = std::sin(dlat / 2.0);
  const double s_lon = std::sin(dlon / 2.0);
  double h = s_lat * s_lat +
             s_lon * s_lon * std::cos(to_rad(a.lat)) * std::cos(to_rad(b.lat));
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusM * std::atan2(std::sqrt(h), std::sqrt(1.0 - h));
}

GeoPoint componentwise_median(std::span<const GeoPoint> points) {
  if (points.empty())
    throw std::invalid_argument("componentwise_median: empty point list");
  std::vector<double> lats, lons;
  lats.reserve(points.size());
  lons.reserve(points.size());
  for (const GeoPoint& p : points) {
    lats.push_back(p.lat);
    lons.push_back(p.lon);
  }
  return GeoPoint{median_of(lats), median_of(lons)};
}

bool contains(const CampusBoundary& boundary, const GeoPoint& p) {
  const auto& ring = boundary.ring;
  const std::size_t n = ring.size();
  if (n < 3) return false;

  for (std::size_t i = 0; i < n; ++i) {
    if (on_segment(ring[i], ring[(i + 1) % n], p)) return true;
  }

  // Crossing-number test, treating lon as x and lat as y.
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const GeoPoint& a = ring[i];
    const GeoPoint& b = ring[j];
    if ((a.lat > p.lat) != (b.lat > p.lat)) {
      const double x_cross =
          a.lon + (p.lat - a.lat) / (b.lat - a.lat) * (b.lon - a.lon);
      if (p.lon < x_cross) inside = !inside;
    }
  }
  return inside;
}

}  // namespace campus
