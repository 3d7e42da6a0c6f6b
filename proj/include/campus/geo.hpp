#pragma once

#include <span>

#include "campus/types.hpp"

namespace campus {

// Mean Earth radius used for all great-circle distances.
constexpr double kEarthRadiusM = 6'371'000.0;

// Great-circle distance in meters between two WGS84 points.
double haversine_m(const GeoPoint& a, const GeoPoint& b);

// Componentwise median: median latitude and median longitude taken
// independently. Even counts average the two middle values. Throws on an
// empty input.
GeoPoint componentwise_median(std::span<const GeoPoint> points);

// Ray-casting containment in the lat/lon plane. Points on an edge or vertex
// of the ring count as inside.
bool contains(const CampusBoundary& boundary, const GeoPoint& p);

}  // namespace campus
