#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <vector>

namespace campus {

// Participant and course identifiers. Ordering is used as the deterministic
// tie-breaker throughout the pipeline.
using Id = std::int64_t;

// UTC seconds. All analysis windows are half-open [start, end).
using Timestamp = std::int64_t;

struct GeoPoint {
  double lat = 0.0;  // degrees WGS84, in [-90, 90]
  double lon = 0.0;  // degrees WGS84, in [-180, 180]
};

// One GPS reading. accuracy_m is the reported accuracy radius; smaller is
// better.
struct LocationFix {
  Id participant = 0;
  Timestamp t = 0;
  GeoPoint point;
  double accuracy_m = 0.0;
};

// One directed Bluetooth sighting: scanner saw seen at time t.
struct ProximityScan {
  Id scanner = 0;
  Id seen = 0;
  Timestamp t = 0;
};

struct ScheduleBlock {
  Id course = 0;
  Timestamp start = 0;
  Timestamp duration_s = 0;
  int week = 1;  // 1-based semester week
  std::optional<GeoPoint> official_location;
};

struct CourseRoster {
  Id course = 0;
  std::set<Id> participants;
  std::vector<ScheduleBlock> blocks;
};

// Danish 7-point scale: -3, 0, 2, 4, 7, 10, 12. When no_show is set the
// student skipped the exam and carries no grade.
struct GradeRecord {
  Id participant = 0;
  Id course = 0;
  int grade = 0;
  bool no_show = false;
};

struct MessageEvent {
  Id sender = 0;
  Id receiver = 0;
  Timestamp t = 0;
};

// Closed polygon ring; the last vertex connects back to the first.
struct CampusBoundary {
  std::vector<GeoPoint> ring;
};

// One slice of a scheduled block, half-open [start, end).
struct TimeBin {
  int index = 0;
  Timestamp start = 0;
  Timestamp end = 0;
};

constexpr std::array<int, 7> kGradeScale{-3, 0, 2, 4, 7, 10, 12};

inline bool valid_grade(int g) {
  for (int v : kGradeScale)
    if (v == g) return true;
  return false;
}

inline bool valid_geo_point(const GeoPoint& p) {
  return p.lat >= -90.0 && p.lat <= 90.0 && p.lon >= -180.0 && p.lon <= 180.0;
}

}  // namespace campus
