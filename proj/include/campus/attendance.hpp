#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "campus/dataset.hpp"
#include "campus/proximity.hpp"
#include "campus/types.hpp"

namespace campus {

// One (course, block, bin) location estimate. location is absent when no
// cluster formed or the median fell outside campus.
struct BinLocationEstimate {
  Id course = 0;
  Timestamp block_start = 0;
  int week = 1;
  TimeBin bin;
  std::optional<GeoPoint> location;
  std::optional<PrimaryCluster> cluster;
};

// Per (participant, block) attendance counts. A bin enters estimated_bins
// only when its class location was accepted; attended_bins counts the subset
// where the participant was assigned to the class.
struct AttendanceEntry {
  Id participant = 0;
  Id course = 0;
  Timestamp block_start = 0;
  int week = 1;
  int attended_bins = 0;
  int estimated_bins = 0;

  double fraction() const {
    return static_cast<double>(attended_bins) / estimated_bins;
  }
};

struct AttendanceMatrix {
  // Sorted by (participant, course, block_start).
  std::vector<AttendanceEntry> entries;

  // Per-participant mean of session fractions, equal weight per block.
  std::map<Id, double> term_means() const;
  // Per (participant, course) mean of session fractions.
  std::map<std::pair<Id, Id>, double> course_means() const;
  // Per (participant, week) mean of session fractions.
  std::map<std::pair<Id, int>, double> weekly_means() const;
};

struct AccuracyReport {
  std::vector<double> distances_m;  // sorted ascending
  // (distance, cumulative fraction), one step per estimate.
  std::vector<std::pair<double, double>> cdf;
  double frac_within_50 = 0.0;
  double frac_within_100 = 0.0;
  double frac_within_200 = 0.0;
};

struct AttendanceOptions {
  Timestamp bin_width_s = 900;
  double radius_m = 200.0;
  std::size_t min_cluster_size = 2;
};

// Attendee sets of accepted bins, kept for ground-truth scoring.
struct BinAttendance {
  Id course = 0;
  Timestamp block_start = 0;
  int bin_index = 0;
  std::vector<Id> attendees;  // sorted
};

struct AttendanceResult {
  std::vector<BinLocationEstimate> estimates;
  std::vector<BinAttendance> bin_attendance;
  AttendanceMatrix matrix;
};

// Median of the cluster members' best-accuracy fixes within the bin.
// Accuracy ties resolve to the earliest fix. Returns nothing when no member
// has a fix in the bin or the median falls outside campus.
std::optional<GeoPoint> estimate_bin_location(const PrimaryCluster& cluster,
                                              std::span<const LocationFix> fixes,
                                              const TimeBin& bin,
                                              const CampusBoundary& campus);

// Cluster members attend automatically; other roster members attend when
// their best-accuracy fix in the bin is within radius_m of the estimate.
std::vector<Id> assign_attendance(const GeoPoint& estimate,
                                  const PrimaryCluster& cluster,
                                  std::span<const LocationFix> fixes,
                                  const std::set<Id>& roster,
                                  const TimeBin& bin, double radius_m);

// Full per-bin sweep over all blocks of the given rosters. Expects rosters
// already passed through filter_courses. Fixes and scans need not be sorted.
AttendanceResult run_attendance(const Dataset& ds,
                                const AttendanceOptions& opts);

AttendanceMatrix build_attendance_matrix(const Dataset& ds,
                                         const AttendanceOptions& opts);

// Distance of each accepted estimate to its block's official location.
// Throws when no estimate overlaps a block with an official location.
AccuracyReport evaluate_accuracy(std::span<const BinLocationEstimate> estimates,
                                 std::span<const CourseRoster> rosters);

}  // namespace campus
