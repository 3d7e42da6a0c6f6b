#include "campus/attendance.hpp"

#include <algorithm>
#include <stdexcept>

#include "campus/csv.hpp"
#include "campus/geo.hpp"

namespace campus {

namespace {

// Preference order for the representative fix: best (smallest) accuracy,
// then earliest, then coordinates for full determinism.
bool better_fix(const LocationFix& a, const LocationFix& b) {
  if (a.accuracy_m != b.accuracy_m) return a.accuracy_m < b.accuracy_m;
  if (a.t != b.t) return a.t < b.t;
  if (a.point.lat != b.point.lat) return a.point.lat < b.point.lat;
  return a.point.lon < b.point.lon;
}

// Best fix per participant among fixes with t in the bin and participant in
// the filter set (or any participant when filter is null).
std::map<Id, LocationFix> best_fixes_in_bin(std::span<const LocationFix> fixes,
                                            const TimeBin& bin,
                                            const std::set<Id>* filter) {
  std::map<Id, LocationFix> best;
  for (const LocationFix& f : fixes) {
    if (f.t < bin.start || f.t >= bin.end) continue;
    if (filter && !filter->count(f.participant)) continue;
    auto [it, inserted] = best.emplace(f.participant, f);
    if (!inserted && better_fix(f, it->second)) it->second = f;
  }
  return best;
}

struct TimeOrder {
  bool operator()(const LocationFix& a, const LocationFix& b) const {
    return a.t < b.t;
  }
  bool operator()(const ProximityScan& a, const ProximityScan& b) const {
    return a.t < b.t;
  }
};

template <typename T>
std::span<const T> time_range(const std::vector<T>& sorted, Timestamp start,
                              Timestamp end) {
  const auto lo = std::lower_bound(
      sorted.begin(), sorted.end(), start,
      [](const T& rec, Timestamp t) { return rec.t < t; });
  const auto hi = std::lower_bound(
      lo, sorted.end(), end,
      [](const T& rec, Timestamp t) { return rec.t < t; });
  return {std::to_address(lo), static_cast<std::size_t>(hi - lo)};
}

}  // namespace

std::map<Id, double> AttendanceMatrix::term_means() const {
  std::map<Id, std::pair<double, int>> acc;
  for (const AttendanceEntry& e : entries) {
    auto& [sum, n] = acc[e.participant];
    sum += e.fraction();
    ++n;
  }
  std::map<Id, double> means;
  for (const auto& [id, sn] : acc) means[id] = sn.first / sn.second;
  return means;
}

std::map<std::pair<Id, Id>, double> AttendanceMatrix::course_means() const {
  std::map<std::pair<Id, Id>, std::pair<double, int>> acc;
  for (const AttendanceEntry& e : entries) {
    auto& [sum, n] = acc[{e.participant, e.course}];
    sum += e.fraction();
    ++n;
  }
  std::map<std::pair<Id, Id>, double> means;
  for (const auto& [key, sn] : acc) means[key] = sn.first / sn.second;
  return means;
}

std::map<std::pair<Id, int>, double> AttendanceMatrix::weekly_means() const {
  std::map<std::pair<Id, int>, std::pair<double, int>> acc;
  for (const AttendanceEntry& e : entries) {
    auto& [sum, n] = acc[{e.participant, e.week}];
    sum += e.fraction();
    ++n;
  }
  std::map<std::pair<Id, int>, double> means;
  for (const auto& [key, sn] : acc) means[key] = sn.first / sn.second;
  return means;
}

std::optional<GeoPoint> estimate_bin_location(const PrimaryCluster& cluster,
                                              std::span<const LocationFix> fixes,
                                              const TimeBin& bin,
                                              const CampusBoundary& campus) {
  if (cluster.members.empty())
    throw std::invalid_argument("estimate_bin_location: empty cluster");
  const auto best = best_fixes_in_bin(fixes, bin, &cluster.members);
  if (best.empty()) return std::nullopt;
  std::vector<GeoPoint> points;
  points.reserve(best.size());
  for (const auto& [id, fix] : best) points.push_back(fix.point);
  const GeoPoint median = componentwise_median(points);
  if (!contains(campus, median)) return std::nullopt;
  return median;
}

std::vector<Id> assign_attendance(const GeoPoint& estimate,
                                  const PrimaryCluster& cluster,
                                  std::span<const LocationFix> fixes,
                                  const std::set<Id>& roster,
                                  const TimeBin& bin, double radius_m) {
  if (!(radius_m > 0))
    throw std::invalid_argument("assign_attendance: radius must be positive");
  std::set<Id> attendees = cluster.members;
  for (const auto& [id, fix] : best_fixes_in_bin(fixes, bin, &roster)) {
    if (attendees.count(id)) continue;
    if (haversine_m(fix.point, estimate) <= radius_m) attendees.insert(id);
  }
  return {attendees.begin(), attendees.end()};
}

AttendanceResult run_attendance(const Dataset& ds,
                                const AttendanceOptions& opts) {
  AttendanceResult result;

  std::vector<LocationFix> fixes = ds.fixes;
  if (!std::is_sorted(fixes.begin(), fixes.end(), TimeOrder{}))
    std::stable_sort(fixes.begin(), fixes.end(), TimeOrder{});
  std::vector<ProximityScan> scans = ds.scans;
  if (!std::is_sorted(scans.begin(), scans.end(), TimeOrder{}))
    std::stable_sort(scans.begin(), scans.end(), TimeOrder{});

  for (const CourseRoster& roster : ds.rosters) {
    for (const ScheduleBlock& block : roster.blocks) {
      const std::vector<TimeBin> bins = bin_schedule(block, opts.bin_width_s);
      int accepted = 0;
      std::map<Id, int> attended;
      for (const TimeBin& bin : bins) {
        BinLocationEstimate est;
        est.course = roster.course;
        est.block_start = block.start;
        est.week = block.week;
        est.bin = bin;

        const auto bin_scans = time_range(scans, bin.start, bin.end);
        const ProximityGraph graph =
            build_graph(bin_scans, roster.participants, bin);
        auto cluster = primary_cluster(graph);
        if (cluster && cluster->members.size() >= opts.min_cluster_size) {
          const auto bin_fixes = time_range(fixes, bin.start, bin.end);
          est.location =
              estimate_bin_location(*cluster, bin_fixes, bin, ds.campus);
          est.cluster = std::move(cluster);
          if (est.location) {
            ++accepted;
            BinAttendance ba;
            ba.course = roster.course;
            ba.block_start = block.start;
            ba.bin_index = bin.index;
            ba.attendees =
                assign_attendance(*est.location, *est.cluster, bin_fixes,
                                  roster.participants, bin, opts.radius_m);
            for (Id id : ba.attendees) ++attended[id];
            result.bin_attendance.push_back(std::move(ba));
          }
        }
        result.estimates.push_back(std::move(est));
      }
      if (accepted == 0) continue;  // block absent from the matrix
      for (Id participant : roster.participants) {
        AttendanceEntry e;
        e.participant = participant;
        e.course = roster.course;
        e.block_start = block.start;
        e.week = block.week;
        e.estimated_bins = accepted;
        auto it = attended.find(participant);
        e.attended_bins = it == attended.end() ? 0 : it->second;
        result.matrix.entries.push_back(e);
      }
    }
  }

  std::sort(result.matrix.entries.begin(), result.matrix.entries.end(),
            [](const AttendanceEntry& a, const AttendanceEntry& b) {
              return std::tie(a.participant, a.course, a.block_start) <
                     std::tie(b.participant, b.course, b.block_start);
            });
  return result;
}

AttendanceMatrix build_attendance_matrix(const Dataset& ds,
                                         const AttendanceOptions& opts) {
  return run_attendance(ds, opts).matrix;
}

AccuracyReport evaluate_accuracy(std::span<const BinLocationEstimate> estimates,
                                 std::span<const CourseRoster> rosters) {
  std::map<std::pair<Id, Timestamp>, GeoPoint> official;
  for (const CourseRoster& r : rosters)
    for (const ScheduleBlock& b : r.blocks)
      if (b.official_location)
        official[{r.course, b.start}] = *b.official_location;

  AccuracyReport report;
  for (const BinLocationEstimate& e : estimates) {
    if (!e.location) continue;
    auto it = official.find({e.course, e.block_start});
    if (it == official.end()) continue;
    report.distances_m.push_back(haversine_m(*e.location, it->second));
  }
  if (report.distances_m.empty())
    throw DataError(
        "evaluate_accuracy: no estimates overlap a block with an official "
        "location");

  std::sort(report.distances_m.begin(), report.distances_m.end());
  const double n = static_cast<double>(report.distances_m.size());
  report.cdf.reserve(report.distances_m.size());
  for (std::size_t i = 0; i < report.distances_m.size(); ++i)
    report.cdf.emplace_back(report.distances_m[i], (i + 1) / n);
  const auto frac_within = [&](double d) {
    const auto hi = std::upper_bound(report.distances_m.begin(),
                                     report.distances_m.end(), d);
    return (hi - report.distances_m.begin()) / n;
  };
  report.frac_within_50 = frac_within(50.0);
  report.frac_within_100 = frac_within(100.0);
  report.frac_within_200 = frac_within(200.0);
  return report;
}

}  // namespace campus
