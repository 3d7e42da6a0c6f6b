#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "campus/attendance.hpp"
#include "campus/stats.hpp"
#include "campus/types.hpp"

namespace campus {

// Undirected, unweighted: any message in either direction links the pair.
struct SocialNetwork {
  std::map<Id, std::set<Id>> adj;

  std::size_t edge_count() const;
  const std::set<Id>& neighbors(Id id) const;  // empty set for unknown ids
};

SocialNetwork build_social_network(std::span<const MessageEvent> messages);

enum class PeerScope { term, course, week };

struct PeerOptions {
  PeerScope scope = PeerScope::course;
  bool use_median = false;        // otherwise unweighted mean over neighbors
  bool same_course_peers = false; // restrict trend peers to co-enrolled
};

// Mean (or median) of the neighbors' aggregate attendance; empty when no
// neighbor has a value. Course scope only counts co-enrolled neighbors.
std::optional<double> peer_term_mean(Id student, const SocialNetwork& net,
                                     const std::map<Id, double>& term_means,
                                     bool use_median = false);
std::optional<double> peer_course_mean(
    Id student, Id course, const SocialNetwork& net,
    const std::map<std::pair<Id, Id>, double>& course_means,
    bool use_median = false);
std::optional<double> peer_week_mean(
    Id student, int week, const SocialNetwork& net,
    const std::map<std::pair<Id, int>, double>& weekly_means,
    bool use_median = false);

struct DensityGrid {
  double lo_x = 0.0, hi_x = 1.0;
  double lo_y = 0.0, hi_y = 1.0;
  int bins = 20;
  std::vector<int> counts;  // row-major, y outer
  int cell(double x, double y) const;
};

struct ScatterResult {
  std::vector<std::pair<double, double>> points;  // (own, peer aggregate)
  double correlation = 0.0;
  bool degenerate = false;  // constant side, correlation undefined
  DensityGrid grid;
};

// Own vs peer-mean attendance at the chosen scope. Throws when fewer than
// three students (or student-course / student-week observations) have a
// defined peer mean.
ScatterResult own_vs_peer_scatter(const AttendanceMatrix& matrix,
                                  const SocialNetwork& net,
                                  const PeerOptions& opts = {});

struct BlockDeviation {
  Id participant = 0;
  Id course = 0;
  Timestamp block_start = 0;
  int week = 0;
  double deviation = 0.0;  // own fraction minus class mean, in [-1, 1]
};

struct CorrectedAttendance {
  std::vector<BlockDeviation> block_deviations;
  std::map<std::pair<Id, Id>, double> course_median;  // (participant, course)
};

// Class mean is taken over the measured roster entries of each block; blocks
// with fewer than two measured entries are skipped.
CorrectedAttendance corrected_attendance(const AttendanceMatrix& matrix);

// Own vs peer-mean of the per-course median deviations, peers restricted to
// the same course.
ScatterResult corrected_scatter(const CorrectedAttendance& corrected,
                                const SocialNetwork& net,
                                bool use_median = false, int grid_bins = 20);

// Per performance group and week: mean over member observations of the
// members' week-scope peer attendance.
std::map<PerfGroup, std::vector<std::pair<int, double>>> peer_trend(
    const AttendanceMatrix& matrix, const SocialNetwork& net,
    const std::map<std::pair<Id, Id>, PerfGroup>& grouping,
    const PeerOptions& opts = {});

}  // namespace campus
