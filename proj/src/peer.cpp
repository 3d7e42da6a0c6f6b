#include "campus/peer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace campus {

namespace {

const std::set<Id> kNoNeighbors;

std::optional<double> aggregate(std::vector<double>& vals, bool use_median) {
  if (vals.empty()) return std::nullopt;
  if (!use_median) {
    double sum = 0;
    for (double v : vals) sum += v;
    return sum / vals.size();
  }
  std::sort(vals.begin(), vals.end());
  const std::size_t n = vals.size();
  return n % 2 ? vals[n / 2] : 0.5 * (vals[n / 2 - 1] + vals[n / 2]);
}

ScatterResult finish_scatter(std::vector<std::pair<double, double>> points,
                             double lo, double hi, int grid_bins) {
  if (points.size() < 3)
    throw std::invalid_argument(
        "own_vs_peer_scatter: fewer than 3 observations with peers");
  ScatterResult r;
  r.points = std::move(points);
  std::vector<double> own, peer;
  own.reserve(r.points.size());
  peer.reserve(r.points.size());
  for (const auto& [o, p] : r.points) {
    own.push_back(o);
    peer.push_back(p);
  }
  try {
    r.correlation = pearson(own, peer);
  } catch (const std::invalid_argument&) {
    r.degenerate = true;
  }
  r.grid.lo_x = r.grid.lo_y = lo;
  r.grid.hi_x = r.grid.hi_y = hi;
  r.grid.bins = grid_bins;
  r.grid.counts.assign(static_cast<std::size_t>(grid_bins) * grid_bins, 0);
  for (const auto& [o, p] : r.points) r.grid.counts[r.grid.cell(o, p)] += 1;
  return r;
}

}  // namespace

std::size_t SocialNetwork::edge_count() const {
  std::size_t twice = 0;
  for (const auto& [id, nbrs] : adj) twice += nbrs.size();
  return twice / 2;
}

const std::set<Id>& SocialNetwork::neighbors(Id id) const {
  const auto it = adj.find(id);
  return it == adj.end() ? kNoNeighbors : it->second;
}

SocialNetwork build_social_network(std::span<const MessageEvent> messages) {
  SocialNetwork net;
  for (const MessageEvent& m : messages) {
    net.adj[m.sender].insert(m.receiver);
    net.adj[m.receiver].insert(m.sender);
  }
  return net;
}

int DensityGrid::cell(double x, double y) const {
  const auto clamp_bin = [this](double v, double lo, double hi) {
    int b = static_cast<int>((v - lo) / (hi - lo) * bins);
    return std::clamp(b, 0, bins - 1);
  };
  return clamp_bin(y, lo_y, hi_y) * bins + clamp_bin(x, lo_x, hi_x);
}

std::optional<double> peer_term_mean(Id student, const SocialNetwork& net,
                                     const std::map<Id, double>& term_means,
                                     bool use_median) {
  std::vector<double> vals;
  for (Id nbr : net.neighbors(student)) {
    const auto it = term_means.find(nbr);
    if (it != term_means.end()) vals.push_back(it->second);
  }
  return aggregate(vals, use_median);
}

std::optional<double> peer_course_mean(
    Id student, Id course, const SocialNetwork& net,
    const std::map<std::pair<Id, Id>, double>& course_means, bool use_median) {
  std::vector<double> vals;
  for (Id nbr : net.neighbors(student)) {
    const auto it = course_means.find({nbr, course});
    if (it != course_means.end()) vals.push_back(it->second);
  }
  return aggregate(vals, use_median);
}

std::optional<double> peer_week_mean(
    Id student, int week, const SocialNetwork& net,
    const std::map<std::pair<Id, int>, double>& weekly_means, bool use_median) {
  std::vector<double> vals;
  for (Id nbr : net.neighbors(student)) {
    const auto it = weekly_means.find({nbr, week});
    if (it != weekly_means.end()) vals.push_back(it->second);
  }
  return aggregate(vals, use_median);
}

ScatterResult own_vs_peer_scatter(const AttendanceMatrix& matrix,
                                  const SocialNetwork& net,
                                  const PeerOptions& opts) {
  std::vector<std::pair<double, double>> points;
  switch (opts.scope) {
    case PeerScope::term: {
      const auto means = matrix.term_means();
      for (const auto& [id, own] : means)
        if (auto peer = peer_term_mean(id, net, means, opts.use_median))
          points.emplace_back(own, *peer);
      break;
    }
    case PeerScope::course: {
      const auto means = matrix.course_means();
      for (const auto& [key, own] : means)
        if (auto peer = peer_course_mean(key.first, key.second, net, means,
                                         opts.use_median))
          points.emplace_back(own, *peer);
      break;
    }
    case PeerScope::week: {
      const auto means = matrix.weekly_means();
      for (const auto& [key, own] : means)
        if (auto peer = peer_week_mean(key.first, key.second, net, means,
                                       opts.use_median))
          points.emplace_back(own, *peer);
      break;
    }
  }
  return finish_scatter(std::move(points), 0.0, 1.0, 20);
}

CorrectedAttendance corrected_attendance(const AttendanceMatrix& matrix) {
  // Group the measured entries per (course, block).
  std::map<std::pair<Id, Timestamp>, std::vector<const AttendanceEntry*>>
      blocks;
  for (const AttendanceEntry& e : matrix.entries)
    blocks[{e.course, e.block_start}].push_back(&e);

  CorrectedAttendance out;
  std::map<std::pair<Id, Id>, std::vector<double>> per_course;
  for (const auto& [key, entries] : blocks) {
    if (entries.size() < 2) continue;
    double mean = 0;
    for (const AttendanceEntry* e : entries) mean += e->fraction();
    mean /= entries.size();
    for (const AttendanceEntry* e : entries) {
      BlockDeviation d;
      d.participant = e->participant;
      d.course = e->course;
      d.block_start = e->block_start;
      d.week = e->week;
      d.deviation = e->fraction() - mean;
      per_course[{d.participant, d.course}].push_back(d.deviation);
      out.block_deviations.push_back(d);
    }
  }
  std::sort(out.block_deviations.begin(), out.block_deviations.end(),
            [](const BlockDeviation& a, const BlockDeviation& b) {
              return std::tie(a.participant, a.course, a.block_start) <
                     std::tie(b.participant, b.course, b.block_start);
            });
  for (auto& [key, devs] : per_course) {
    std::sort(devs.begin(), devs.end());
    const std::size_t n = devs.size();
    out.course_median[key] =
        n % 2 ? devs[n / 2] : 0.5 * (devs[n / 2 - 1] + devs[n / 2]);
  }
  return out;
}

ScatterResult corrected_scatter(const CorrectedAttendance& corrected,
                                const SocialNetwork& net, bool use_median,
                                int grid_bins) {
  std::vector<std::pair<double, double>> points;
  for (const auto& [key, own] : corrected.course_median)
    if (auto peer = peer_course_mean(key.first, key.second, net,
                                     corrected.course_median, use_median))
      points.emplace_back(own, *peer);
  return finish_scatter(std::move(points), -1.0, 1.0, grid_bins);
}

std::map<PerfGroup, std::vector<std::pair<int, double>>> peer_trend(
    const AttendanceMatrix& matrix, const SocialNetwork& net,
    const std::map<std::pair<Id, Id>, PerfGroup>& grouping,
    const PeerOptions& opts) {
  const auto weekly = matrix.weekly_means();

  // Week coverage and course enrollment, both taken from the matrix itself.
  std::map<std::pair<Id, Id>, std::set<int>> weeks_of;  // (participant,course)
  for (const AttendanceEntry& e : matrix.entries)
    weeks_of[{e.participant, e.course}].insert(e.week);

  std::map<PerfGroup, std::map<int, std::pair<double, int>>> acc;
  for (const auto& [key, group] : grouping) {
    const auto wk = weeks_of.find(key);
    if (wk == weeks_of.end()) continue;
    for (int week : wk->second) {
      std::vector<double> vals;
      for (Id nbr : net.neighbors(key.first)) {
        if (opts.same_course_peers &&
            !weeks_of.count({nbr, key.second}))
          continue;
        const auto it = weekly.find({nbr, week});
        if (it != weekly.end()) vals.push_back(it->second);
      }
      const auto peer = aggregate(vals, opts.use_median);
      if (!peer) continue;
      auto& [sum, count] = acc[group][week];
      sum += *peer;
      ++count;
    }
  }
  std::map<PerfGroup, std::vector<std::pair<int, double>>> out;
  for (const auto& [group, weeks] : acc) {
    auto& series = out[group];
    for (const auto& [week, sn] : weeks)
      series.emplace_back(week, sn.first / sn.second);
  }
  return out;
}

}  // namespace campus
