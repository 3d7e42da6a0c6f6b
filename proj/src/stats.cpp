#include "campus/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace campus {

namespace {

double median_sorted(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n == 0) throw std::invalid_argument("median of empty list");
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Linear interpolation between order statistics, p in [0,1].
double quantile_sorted(std::span<const double> v, double p) {
  const double h = p * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + (h - lo) * (v[lo + 1] - v[lo]);
}

bool is_constant(std::span<const double> v) {
  return std::adjacent_find(v.begin(), v.end(),
                            [](double a, double b) { return a != b; }) ==
         v.end();
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

PerfGroup performance_group(int grade) {
  switch (grade) {
    case -3:
    case 0:
    case 2:
      return PerfGroup::Low;
    case 4:
    case 7:
      return PerfGroup::Moderate;
    case 10:
    case 12:
      return PerfGroup::High;
    default:
      throw std::invalid_argument("grade outside the seven-point scale");
  }
}

const char* perf_group_name(PerfGroup g) {
  switch (g) {
    case PerfGroup::Low:
      return "low";
    case PerfGroup::Moderate:
      return "moderate";
    default:
      return "high";
  }
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw std::invalid_argument("correlation inputs differ in length");
  const std::size_t n = x.size();
  if (n < 3) throw std::invalid_argument("correlation needs at least 3 pairs");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0)
    throw std::invalid_argument("correlation undefined for constant input");
  return sxy / std::sqrt(sxx * syy);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw std::invalid_argument("correlation inputs differ in length");
  if (x.size() < 3)
    throw std::invalid_argument("correlation needs at least 3 pairs");
  if (is_constant(x) || is_constant(y))
    throw std::invalid_argument("correlation undefined for constant input");
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  return pearson(rx, ry);
}

MwResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                        MwMode mode) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("mann_whitney_u: empty sample");
  const std::size_t n = a.size();
  const std::size_t m = b.size();

  double wins = 0;
  for (double av : a)
    for (double bv : b) {
      if (av > bv)
        wins += 1.0;
      else if (av == bv)
        wins += 0.5;
    }
  MwResult r;
  r.u = wins;

  // Pooled tie-group sizes drive both branches.
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::sort(pooled.begin(), pooled.end());
  std::vector<int> tie_sizes;
  for (std::size_t i = 0; i < pooled.size();) {
    std::size_t j = i;
    while (j + 1 < pooled.size() && pooled[j + 1] == pooled[i]) ++j;
    tie_sizes.push_back(static_cast<int>(j - i + 1));
    i = j + 1;
  }

  if (mode == MwMode::exact) {
    // Distribution of 2U over every way of marking n pooled slots as the
    // first sample. Tie groups contribute j*(c-j) half-wins internally plus
    // full wins against earlier groups.
    const int max2u = 2 * static_cast<int>(n * m);
    std::vector<std::vector<std::uint64_t>> dp(
        n + 1, std::vector<std::uint64_t>(max2u + 1, 0));
    dp[0][0] = 1;
    int seen = 0;
    for (int c : tie_sizes) {
      std::vector<std::vector<std::uint64_t>> next(
          n + 1, std::vector<std::uint64_t>(max2u + 1, 0));
      for (int used = 0; used <= static_cast<int>(n); ++used)
        for (int u2 = 0; u2 <= max2u; ++u2) {
          const std::uint64_t ways = dp[used][u2];
          if (!ways) continue;
          const int b_before = seen - used;
          for (int j = 0; j <= c && used + j <= static_cast<int>(n); ++j) {
            // A state that has placed more second-sample labels than m can
            // never finish with exactly n first-sample labels; dropping it
            // also keeps 2U within its valid range.
            if (seen + c - used - j > static_cast<int>(m)) continue;
            const int add = j * (c - j) + 2 * j * b_before;
            next[used + j][u2 + add] += ways * binomial(c, j);
          }
        }
      dp = std::move(next);
      seen += c;
    }
    const auto& dist = dp[n];
    const double center = static_cast<double>(n * m);  // of 2U
    const double dev = std::abs(2.0 * wins - center);
    std::uint64_t hits = 0, total = 0;
    for (int u2 = 0; u2 <= max2u; ++u2) {
      total += dist[u2];
      if (std::abs(u2 - center) >= dev - 1e-9) hits += dist[u2];
    }
    r.p = static_cast<double>(hits) / static_cast<double>(total);
    return r;
  }

  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  const double N = nn + mm;
  double tie_term = 0;
  for (int t : tie_sizes)
    tie_term += static_cast<double>(t) * t * t - t;
  const double var =
      nn * mm / 12.0 * ((N + 1.0) - tie_term / (N * (N - 1.0)));
  if (var <= 0) {
    r.p = 1.0;
    return r;
  }
  const double shift = std::max(std::abs(wins - nn * mm / 2.0) - 0.5, 0.0);
  const double z = shift / std::sqrt(var);
  r.p = std::erfc(z / std::sqrt(2.0));
  return r;
}

std::vector<double> pairwise_slopes(
    std::span<const std::pair<double, double>> series) {
  std::vector<double> slopes;
  for (std::size_t i = 0; i < series.size(); ++i)
    for (std::size_t j = i + 1; j < series.size(); ++j) {
      const double dt = series[j].first - series[i].first;
      if (dt == 0) continue;
      slopes.push_back((series[j].second - series[i].second) / dt);
    }
  if (slopes.empty())
    throw std::invalid_argument("slope needs two points with distinct t");
  return slopes;
}

double theil_sen(std::span<const std::pair<double, double>> series) {
  std::vector<double> slopes = pairwise_slopes(series);
  std::sort(slopes.begin(), slopes.end());
  return median_sorted(slopes);
}

QuintileGrouping quintile_grouping(const std::map<Id, double>& term_attendance,
                                   int n_groups) {
  if (n_groups < 1) throw std::invalid_argument("group count must be >= 1");
  if (term_attendance.size() < static_cast<std::size_t>(n_groups))
    throw std::invalid_argument("fewer participants than groups");

  std::vector<std::pair<double, Id>> order;
  order.reserve(term_attendance.size());
  for (const auto& [id, frac] : term_attendance) order.emplace_back(frac, id);
  std::sort(order.begin(), order.end());

  const std::size_t n = order.size();
  const std::size_t base = n / n_groups;
  const std::size_t rem = n % n_groups;

  QuintileGrouping q;
  std::size_t pos = 0;
  for (int g = 0; g < n_groups; ++g) {
    const std::size_t size = base + (static_cast<std::size_t>(g) < rem);
    std::vector<Id> members;
    members.reserve(size);
    double lo = order[pos].first;
    double hi = order[pos + size - 1].first;
    for (std::size_t k = 0; k < size; ++k) members.push_back(order[pos + k].second);
    pos += size;
    q.groups.push_back(std::move(members));
    q.spans.emplace_back(lo, hi);
  }
  return q;
}

double GradeHistogram::fail_rate() const {
  double mass = 0;
  for (std::size_t i = 0; i < kGradeScale.size(); ++i)
    if (kGradeScale[i] == -3 || kGradeScale[i] == 0) mass += freq[i];
  return mass;
}

GradeHistogram grade_distribution(const std::set<Id>& group,
                                  std::span<const GradeRecord> grades) {
  GradeHistogram h;
  std::array<int, kGradeScale.size()> counts{};
  for (const GradeRecord& g : grades) {
    if (g.no_show || !group.count(g.participant)) continue;
    const auto it = std::find(kGradeScale.begin(), kGradeScale.end(), g.grade);
    counts[static_cast<std::size_t>(it - kGradeScale.begin())] += 1;
    ++h.n;
  }
  if (h.n == 0) return h;
  for (std::size_t i = 0; i < counts.size(); ++i)
    h.freq[i] = static_cast<double>(counts[i]) / h.n;
  return h;
}

std::map<std::pair<Id, Id>, PerfGroup> performance_grouping(
    std::span<const GradeRecord> grades) {
  std::map<std::pair<Id, Id>, PerfGroup> out;
  for (const GradeRecord& g : grades) {
    if (g.no_show) continue;
    out[{g.participant, g.course}] = performance_group(g.grade);
  }
  return out;
}

std::map<PerfGroup, std::vector<std::pair<int, double>>> weekly_trend(
    const AttendanceMatrix& matrix,
    const std::map<std::pair<Id, Id>, PerfGroup>& grouping) {
  std::map<PerfGroup, std::map<int, std::pair<double, int>>> acc;
  for (const AttendanceEntry& e : matrix.entries) {
    const auto it = grouping.find({e.participant, e.course});
    if (it == grouping.end()) continue;
    auto& [sum, count] = acc[it->second][e.week];
    sum += e.fraction();
    ++count;
  }
  std::map<PerfGroup, std::vector<std::pair<int, double>>> out;
  for (const auto& [group, weeks] : acc) {
    auto& series = out[group];
    for (const auto& [week, sn] : weeks)
      series.emplace_back(week, sn.first / sn.second);
  }
  return out;
}

BoxSummary box_summary(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("box_summary: empty input");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  BoxSummary s;
  s.n = static_cast<int>(v.size());
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  s.median = quantile_sorted(v, 0.5);
  s.q1 = quantile_sorted(v, 0.25);
  s.q3 = quantile_sorted(v, 0.75);
  const double iqr = s.q3 - s.q1;
  s.lower_fence = s.q1 - iqr;
  s.upper_fence = s.q3 + iqr;
  return s;
}

PerCourseCorrelations per_course_correlations(
    const AttendanceMatrix& matrix, std::span<const GradeRecord> grades) {
  const auto course_means = matrix.course_means();
  std::map<Id, std::vector<std::pair<double, double>>> by_course;
  for (const GradeRecord& g : grades) {
    if (g.no_show) continue;
    const auto it = course_means.find({g.participant, g.course});
    if (it == course_means.end()) continue;
    by_course[g.course].emplace_back(it->second,
                                     static_cast<double>(g.grade));
  }

  PerCourseCorrelations out;
  for (const auto& [course, pairs] : by_course) {
    if (pairs.size() < 3) {
      out.skipped.emplace_back(course, "fewer than 3 graded participants");
      continue;
    }
    std::vector<double> att, grd;
    att.reserve(pairs.size());
    grd.reserve(pairs.size());
    for (const auto& [a, g] : pairs) {
      att.push_back(a);
      grd.push_back(g);
    }
    if (is_constant(att) || is_constant(grd)) {
      out.skipped.emplace_back(course, "constant attendance or grades");
      continue;
    }
    out.correlations.push_back(
        {course, spearman(att, grd), static_cast<int>(pairs.size())});
  }
  return out;
}

std::vector<HistogramBin> density_histogram(std::span<const double> values,
                                            double bin_width) {
  if (values.empty())
    throw std::invalid_argument("density_histogram: empty input");
  if (!(bin_width > 0))
    throw std::invalid_argument("density_histogram: bin width must be > 0");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const std::size_t n_bins = static_cast<std::size_t>(
                                 std::floor((*hi_it - lo) / bin_width)) +
                             1;
  std::vector<HistogramBin> bins(n_bins);
  for (std::size_t i = 0; i < n_bins; ++i) {
    bins[i].lo = lo + i * bin_width;
    bins[i].hi = bins[i].lo + bin_width;
  }
  for (double v : values) {
    std::size_t idx = static_cast<std::size_t>((v - lo) / bin_width);
    if (idx >= n_bins) idx = n_bins - 1;
    bins[idx].count += 1;
  }
  const double total = static_cast<double>(values.size());
  for (HistogramBin& b : bins) b.density = b.count / (total * bin_width);
  return bins;
}

}  // namespace campus
