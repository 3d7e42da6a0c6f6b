#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "campus/stats.hpp"

using namespace campus;

namespace {

// Rank computation written independently of the library: sort index pairs,
// then average over each tied run.
std::vector<double> oracle_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double oracle_pearson(const std::vector<double>& x,
                      const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// Exact two-sided p by scoring every way of labeling the pooled sample,
// enumerated directly over index subsets.
double oracle_mw_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pool = a;
  pool.insert(pool.end(), b.begin(), b.end());
  const std::size_t n = a.size(), total = pool.size();

  const auto two_u = [&](const std::vector<bool>& is_a) {
    double u = 0;
    for (std::size_t i = 0; i < total; ++i)
      for (std::size_t j = 0; j < total; ++j) {
        if (!is_a[i] || is_a[j]) continue;
        if (pool[i] > pool[j]) u += 1.0;
        else if (pool[i] == pool[j]) u += 0.5;
      }
    return static_cast<long long>(std::llround(2.0 * u));
  };

  std::vector<bool> mask(total, false);
  std::fill(mask.begin(), mask.begin() + static_cast<long>(n), true);
  std::sort(mask.begin(), mask.end(), std::greater<>());

  std::vector<bool> obs(total, false);
  std::fill(obs.begin(), obs.begin() + static_cast<long>(n), true);
  const long long nm = static_cast<long long>(n * (total - n));
  const long long obs_dev = std::llabs(two_u(obs) - nm);

  long long hits = 0, count = 0;
  do {
    ++count;
    if (std::llabs(two_u(mask) - nm) >= obs_dev) ++hits;
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return static_cast<double>(hits) / static_cast<double>(count);
}

double oracle_mw_u(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0;
  for (double x : a)
    for (double y : b) {
      if (x > y) u += 1.0;
      else if (x == y) u += 0.5;
    }
  return u;
}

}  // namespace

TEST_CASE("performance groups partition the grade scale") {
  CHECK(performance_group(-3) == PerfGroup::Low);
  CHECK(performance_group(0) == PerfGroup::Low);
  CHECK(performance_group(2) == PerfGroup::Low);
  CHECK(performance_group(4) == PerfGroup::Moderate);
  CHECK(performance_group(7) == PerfGroup::Moderate);
  CHECK(performance_group(10) == PerfGroup::High);
  CHECK(performance_group(12) == PerfGroup::High);
  CHECK_THROWS_AS(performance_group(5), std::invalid_argument);
  CHECK_THROWS_AS(performance_group(-1), std::invalid_argument);
  CHECK(std::string(perf_group_name(PerfGroup::Low)) == "low");
}

TEST_CASE("average ranks share ties evenly") {
  const std::vector<double> v{10, 20, 20, 30};
  CHECK(average_ranks(v) == std::vector<double>{1, 2.5, 2.5, 4});
  const std::vector<double> all_tied{5, 5, 5};
  CHECK(average_ranks(all_tied) == std::vector<double>{2, 2, 2});
}

TEST_CASE("spearman equals pearson of average ranks") {
  const std::vector<double> x{1, 2, 2, 4};
  const std::vector<double> y{3, 1, 4, 4};
  const double expected = oracle_pearson(oracle_ranks(x), oracle_ranks(y));
  CHECK(spearman(x, y) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("spearman endpoints and monotone invariance") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> up{2, 4, 9, 16, 100};
  std::vector<double> down(up.rbegin(), up.rend());
  CHECK(spearman(x, up) == doctest::Approx(1.0));
  CHECK(spearman(x, down) == doctest::Approx(-1.0));

  const std::vector<double> y{0.3, 0.9, 0.1, 0.5, 0.7};
  std::vector<double> y_exp;
  for (double v : y) y_exp.push_back(std::exp(3 * v));
  CHECK(spearman(x, y) == doctest::Approx(spearman(x, y_exp)).epsilon(1e-12));
}

TEST_CASE("spearman rejects unusable input") {
  CHECK_THROWS_AS(spearman(std::vector<double>{1, 2},
                           std::vector<double>{1, 2, 3}),
                  std::invalid_argument);
  CHECK_THROWS_AS(spearman(std::vector<double>{1, 2},
                           std::vector<double>{3, 4}),
                  std::invalid_argument);
  CHECK_THROWS_AS(spearman(std::vector<double>{1, 1, 1},
                           std::vector<double>{1, 2, 3}),
                  std::invalid_argument);
}

TEST_CASE("smallest samples give the trivial test") {
  const MwResult r =
      mann_whitney_u(std::vector<double>{1}, std::vector<double>{2},
                     MwMode::exact);
  CHECK(r.u == 0.0);
  CHECK(r.p == doctest::Approx(1.0));
}

TEST_CASE("separated triplets give the two-tail extreme") {
  const MwResult r = mann_whitney_u(std::vector<double>{1, 2, 3},
                                    std::vector<double>{4, 5, 6},
                                    MwMode::exact);
  CHECK(r.u == 0.0);
  CHECK(r.p == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("identical samples sit at the center") {
  const std::vector<double> v{3, 1, 4, 1, 5};
  const MwResult r = mann_whitney_u(v, v, MwMode::exact);
  CHECK(r.u == doctest::Approx(12.5));  // nm / 2 with ties counted half
  CHECK(r.p == doctest::Approx(1.0));
}

TEST_CASE("exact test matches full enumeration, ties included") {
  const std::vector<std::pair<std::vector<double>, std::vector<double>>> cases{
      {{1, 2, 2, 3}, {2, 3, 3, 7}},
      {{1, 1, 1}, {1, 1, 2, 2}},
      {{0.5, 2.5}, {0.5, 1.5, 2.5, 3.5}},
      {{-1, 0, 4, 4, 9}, {2, 4, 4, 4}},
      {{10, 20, 30, 40, 50, 60}, {15, 25, 35, 45, 55}},
  };
  for (const auto& [a, b] : cases) {
    CAPTURE(a.size());
    CAPTURE(b.size());
    const MwResult r = mann_whitney_u(a, b, MwMode::exact);
    CHECK(r.u == doctest::Approx(oracle_mw_u(a, b)).epsilon(1e-12));
    CHECK(r.p == doctest::Approx(oracle_mw_p(a, b)).epsilon(1e-9));
  }
}

TEST_CASE("exact test matches enumeration on random tied data") {
  std::mt19937 gen(12345);
  std::uniform_int_distribution<int> val(0, 4);   // heavy ties
  std::uniform_int_distribution<int> len(2, 6);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> a(len(gen)), b(len(gen));
    for (double& v : a) v = val(gen);
    for (double& v : b) v = val(gen);
    CAPTURE(trial);
    const MwResult r = mann_whitney_u(a, b, MwMode::exact);
    CHECK(r.u == doctest::Approx(oracle_mw_u(a, b)).epsilon(1e-12));
    CHECK(r.p == doctest::Approx(oracle_mw_p(a, b)).epsilon(1e-9));
  }
}

TEST_CASE("swapping the samples mirrors U and keeps p") {
  const std::vector<double> a{1, 4, 4, 6, 9};
  const std::vector<double> b{2, 4, 5};
  const MwResult ab = mann_whitney_u(a, b, MwMode::exact);
  const MwResult ba = mann_whitney_u(b, a, MwMode::exact);
  CHECK(ab.u + ba.u == doctest::Approx(15.0));  // n * m
  CHECK(ab.p == doctest::Approx(ba.p).epsilon(1e-12));
}

TEST_CASE("normal approximation tracks the exact test at moderate size") {
  std::vector<double> pool(30);
  std::iota(pool.begin(), pool.end(), 1.0);
  std::shuffle(pool.begin(), pool.end(), std::mt19937(99));
  const std::vector<double> a(pool.begin(), pool.begin() + 15);
  const std::vector<double> b(pool.begin() + 15, pool.end());
  const MwResult exact = mann_whitney_u(a, b, MwMode::exact);
  const MwResult approx = mann_whitney_u(a, b, MwMode::approx);
  CHECK(approx.u == exact.u);
  CHECK(std::abs(approx.p - exact.p) < 0.02);
}

TEST_CASE("approximation degenerates to p=1 when everything ties") {
  const MwResult r = mann_whitney_u(std::vector<double>{2, 2, 2},
                                    std::vector<double>{2, 2},
                                    MwMode::approx);
  CHECK(r.p == 1.0);
}

TEST_CASE("pairwise slopes skip duplicate timestamps") {
  const std::vector<std::pair<double, double>> series{{1, 0}, {2, 2}, {4, 2}};
  std::vector<double> slopes = pairwise_slopes(series);
  std::sort(slopes.begin(), slopes.end());
  REQUIRE(slopes.size() == 3);
  CHECK(slopes[0] == doctest::Approx(0.0));
  CHECK(slopes[1] == doctest::Approx(2.0 / 3.0));
  CHECK(slopes[2] == doctest::Approx(2.0));

  const std::vector<std::pair<double, double>> dup{{1, 0}, {1, 5}, {2, 1}};
  CHECK(pairwise_slopes(dup).size() == 2);
  const std::vector<std::pair<double, double>> all_dup{{1, 0}, {1, 5}};
  CHECK_THROWS_AS(pairwise_slopes(all_dup), std::invalid_argument);
}

TEST_CASE("theil-sen recovers a clean line and shrugs off an outlier") {
  std::vector<std::pair<double, double>> line;
  for (int t = 1; t <= 10; ++t) line.emplace_back(t, 2.0 * t + 1.0);
  CHECK(theil_sen(line) == doctest::Approx(2.0).epsilon(1e-12));

  line[7].second += 40.0;  // one wild value
  CHECK(std::abs(theil_sen(line) - 2.0) < 0.1);
}

TEST_CASE("theil-sen respects shift and scale") {
  std::vector<std::pair<double, double>> pts{
      {1, 0.3}, {2, 0.8}, {3, 0.7}, {4, 1.4}, {5, 1.3}};
  const double s = theil_sen(pts);
  std::vector<std::pair<double, double>> shifted, scaled;
  for (auto [t, y] : pts) {
    shifted.emplace_back(t + 100.0, y + 5.0);
    scaled.emplace_back(t, 3.0 * y);
  }
  CHECK(theil_sen(shifted) == doctest::Approx(s).epsilon(1e-12));
  CHECK(theil_sen(scaled) == doctest::Approx(3.0 * s).epsilon(1e-12));
}

TEST_CASE("ten students split into five pairs") {
  std::map<Id, double> att;
  for (Id i = 1; i <= 10; ++i) att[i] = static_cast<double>(i) / 10.0;
  const QuintileGrouping q = quintile_grouping(att);
  REQUIRE(q.groups.size() == 5);
  for (const auto& g : q.groups) CHECK(g.size() == 2);
  CHECK(q.groups[0] == std::vector<Id>{1, 2});
  CHECK(q.groups[4] == std::vector<Id>{9, 10});
  CHECK(q.spans[0].first == doctest::Approx(0.1));
  CHECK(q.spans[0].second == doctest::Approx(0.2));
  CHECK(q.spans[4].second == doctest::Approx(1.0));
}

TEST_CASE("remainders go to the lowest-attendance groups") {
  std::map<Id, double> att;
  for (Id i = 1; i <= 11; ++i) att[i] = static_cast<double>(i);
  const QuintileGrouping q = quintile_grouping(att);
  REQUIRE(q.groups.size() == 5);
  CHECK(q.groups[0].size() == 3);
  CHECK(q.groups[1].size() == 2);
  CHECK(q.groups[2].size() == 2);
  CHECK(q.groups[3].size() == 2);
  CHECK(q.groups[4].size() == 2);
  CHECK(q.groups[0] == std::vector<Id>{1, 2, 3});
}

TEST_CASE("quintile ties break by id and groups stay ordered") {
  std::map<Id, double> att{{5, 0.5}, {1, 0.5}, {3, 0.5}, {2, 0.1}, {4, 0.9}};
  const QuintileGrouping q = quintile_grouping(att, 2);
  REQUIRE(q.groups.size() == 2);
  CHECK(q.groups[0] == std::vector<Id>{2, 1, 3});
  CHECK(q.groups[1] == std::vector<Id>{5, 4});
  CHECK(q.spans[0].first == doctest::Approx(0.1));
  CHECK(q.spans[1].second == doctest::Approx(0.9));
}

TEST_CASE("grade distribution normalizes and drops no_shows") {
  std::vector<GradeRecord> grades;
  const auto add = [&](Id p, int grade, bool no_show) {
    GradeRecord g;
    g.participant = p;
    g.course = 1;
    g.grade = grade;
    g.no_show = no_show;
    grades.push_back(g);
  };
  add(1, -3, false);
  add(1, 0, false);  // second course
  add(2, 7, false);
  add(2, 12, false);
  add(3, 12, true);  // no_show: excluded even with a grade slot
  add(9, 12, false); // not in the group

  const GradeHistogram h = grade_distribution({1, 2, 3}, grades);
  CHECK(h.n == 4);
  CHECK(h.freq[0] == doctest::Approx(0.25));   // -3
  CHECK(h.freq[1] == doctest::Approx(0.25));   // 0
  CHECK(h.freq[4] == doctest::Approx(0.25));   // 7
  CHECK(h.freq[6] == doctest::Approx(0.25));   // 12
  CHECK(h.fail_rate() == doctest::Approx(0.5));
  double sum = 0;
  for (double f : h.freq) sum += f;
  CHECK(sum == doctest::Approx(1.0));

  const GradeHistogram empty = grade_distribution({42}, grades);
  CHECK(empty.n == 0);
  CHECK(empty.fail_rate() == 0.0);
}

TEST_CASE("five points give the textbook box") {
  const std::vector<double> v{1, 2, 3, 4, 5};
  const BoxSummary b = box_summary(v);
  CHECK(b.median == 3.0);
  CHECK(b.mean == 3.0);
  CHECK(b.q1 == 2.0);
  CHECK(b.q3 == 4.0);
  CHECK(b.lower_fence == 0.0);
  CHECK(b.upper_fence == 6.0);
  CHECK(b.n == 5);
}

TEST_CASE("quartiles interpolate on even counts") {
  const std::vector<double> v{4, 1, 3, 2};  // order must not matter
  const BoxSummary b = box_summary(v);
  CHECK(b.median == doctest::Approx(2.5));
  CHECK(b.q1 == doctest::Approx(1.75));
  CHECK(b.q3 == doctest::Approx(3.25));
  CHECK(b.lower_fence == doctest::Approx(0.25));
  CHECK(b.upper_fence == doctest::Approx(4.75));
}

TEST_CASE("box of a single value collapses") {
  const BoxSummary b = box_summary(std::vector<double>{7.5});
  CHECK(b.median == 7.5);
  CHECK(b.q1 == 7.5);
  CHECK(b.q3 == 7.5);
  CHECK(b.lower_fence == 7.5);
  CHECK(b.upper_fence == 7.5);
  CHECK_THROWS_AS(box_summary({}), std::invalid_argument);
}

TEST_CASE("density histogram integrates to one") {
  const std::vector<double> v{0.0, 0.1, 0.1, 0.4, 0.9, 1.0};
  const auto bins = density_histogram(v, 0.25);
  int total = 0;
  double integral = 0;
  for (const HistogramBin& b : bins) {
    CHECK(b.hi == doctest::Approx(b.lo + 0.25));
    total += b.count;
    integral += b.density * 0.25;
  }
  CHECK(total == 6);
  CHECK(integral == doctest::Approx(1.0));
}

TEST_CASE("performance grouping keys on student and course") {
  std::vector<GradeRecord> grades;
  GradeRecord g;
  g.participant = 1;
  g.course = 10;
  g.grade = 12;
  grades.push_back(g);
  g.course = 11;
  g.grade = 0;
  grades.push_back(g);
  g.participant = 2;
  g.no_show = true;
  grades.push_back(g);

  const auto groups = performance_grouping(grades);
  CHECK(groups.size() == 2);
  CHECK(groups.at({1, 10}) == PerfGroup::High);
  CHECK(groups.at({1, 11}) == PerfGroup::Low);
  CHECK(groups.count({2, 11}) == 0);
}

TEST_CASE("weekly trend averages member observations per group") {
  AttendanceMatrix m;
  const auto add = [&](Id p, Id c, int week, double frac) {
    AttendanceEntry e;
    e.participant = p;
    e.course = c;
    e.block_start = week * 1000;
    e.week = week;
    e.estimated_bins = 4;
    e.attended_bins = static_cast<int>(frac * 4);
    m.entries.push_back(e);
  };
  add(1, 10, 1, 1.0);
  add(2, 10, 1, 0.5);
  add(1, 10, 2, 0.25);

  std::map<std::pair<Id, Id>, PerfGroup> grouping{
      {{1, 10}, PerfGroup::High}, {{2, 10}, PerfGroup::High}};
  const auto trend = weekly_trend(m, grouping);
  REQUIRE(trend.count(PerfGroup::High) == 1);
  const auto& series = trend.at(PerfGroup::High);
  REQUIRE(series.size() == 2);
  CHECK(series[0].first == 1);
  CHECK(series[0].second == doctest::Approx(0.75));
  CHECK(series[1].second == doctest::Approx(0.25));
}

TEST_CASE("per-course correlations skip tiny and constant courses") {
  AttendanceMatrix m;
  const auto add = [&](Id p, Id c, int att) {
    AttendanceEntry e;
    e.participant = p;
    e.course = c;
    e.block_start = 0;
    e.week = 1;
    e.estimated_bins = 4;
    e.attended_bins = att;
    m.entries.push_back(e);
  };
  std::vector<GradeRecord> grades;
  const auto grade = [&](Id p, Id c, int gr) {
    GradeRecord g;
    g.participant = p;
    g.course = c;
    g.grade = gr;
    grades.push_back(g);
  };

  // Course 1: clean increasing relation over four students. Grades are
  // distinct so the tie-free Spearman value is exactly 1.
  for (Id p = 1; p <= 4; ++p) {
    add(p, 1, static_cast<int>(p));
    grade(p, 1, p == 1 ? 0 : (p == 2 ? 2 : (p == 3 ? 7 : 12)));
  }
  // Course 2: only two graded students.
  add(1, 2, 1);
  add(2, 2, 2);
  grade(1, 2, 7);
  grade(2, 2, 10);
  // Course 3: constant attendance.
  for (Id p = 1; p <= 3; ++p) {
    add(p, 3, 2);
    grade(p, 3, p == 1 ? 0 : (p == 2 ? 7 : 12));
  }

  const PerCourseCorrelations pcc = per_course_correlations(m, grades);
  REQUIRE(pcc.correlations.size() == 1);
  CHECK(pcc.correlations[0].course == 1);
  CHECK(pcc.correlations[0].n == 4);
  CHECK(pcc.correlations[0].rho == doctest::Approx(1.0));
  CHECK(pcc.skipped.size() == 2);
}
