#pragma once

#include <array>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "campus/attendance.hpp"
#include "campus/types.hpp"

namespace campus {

// Seven-point grade scale collapsed into three performance tiers.
enum class PerfGroup { Low, Moderate, High };

// Throws std::invalid_argument for grades outside the scale.
PerfGroup performance_group(int grade);
const char* perf_group_name(PerfGroup g);

std::vector<double> average_ranks(std::span<const double> values);

// Pearson correlation of average-ranked values. Requires equal lengths,
// n >= 3, and neither input constant.
double spearman(std::span<const double> x, std::span<const double> y);

double pearson(std::span<const double> x, std::span<const double> y);

enum class MwMode { exact, approx };

struct MwResult {
  double u = 0.0;   // ties counted half
  double p = 1.0;   // two-sided
};

// Exact mode scores every way of labeling the pooled sample; approx mode is
// the tie-corrected normal approximation with continuity correction.
MwResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                        MwMode mode);

// All C(k,2) slopes over pairs with distinct t. Requires at least one such
// pair.
std::vector<double> pairwise_slopes(
    std::span<const std::pair<double, double>> series);

// Median of pairwise_slopes.
double theil_sen(std::span<const std::pair<double, double>> series);

struct QuintileGrouping {
  std::vector<std::vector<Id>> groups;              // ascending attendance
  std::vector<std::pair<double, double>> spans;     // attendance min/max
};

// Sorts by (attendance, id) and splits into n_groups contiguous groups,
// remainder going to the lowest-attendance groups.
QuintileGrouping quintile_grouping(const std::map<Id, double>& term_attendance,
                                   int n_groups = 5);

struct GradeHistogram {
  std::array<double, kGradeScale.size()> freq{};  // normalized, scale order
  int n = 0;                                      // graded records counted
  double fail_rate() const;                       // mass at -3 and 0
};

// no_show records are excluded. Empty groups yield an all-zero histogram.
GradeHistogram grade_distribution(const std::set<Id>& group,
                                  std::span<const GradeRecord> grades);

// (participant, course) -> tier for graded records; no_shows dropped.
std::map<std::pair<Id, Id>, PerfGroup> performance_grouping(
    std::span<const GradeRecord> grades);

// Per group and week, the mean session fraction over member observations.
std::map<PerfGroup, std::vector<std::pair<int, double>>> weekly_trend(
    const AttendanceMatrix& matrix,
    const std::map<std::pair<Id, Id>, PerfGroup>& grouping);

struct BoxSummary {
  double median = 0.0;
  double mean = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double lower_fence = 0.0;  // q1 - IQR
  double upper_fence = 0.0;  // q3 + IQR
  int n = 0;
};

// Quartiles by linear interpolation between order statistics; fences sit one
// IQR beyond the quartiles.
BoxSummary box_summary(std::span<const double> values);

struct CourseCorrelation {
  Id course = 0;
  double rho = 0.0;
  int n = 0;
};

struct PerCourseCorrelations {
  std::vector<CourseCorrelation> correlations;           // sorted by course
  std::vector<std::pair<Id, std::string>> skipped;       // course, reason
};

// Spearman of per-course attendance vs grade. Courses with fewer than three
// graded participants, or with a constant side, are skipped with a note.
PerCourseCorrelations per_course_correlations(
    const AttendanceMatrix& matrix, std::span<const GradeRecord> grades);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
  double density = 0.0;  // count / (total * width)
};

// Fixed-width bins covering [min, max] of the data.
std::vector<HistogramBin> density_histogram(std::span<const double> values,
                                            double bin_width);

}  // namespace campus
