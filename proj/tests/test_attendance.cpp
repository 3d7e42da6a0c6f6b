#include <doctest.h>

#include <cmath>
#include <vector>

#include "campus/attendance.hpp"
#include "campus/csv.hpp"
#include "campus/geo.hpp"

using namespace campus;

namespace {

const TimeBin kBin{0, 0, 900};

CampusBoundary square() {
  CampusBoundary b;
  b.ring = {{55.77, 12.50}, {55.80, 12.50}, {55.80, 12.54}, {55.77, 12.54}};
  return b;
}

LocationFix fix(Id who, Timestamp t, double lat, double lon, double acc) {
  return LocationFix{who, t, {lat, lon}, acc};
}

PrimaryCluster cluster(std::set<Id> members) {
  PrimaryCluster c;
  c.anchor = *members.begin();
  c.members = std::move(members);
  return c;
}

}  // namespace

TEST_CASE("bin location is the median of best-accuracy member fixes") {
  const std::vector<LocationFix> fixes{
      fix(1, 10, 55.785, 12.521, 20.0),
      fix(1, 20, 55.700, 12.400, 30.0),  // worse accuracy, ignored
      fix(2, 10, 55.786, 12.522, 10.0),
      fix(3, 10, 55.784, 12.520, 15.0),
      fix(9, 10, 55.790, 12.530, 1.0),   // not a member
  };
  const auto loc = estimate_bin_location(cluster({1, 2, 3}), fixes, kBin,
                                         square());
  REQUIRE(loc.has_value());
  CHECK(loc->lat == doctest::Approx(55.785).epsilon(1e-12));
  CHECK(loc->lon == doctest::Approx(12.521).epsilon(1e-12));
}

TEST_CASE("accuracy ties pick the earliest fix") {
  const std::vector<LocationFix> fixes{
      fix(1, 50, 55.785, 12.521, 10.0),
      fix(1, 10, 55.786, 12.522, 10.0),
  };
  const auto loc =
      estimate_bin_location(cluster({1}), fixes, kBin, square());
  REQUIRE(loc.has_value());
  CHECK(loc->lat == 55.786);
}

TEST_CASE("fixes outside the bin never contribute") {
  const std::vector<LocationFix> fixes{
      fix(1, 900, 55.785, 12.521, 1.0),   // bin end is exclusive
      fix(1, -1, 55.785, 12.521, 1.0),
  };
  CHECK_FALSE(
      estimate_bin_location(cluster({1}), fixes, kBin, square()).has_value());
}

TEST_CASE("a median outside campus is rejected") {
  const std::vector<LocationFix> fixes{
      fix(1, 10, 55.90, 12.521, 10.0),
      fix(2, 10, 55.91, 12.522, 10.0),
      fix(3, 10, 55.89, 12.520, 10.0),
  };
  CHECK_FALSE(estimate_bin_location(cluster({1, 2, 3}), fixes, kBin, square())
                  .has_value());
}

TEST_CASE("one off-campus member cannot drag the median out") {
  const std::vector<LocationFix> fixes{
      fix(1, 10, 55.785, 12.521, 10.0),
      fix(2, 10, 55.786, 12.522, 10.0),
      fix(3, 10, 57.00, 13.00, 10.0),
  };
  const auto loc = estimate_bin_location(cluster({1, 2, 3}), fixes, kBin,
                                         square());
  REQUIRE(loc.has_value());
  CHECK(loc->lat == 55.786);
}

TEST_CASE("empty cluster is a caller bug") {
  CHECK_THROWS_AS(
      estimate_bin_location(PrimaryCluster{}, {}, kBin, square()),
      std::invalid_argument);
}

TEST_CASE("attendance combines cluster members and nearby roster members") {
  const GeoPoint room{55.785, 12.521};
  const std::vector<LocationFix> fixes{
      fix(4, 10, 55.7851, 12.5211, 10.0),  // ~13 m away
      fix(5, 10, 55.79, 12.53, 10.0),      // ~800 m away
      fix(6, 10, 55.785, 12.521, 10.0),    // exactly at the estimate
  };
  const std::set<Id> roster{1, 2, 3, 4, 5, 6, 7};
  const auto ids = assign_attendance(room, cluster({1, 2, 3}), fixes, roster,
                                     kBin, 200.0);
  CHECK(ids == std::vector<Id>{1, 2, 3, 4, 6});
}

TEST_CASE("radius growth only adds attendees") {
  const GeoPoint room{55.785, 12.521};
  std::vector<LocationFix> fixes;
  for (Id i = 4; i <= 20; ++i)
    fixes.push_back(fix(i, 10, 55.785 + 0.0001 * static_cast<double>(i - 3),
                        12.521, 10.0));
  std::set<Id> roster;
  for (Id i = 1; i <= 20; ++i) roster.insert(i);
  const PrimaryCluster c = cluster({1, 2, 3});
  std::size_t prev = 0;
  for (double r : {25.0, 50.0, 100.0, 200.0, 500.0}) {
    const auto ids = assign_attendance(room, c, fixes, roster, kBin, r);
    CHECK(ids.size() >= prev);
    prev = ids.size();
  }
}

TEST_CASE("member with a distant fix still attends via the cluster") {
  const GeoPoint room{55.785, 12.521};
  const std::vector<LocationFix> fixes{fix(1, 10, 55.79, 12.53, 10.0)};
  const auto ids = assign_attendance(room, cluster({1, 2}), fixes, {1, 2, 3},
                                     kBin, 200.0);
  CHECK(ids == std::vector<Id>{1, 2});
}

TEST_CASE("non-positive radius is rejected") {
  CHECK_THROWS_AS(assign_attendance({55.785, 12.521}, cluster({1}), {}, {1},
                                    kBin, 0.0),
                  std::invalid_argument);
}

TEST_CASE("attendance matrix aggregates per student, course and week") {
  AttendanceMatrix m;
  const auto add = [&](Id p, Id c, Timestamp start, int week, int att,
                       int est) {
    AttendanceEntry e;
    e.participant = p;
    e.course = c;
    e.block_start = start;
    e.week = week;
    e.attended_bins = att;
    e.estimated_bins = est;
    m.entries.push_back(e);
  };
  add(1, 10, 0, 1, 16, 16);
  add(1, 10, 1000000, 2, 8, 16);
  add(1, 11, 2000, 1, 0, 16);
  add(2, 10, 0, 1, 4, 8);

  const auto term = m.term_means();
  CHECK(term.at(1) == doctest::Approx((1.0 + 0.5 + 0.0) / 3));
  CHECK(term.at(2) == doctest::Approx(0.5));

  const auto course = m.course_means();
  CHECK(course.at({1, 10}) == doctest::Approx(0.75));
  CHECK(course.at({1, 11}) == doctest::Approx(0.0));

  const auto weekly = m.weekly_means();
  CHECK(weekly.at({1, 1}) == doctest::Approx(0.5));
  CHECK(weekly.at({1, 2}) == doctest::Approx(0.5));
}

TEST_CASE("end-to-end block sweep on a hand-built dataset") {
  Dataset ds;
  ds.campus = square();
  CourseRoster r;
  r.course = 1;
  r.participants = {1, 2, 3, 4};
  ScheduleBlock b;
  b.course = 1;
  b.start = 0;
  b.duration_s = 1800;  // two bins of 900
  b.week = 1;
  b.official_location = GeoPoint{55.785, 12.521};
  r.blocks = {b};
  ds.rosters = {r};

  // Bin 0: 1-2-3 clique in the room, 4 at home. Bin 1: nobody scans.
  ds.scans = {{1, 2, 10}, {2, 3, 20}, {3, 1, 30}};
  for (Id i : {1, 2, 3})
    ds.fixes.push_back(fix(i, 10 + i, 55.785, 12.521, 10.0));
  ds.fixes.push_back(fix(4, 15, 55.60, 12.30, 5.0));

  AttendanceOptions opts;
  opts.bin_width_s = 900;
  opts.radius_m = 200.0;
  const AttendanceResult res = run_attendance(ds, opts);

  REQUIRE(res.estimates.size() == 2);
  CHECK(res.estimates[0].location.has_value());
  CHECK_FALSE(res.estimates[1].location.has_value());
  REQUIRE(res.bin_attendance.size() == 1);
  CHECK(res.bin_attendance[0].attendees == std::vector<Id>{1, 2, 3});

  REQUIRE(res.matrix.entries.size() == 4);  // every roster member
  for (const AttendanceEntry& e : res.matrix.entries) {
    CHECK(e.estimated_bins == 1);  // only the accepted bin counts
    CHECK(e.attended_bins == (e.participant == 4 ? 0 : 1));
  }
}

TEST_CASE("accuracy report joins estimates with official locations") {
  CourseRoster r;
  r.course = 1;
  r.participants = {1, 2};
  ScheduleBlock b;
  b.course = 1;
  b.start = 0;
  b.duration_s = 900;
  b.week = 1;
  b.official_location = GeoPoint{55.785, 12.521};
  r.blocks = {b};

  BinLocationEstimate e;
  e.course = 1;
  e.block_start = 0;
  e.bin = kBin;
  e.location = GeoPoint{55.785, 12.5226};  // ~100 m east

  AccuracyReport rep = evaluate_accuracy({&e, 1}, {&r, 1});
  REQUIRE(rep.distances_m.size() == 1);
  CHECK(rep.distances_m[0] == doctest::Approx(100.0).epsilon(0.02));
  CHECK(rep.frac_within_200 == 1.0);
  CHECK(rep.frac_within_50 == 0.0);
  REQUIRE(rep.cdf.size() == 1);
  CHECK(rep.cdf[0].second == 1.0);

  // No official locations at all: nothing to score.
  r.blocks[0].official_location.reset();
  CHECK_THROWS_AS(evaluate_accuracy({&e, 1}, {&r, 1}), DataError);
}
