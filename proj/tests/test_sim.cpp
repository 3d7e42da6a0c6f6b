#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include "campus/attendance.hpp"
#include "campus/csv.hpp"
#include "campus/dataset.hpp"
#include "campus/geo.hpp"
#include "campus/sim.hpp"

using namespace campus;
namespace fs = std::filesystem;

namespace {

// Small but still above the roster cutoff (8) per course.
SimConfig small_config(std::uint64_t seed) {
  SimConfig c;
  c.n_students = 48;
  c.n_courses = 5;
  c.weeks = 4;
  c.courses_per_student = 2;
  c.seed = seed;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f);
  return std::string(std::istreambuf_iterator<char>(f),
                     std::istreambuf_iterator<char>());
}

AttendanceResult run_pipeline_on(const Dataset& ds, double radius_m = 200.0) {
  Dataset copy = ds;
  copy.rosters = filter_courses(copy.rosters, 8, 14400);
  AttendanceOptions opts;
  opts.radius_m = radius_m;
  return run_attendance(copy, opts);
}

}  // namespace

TEST_CASE("config validation rejects out-of-range settings") {
  CHECK_NOTHROW(small_config(1).validate());

  SimConfig c = small_config(1);
  c.n_students = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);

  c = small_config(1);
  c.courses_per_student = 6;  // only 5 courses exist
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);

  c = small_config(1);
  c.bin_width_s = 700;  // does not divide the block
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);

  c = small_config(1);
  c.bt_detect_prob = 1.5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);

  c = small_config(1);
  c.mean_degree = 100.0;  // more edges than pairs
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);

  c = small_config(1);
  c.accuracy_min_m = 50.0;
  c.accuracy_max_m = 5.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("config keys map onto simulator settings") {
  Config cfg;
  cfg.set("n_students", "64");
  cfg.set("decay_low_pp_week", "-2.0");
  cfg.set("homophily", "0.9");
  cfg.set("seed", "17");
  const SimConfig sc = SimConfig::from(cfg);
  CHECK(sc.n_students == 64);
  CHECK(sc.decay_low == doctest::Approx(-0.02));
  CHECK(sc.homophily == doctest::Approx(0.9));
  CHECK(sc.seed == 17);
  CHECK(sc.n_courses == 10);  // untouched default
}

TEST_CASE("same seed reproduces the dataset byte for byte") {
  const SimConfig cfg = small_config(11);
  const fs::path a = fs::temp_directory_path() / "sim_rep_a";
  const fs::path b = fs::temp_directory_path() / "sim_rep_b";
  write_dataset(generate(cfg), a);
  write_dataset(generate(cfg), b);
  for (const char* name :
       {"fixes.csv", "scans.csv", "roster.csv", "schedule.csv", "grades.csv",
        "messages.csv", "campus.csv", "truth.csv", "true_locations.csv"}) {
    CAPTURE(name);
    CHECK(slurp(a / name) == slurp(b / name));
  }
}

TEST_CASE("different seeds give different data") {
  const SimOutput a = generate(small_config(1));
  const SimOutput b = generate(small_config(2));
  REQUIRE(a.dataset.fixes.size() > 0);
  bool any_diff = a.dataset.fixes.size() != b.dataset.fixes.size();
  for (std::size_t i = 0; !any_diff && i < a.dataset.fixes.size(); ++i)
    any_diff = a.dataset.fixes[i].point.lat != b.dataset.fixes[i].point.lat;
  CHECK(any_diff);
}

TEST_CASE("generated files re-parse strictly with zero violations") {
  const fs::path dir = fs::temp_directory_path() / "sim_strict";
  write_dataset(generate(small_config(3)), dir);
  ParseOptions opts;
  opts.strict = true;
  ParseReport report;
  const Dataset ds =
      parse_dataset(DatasetPaths::in_dir(dir), opts, &report);
  CHECK(report.rejected.empty());
  CHECK(ds.rosters.size() == 5);
  for (const CourseRoster& r : ds.rosters) {
    CHECK(r.participants.size() >= 8);
    CHECK(r.blocks.size() == 4);  // one per week
    for (const ScheduleBlock& b : r.blocks) {
      CHECK(b.duration_s == 14400);
      REQUIRE(b.official_location.has_value());
      CHECK(contains(ds.campus, *b.official_location));
    }
  }
  // Every enrolled student occupies distinct weekly slots.
  std::map<Id, std::set<Timestamp>> starts;  // student -> block starts week 1
  for (const CourseRoster& r : ds.rosters)
    for (Id p : r.participants) starts[p].insert(r.blocks[0].start);
  for (const auto& [p, s] : starts) CHECK(s.size() == 2);
}

TEST_CASE("message volume follows the requested mean degree") {
  SimConfig cfg = small_config(4);
  cfg.mean_degree = 3.0;
  const SimOutput out = generate(cfg);
  // One message per sampled edge: n * k / 2.
  CHECK(out.dataset.messages.size() == 48 * 3 / 2);
  std::set<std::pair<Id, Id>> edges;
  for (const MessageEvent& m : out.dataset.messages) {
    CHECK(m.sender != m.receiver);
    edges.insert({std::min(m.sender, m.receiver),
                  std::max(m.sender, m.receiver)});
  }
  CHECK(edges.size() == out.dataset.messages.size());  // no duplicate pair
}

TEST_CASE("ground truth round-trips through the files") {
  const SimConfig cfg = small_config(5);
  const SimOutput out = generate(cfg);
  const fs::path dir = fs::temp_directory_path() / "sim_truth";
  write_dataset(out, dir);
  const GroundTruth truth = read_truth(dir);
  CHECK(truth.presence.size() == out.truth.presence.size());
  CHECK(truth.locations.size() == out.truth.locations.size());
  REQUIRE(truth.presence.size() > 0);
  CHECK(truth.presence[0].student == out.truth.presence[0].student);
  CHECK(truth.presence[0].present == out.truth.presence[0].present);
}

TEST_CASE("a noiseless world is reconstructed exactly") {
  SimConfig cfg = small_config(6);
  cfg.gps_sigma_m = 0.0;
  cfg.bt_detect_prob = 1.0;
  const SimOutput out = generate(cfg);
  const AttendanceResult res = run_pipeline_on(out.dataset);
  const RecoveryMetrics m = score_against_truth(res, out.truth);
  CHECK(m.n_location_bins == out.truth.locations.size());
  CHECK(m.frac_within_50 == 1.0);
  CHECK(m.max_error_m < 0.5);
  CHECK(m.precision == 1.0);
  CHECK(m.recall == 1.0);
  CHECK(m.coverage == 1.0);
}

TEST_CASE("location error grows with the configured gps noise") {
  double prev_mean = -1.0;
  for (double sigma : {0.0, 20.0, 80.0}) {
    SimConfig cfg = small_config(7);  // same seed: same noise deviates
    cfg.gps_sigma_m = sigma;
    const SimOutput out = generate(cfg);
    const RecoveryMetrics m =
        score_against_truth(run_pipeline_on(out.dataset), out.truth);
    CHECK(m.mean_error_m > prev_mean);
    prev_mean = m.mean_error_m;
  }
}

TEST_CASE("growing the capture radius only adds attendees") {
  const SimOutput out = generate(small_config(8));
  const AttendanceResult tight = run_pipeline_on(out.dataset, 200.0);
  const AttendanceResult wide = run_pipeline_on(out.dataset, 300.0);
  REQUIRE(tight.bin_attendance.size() == wide.bin_attendance.size());
  for (std::size_t i = 0; i < tight.bin_attendance.size(); ++i) {
    const auto& t = tight.bin_attendance[i];
    const auto& w = wide.bin_attendance[i];
    CHECK(std::includes(w.attendees.begin(), w.attendees.end(),
                        t.attendees.begin(), t.attendees.end()));
  }
}

TEST_CASE("absentees parked on campus hurt precision") {
  SimConfig clean = small_config(9);
  SimConfig noisy = small_config(9);
  noisy.on_campus_absentee_frac = 1.0;
  const SimOutput a = generate(clean);
  const SimOutput b = generate(noisy);
  const RecoveryMetrics ma =
      score_against_truth(run_pipeline_on(a.dataset), a.truth);
  const RecoveryMetrics mb =
      score_against_truth(run_pipeline_on(b.dataset), b.truth);
  CHECK(mb.precision < ma.precision);
  CHECK(ma.precision > 0.99);
}

TEST_CASE("mismatched runs cannot be scored") {
  const SimOutput a = generate(small_config(1));
  SimConfig other = small_config(1);
  other.weeks = 3;
  const SimOutput b = generate(other);
  const AttendanceResult res = run_pipeline_on(a.dataset);
  CHECK_THROWS_AS(score_against_truth(res, b.truth), DataError);
}
