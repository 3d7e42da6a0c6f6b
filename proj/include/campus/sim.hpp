#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "campus/attendance.hpp"
#include "campus/config.hpp"
#include "campus/dataset.hpp"
#include "campus/types.hpp"

namespace campus {

// Weekday slots: 5 days x {08:00, 13:00} UTC; course c meets in slot c mod 10.
inline constexpr Timestamp kSimEpoch = 1378080000;  // a Monday, 00:00 UTC
inline constexpr int kSlotsPerWeek = 10;

struct SimConfig {
  std::int64_t n_students = 200;
  std::int64_t n_courses = 10;
  int weeks = 13;
  int courses_per_student = 3;
  Timestamp bin_width_s = 900;
  Timestamp block_duration_s = 14400;

  double gps_sigma_m = 25.0;
  double accuracy_min_m = 5.0;   // reported accuracy sampled uniformly
  double accuracy_max_m = 50.0;
  double bt_detect_prob = 0.8;   // per ordered co-present pair per bin

  double mean_degree = 4.4;      // message-network target
  double homophily = 0.5;        // 0 = uniform pairing
  double coupling = 0.8;         // ability -> attendance driver weight

  // Weekly decline of presence probability, as a fraction per week, by the
  // tier the student's grade lands in.
  double decay_low = -0.014;
  double decay_moderate = -0.006;
  double decay_high = -0.004;

  // Fraction of students who sit out skipped blocks in a random campus
  // building instead of at home (false-attendance stress knob).
  double on_campus_absentee_frac = 0.0;

  std::uint64_t seed = 1;

  std::vector<GeoPoint> buildings;  // empty -> default 8-building grid
  CampusBoundary campus;            // empty -> default rectangle

  // Reads the sim_* relevant keys that are present; missing keys keep their
  // defaults. Throws on out-of-range values.
  static SimConfig from(const Config& cfg);
  void validate() const;
};

CampusBoundary default_campus();
std::vector<GeoPoint> default_buildings();

struct TruthBin {
  Id student = 0;
  Id course = 0;
  Timestamp block_start = 0;
  int bin_index = 0;
  bool present = false;
};

struct TrueLocation {
  Id course = 0;
  Timestamp block_start = 0;
  int bin_index = 0;
  GeoPoint room;
};

struct GroundTruth {
  std::vector<TruthBin> presence;      // every enrolled (student, block, bin)
  std::vector<TrueLocation> locations;
};

struct SimOutput {
  Dataset dataset;
  GroundTruth truth;
};

// Deterministic for a given config (all randomness flows from config.seed).
SimOutput generate(const SimConfig& cfg);

// Emits the seven dataset CSVs plus truth.csv and true_locations.csv with
// fixed numeric formatting, so identical configs produce identical bytes.
void write_dataset(const SimOutput& out, const std::filesystem::path& dir);

// Reads truth.csv and true_locations.csv back.
GroundTruth read_truth(const std::filesystem::path& dir);

struct RecoveryMetrics {
  std::size_t n_location_bins = 0;   // estimates scored against a true room
  double frac_within_50 = 0.0;
  double frac_within_100 = 0.0;
  double frac_within_200 = 0.0;
  double max_error_m = 0.0;
  double mean_error_m = 0.0;

  std::size_t n_attendance_bins = 0;  // accepted bins scored
  double precision = 0.0;             // predicted attendees truly present
  double recall = 0.0;                // truly present found, accepted bins
  double coverage = 0.0;              // accepted bins over all truth bins

  double term_spearman = 0.0;         // true vs estimated per-student means
  std::size_t n_students = 0;
};

// Joins pipeline outputs with the ground truth of the same run. Throws
// DataError when an output row has no truth counterpart (mismatched runs) or
// when there is nothing to score.
RecoveryMetrics score_against_truth(const AttendanceResult& result,
                                    const GroundTruth& truth);

}  // namespace campus
