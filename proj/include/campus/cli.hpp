#pragma once

#include <filesystem>
#include <stdexcept>

#include "campus/config.hpp"

namespace campus {

inline constexpr const char* kToolVersion = "0.1.0";

// A configured verification threshold was violated (exit code 3).
struct VerifyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// All built-in defaults as a Config; user entries overlay these so run
// manifests always snapshot the fully resolved configuration.
Config resolved_config(const Config& user);

// simulate: write a synthetic dataset (plus ground truth) into out_dir.
// Requires a seed.
void run_simulate(const Config& cfg, const std::filesystem::path& out_dir);

// pipeline: dataset dir -> attendance.csv, attendance_bins.csv,
// locations.csv, accuracy.csv in out_dir.
void run_pipeline(const Config& cfg, const std::filesystem::path& data_dir,
                  const std::filesystem::path& out_dir, bool strict);

// analyze: grades/messages from data_dir + pipeline outputs already in
// out_dir -> analysis_summary.json and the plot CSVs in out_dir.
void run_analyze(const Config& cfg, const std::filesystem::path& data_dir,
                 const std::filesystem::path& out_dir);

// verify: ground truth in data_dir vs pipeline outputs in out_dir. Throws
// VerifyError when a configured verify_* threshold is violated.
void run_verify(const Config& cfg, const std::filesystem::path& data_dir,
                const std::filesystem::path& out_dir);

// simulate + pipeline + analyze + verify; dataset lands in out_dir/dataset.
void run_all(const Config& cfg, const std::filesystem::path& out_dir,
             bool strict);

}  // namespace campus
