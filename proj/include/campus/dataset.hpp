#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "campus/types.hpp"

namespace campus {

struct Dataset {
  std::vector<LocationFix> fixes;
  std::vector<ProximityScan> scans;
  std::vector<CourseRoster> rosters;  // schedule blocks merged in
  std::vector<GradeRecord> grades;
  std::vector<MessageEvent> messages;
  CampusBoundary campus;
};

// One rejected row. In lenient mode these are collected and the row is
// skipped; in strict mode the first one is fatal.
struct RowDiagnostic {
  std::string file;
  std::size_t line;  // 1-based, header included
  std::string message;
};

struct ParseReport {
  std::vector<RowDiagnostic> rejected;
  std::size_t rows_kept = 0;
};

struct ParseOptions {
  bool strict = false;
  // Optional study window; when set, fixes/scans/messages outside
  // [study_start, study_end) violate the timestamp invariant.
  std::optional<Timestamp> study_start;
  std::optional<Timestamp> study_end;
};

// Expected file names inside a dataset directory.
struct DatasetPaths {
  std::filesystem::path fixes;
  std::filesystem::path scans;
  std::filesystem::path roster;
  std::filesystem::path schedule;
  std::filesystem::path grades;
  std::filesystem::path messages;
  std::filesystem::path campus;

  static DatasetPaths in_dir(const std::filesystem::path& dir);
};

// Parses and validates all input CSVs. Malformed rows are reported with file
// and line number; duplicates are kept (independent readings). Throws
// DataError on missing files, schema mismatch, or (strict mode) the first
// invariant violation.
Dataset parse_dataset(const DatasetPaths& paths, const ParseOptions& opts,
                      ParseReport* report = nullptr);

// Standalone strict loaders for the two files the analysis stage reads on
// its own. Any invalid row throws.
std::vector<GradeRecord> load_grades(const std::filesystem::path& path);
std::vector<MessageEvent> load_messages(const std::filesystem::path& path);

// Keeps only rosters whose blocks all have the required duration and whose
// participant count meets the minimum. Idempotent.
std::vector<CourseRoster> filter_courses(std::vector<CourseRoster> rosters,
                                         std::size_t min_participants,
                                         Timestamp required_duration_s);

// Splits a block into consecutive bins of bin_width_s covering
// [start, start + duration). Throws unless bin_width_s divides the duration.
std::vector<TimeBin> bin_schedule(const ScheduleBlock& block,
                                  Timestamp bin_width_s);

}  // namespace campus
