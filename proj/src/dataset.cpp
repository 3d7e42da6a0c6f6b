#include "campus/dataset.hpp"

#include <algorithm>
#include <map>

#include "campus/csv.hpp"

namespace campus {

namespace {

class RowSink {
 public:
  RowSink(const ParseOptions& opts, ParseReport* report)
      : opts_(opts), report_(report) {}

  // Returns true if the caller should keep the row.
  bool ok() {
    if (report_) ++report_->rows_kept;
    return true;
  }

  bool reject(const std::string& file, std::size_t line,
              const std::string& message) {
    if (opts_.strict)
      throw DataError(file + ":" + std::to_string(line) + ": " + message);
    if (report_) report_->rejected.push_back({file, line, message});
    return false;
  }

  bool in_study_window(Timestamp t) const {
    if (opts_.study_start && t < *opts_.study_start) return false;
    if (opts_.study_end && t >= *opts_.study_end) return false;
    return true;
  }

 private:
  const ParseOptions& opts_;
  ParseReport* report_;
};

void check_header(const CsvFile& csv, std::initializer_list<const char*> cols) {
  const auto& h = csv.header();
  if (h.size() != cols.size()) {
    throw DataError(csv.name() + ": header mismatch, expected " +
                    std::to_string(cols.size()) + " columns, got " +
                    std::to_string(h.size()));
  }
  std::size_t i = 0;
  for (const char* c : cols) {
    if (h[i] != c)
      throw DataError(csv.name() + ": header column " + std::to_string(i + 1) +
                      " is '" + std::string(h[i]) + "', expected '" + c + "'");
    ++i;
  }
}

bool wrong_width(RowSink& sink, const CsvFile& csv, std::size_t line,
                 const std::vector<std::string_view>& f, std::size_t want) {
  if (f.size() == want) return false;
  sink.reject(csv.name(), line, "expected " + std::to_string(want) +
                                    " fields, got " + std::to_string(f.size()));
  return true;
}

std::vector<GradeRecord> read_grades(const std::filesystem::path& path,
                                     RowSink& sink) {
  std::vector<GradeRecord> grades;
  CsvFile csv(path);
  check_header(csv, {"participant", "course", "grade", "no_show"});
  csv.for_each_row([&](std::size_t line, const auto& f) {
    if (wrong_width(sink, csv, line, f, 4)) return;
    GradeRecord g;
    std::int64_t no_show = 0;
    if (!parse_i64(f[0], g.participant) || !parse_i64(f[1], g.course) ||
        !parse_i64(f[3], no_show) || (no_show != 0 && no_show != 1)) {
      sink.reject(csv.name(), line, "malformed numeric field");
      return;
    }
    g.no_show = no_show == 1;
    if (g.no_show) {
      if (!f[2].empty()) {
        sink.reject(csv.name(), line, "grade must be blank when no_show=1");
        return;
      }
    } else {
      std::int64_t grade = 0;
      if (!parse_i64(f[2], grade) || !valid_grade(static_cast<int>(grade))) {
        sink.reject(csv.name(), line,
                    "grade not on the 7-point scale: " + std::string(f[2]));
        return;
      }
      g.grade = static_cast<int>(grade);
    }
    if (sink.ok()) grades.push_back(g);
  });
  return grades;
}

std::vector<MessageEvent> read_messages(const std::filesystem::path& path,
                                        RowSink& sink) {
  std::vector<MessageEvent> messages;
  CsvFile csv(path);
  check_header(csv, {"sender", "receiver", "t"});
  messages.reserve(csv.row_count());
  csv.for_each_row([&](std::size_t line, const auto& f) {
    if (wrong_width(sink, csv, line, f, 3)) return;
    MessageEvent m;
    if (!parse_i64(f[0], m.sender) || !parse_i64(f[1], m.receiver) ||
        !parse_i64(f[2], m.t)) {
      sink.reject(csv.name(), line, "malformed numeric field");
      return;
    }
    if (m.sender == m.receiver) {
      sink.reject(csv.name(), line, "sender equals receiver");
      return;
    }
    if (!sink.in_study_window(m.t)) {
      sink.reject(csv.name(), line, "timestamp outside study window");
      return;
    }
    if (sink.ok()) messages.push_back(m);
  });
  return messages;
}

}  // namespace

DatasetPaths DatasetPaths::in_dir(const std::filesystem::path& dir) {
  return DatasetPaths{dir / "fixes.csv",    dir / "scans.csv",
                      dir / "roster.csv",   dir / "schedule.csv",
                      dir / "grades.csv",   dir / "messages.csv",
                      dir / "campus.csv"};
}

Dataset parse_dataset(const DatasetPaths& paths, const ParseOptions& opts,
                      ParseReport* report) {
  Dataset ds;
  RowSink sink(opts, report);

  {
    CsvFile csv(paths.fixes);
    check_header(csv, {"participant", "t", "lat", "lon", "accuracy"});
    ds.fixes.reserve(csv.row_count());
    csv.for_each_row([&](std::size_t line, const auto& f) {
      if (wrong_width(sink, csv, line, f, 5)) return;
      LocationFix fix;
      if (!parse_i64(f[0], fix.participant) || !parse_i64(f[1], fix.t) ||
          !parse_f64(f[2], fix.point.lat) || !parse_f64(f[3], fix.point.lon) ||
          !parse_f64(f[4], fix.accuracy_m)) {
        sink.reject(csv.name(), line, "malformed numeric field");
        return;
      }
      if (!valid_geo_point(fix.point)) {
        sink.reject(csv.name(), line, "lat/lon out of range");
        return;
      }
      if (!(fix.accuracy_m > 0)) {
        sink.reject(csv.name(), line, "accuracy must be > 0, got " +
                                          std::string(f[4]));
        return;
      }
      if (!sink.in_study_window(fix.t)) {
        sink.reject(csv.name(), line, "timestamp outside study window");
        return;
      }
      if (sink.ok()) ds.fixes.push_back(fix);
    });
  }

  {
    CsvFile csv(paths.scans);
    check_header(csv, {"scanner", "seen", "t"});
    ds.scans.reserve(csv.row_count());
    csv.for_each_row([&](std::size_t line, const auto& f) {
      if (wrong_width(sink, csv, line, f, 3)) return;
      ProximityScan scan;
      if (!parse_i64(f[0], scan.scanner) || !parse_i64(f[1], scan.seen) ||
          !parse_i64(f[2], scan.t)) {
        sink.reject(csv.name(), line, "malformed numeric field");
        return;
      }
      if (scan.scanner == scan.seen) {
        sink.reject(csv.name(), line, "scanner equals seen");
        return;
      }
      if (!sink.in_study_window(scan.t)) {
        sink.reject(csv.name(), line, "timestamp outside study window");
        return;
      }
      if (sink.ok()) ds.scans.push_back(scan);
    });
  }

  std::map<Id, CourseRoster> rosters;
  {
    CsvFile csv(paths.roster);
    check_header(csv, {"course", "participant"});
    csv.for_each_row([&](std::size_t line, const auto& f) {
      if (wrong_width(sink, csv, line, f, 2)) return;
      Id course = 0, participant = 0;
      if (!parse_i64(f[0], course) || !parse_i64(f[1], participant)) {
        sink.reject(csv.name(), line, "malformed numeric field");
        return;
      }
      if (sink.ok()) {
        auto& r = rosters[course];
        r.course = course;
        r.participants.insert(participant);
      }
    });
  }

  {
    CsvFile csv(paths.schedule);
    check_header(csv, {"course", "start", "duration_s", "week", "official_lat",
                       "official_lon"});
    csv.for_each_row([&](std::size_t line, const auto& f) {
      if (wrong_width(sink, csv, line, f, 6)) return;
      ScheduleBlock b;
      std::int64_t week = 0;
      if (!parse_i64(f[0], b.course) || !parse_i64(f[1], b.start) ||
          !parse_i64(f[2], b.duration_s) || !parse_i64(f[3], week)) {
        sink.reject(csv.name(), line, "malformed numeric field");
        return;
      }
      b.week = static_cast<int>(week);
      if (b.duration_s <= 0) {
        sink.reject(csv.name(), line, "duration must be > 0");
        return;
      }
      if (b.week < 1) {
        sink.reject(csv.name(), line, "week index must be >= 1");
        return;
      }
      const bool has_lat = !f[4].empty(), has_lon = !f[5].empty();
      if (has_lat != has_lon) {
        sink.reject(csv.name(), line, "official location must give both "
                                      "lat and lon or neither");
        return;
      }
      if (has_lat) {
        GeoPoint p;
        if (!parse_f64(f[4], p.lat) || !parse_f64(f[5], p.lon) ||
            !valid_geo_point(p)) {
          sink.reject(csv.name(), line, "malformed official location");
          return;
        }
        b.official_location = p;
      }
      auto it = rosters.find(b.course);
      if (it == rosters.end()) {
        sink.reject(csv.name(), line, "block for course " +
                                          std::to_string(b.course) +
                                          " with no roster entries");
        return;
      }
      // Blocks of one course must not overlap.
      for (const ScheduleBlock& other : it->second.blocks) {
        if (b.start < other.start + other.duration_s &&
            other.start < b.start + b.duration_s) {
          sink.reject(csv.name(), line, "block overlaps an earlier block of "
                                        "the same course");
          return;
        }
      }
      if (sink.ok()) it->second.blocks.push_back(b);
    });
  }

  for (auto& [course, roster] : rosters) {
    std::sort(roster.blocks.begin(), roster.blocks.end(),
              [](const ScheduleBlock& a, const ScheduleBlock& b) {
                return a.start < b.start;
              });
    ds.rosters.push_back(std::move(roster));
  }

  ds.grades = read_grades(paths.grades, sink);
  ds.messages = read_messages(paths.messages, sink);

  {
    CsvFile csv(paths.campus);
    check_header(csv, {"lat", "lon"});
    csv.for_each_row([&](std::size_t line, const auto& f) {
      if (wrong_width(sink, csv, line, f, 2)) return;
      GeoPoint p;
      if (!parse_f64(f[0], p.lat) || !parse_f64(f[1], p.lon) ||
          !valid_geo_point(p)) {
        sink.reject(csv.name(), line, "malformed vertex");
        return;
      }
      if (sink.ok()) ds.campus.ring.push_back(p);
    });
    if (ds.campus.ring.size() < 3)
      throw DataError(csv.name() + ": campus ring needs at least 3 vertices");
  }

  return ds;
}

std::vector<GradeRecord> load_grades(const std::filesystem::path& path) {
  ParseOptions opts;
  opts.strict = true;
  RowSink sink(opts, nullptr);
  return read_grades(path, sink);
}

std::vector<MessageEvent> load_messages(const std::filesystem::path& path) {
  ParseOptions opts;
  opts.strict = true;
  RowSink sink(opts, nullptr);
  return read_messages(path, sink);
}

std::vector<CourseRoster> filter_courses(std::vector<CourseRoster> rosters,
                                         std::size_t min_participants,
                                         Timestamp required_duration_s) {
  std::erase_if(rosters, [&](const CourseRoster& r) {
    if (r.participants.size() < min_participants) return true;
    return std::any_of(r.blocks.begin(), r.blocks.end(),
                       [&](const ScheduleBlock& b) {
                         return b.duration_s != required_duration_s;
                       });
  });
  return rosters;
}

std::vector<TimeBin> bin_schedule(const ScheduleBlock& block,
                                  Timestamp bin_width_s) {
  if (bin_width_s <= 0)
    throw std::invalid_argument("bin_schedule: bin width must be positive");
  if (bin_width_s > block.duration_s || block.duration_s % bin_width_s != 0)
    throw std::invalid_argument(
        "bin_schedule: bin width " + std::to_string(bin_width_s) +
        " does not divide block duration " + std::to_string(block.duration_s));
  const int n = static_cast<int>(block.duration_s / bin_width_s);
  std::vector<TimeBin> bins;
  bins.reserve(n);
  for (int i = 0; i < n; ++i) {
    bins.push_back(TimeBin{i, block.start + i * bin_width_s,
                           block.start + (i + 1) * bin_width_s});
  }
  return bins;
}

}  // namespace campus
