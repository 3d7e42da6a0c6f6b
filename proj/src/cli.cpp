#include "campus/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "campus/attendance.hpp"
#include "campus/csv.hpp"
#include "campus/dataset.hpp"
#include "campus/digest.hpp"
#include "campus/peer.hpp"
#include "campus/sim.hpp"
#include "campus/stats.hpp"

namespace campus {

namespace {

using J = nlohmann::ordered_json;
namespace fs = std::filesystem;

const std::pair<const char*, const char*> kDefaults[] = {
    {"bin_width_s", "900"},
    {"block_duration_s", "14400"},
    {"min_participants", "8"},
    {"radius_m", "200"},
    {"min_cluster_size", "2"},
    {"quintiles", "5"},
    {"mw_exact_max", "16"},
    {"slope_hist_bin_width", "0.002"},
    {"course_corr_bin_width", "0.1"},
    {"peer_use_median", "0"},
    {"peer_same_course", "0"},
    {"n_students", "200"},
    {"n_courses", "10"},
    {"weeks", "13"},
    {"courses_per_student", "3"},
    {"gps_sigma_m", "25"},
    {"accuracy_min_m", "5"},
    {"accuracy_max_m", "50"},
    {"bt_detect_prob", "0.8"},
    {"mean_degree", "4.4"},
    {"homophily", "0.5"},
    {"ability_attendance_coupling", "0.8"},
    {"decay_low_pp_week", "-1.4"},
    {"decay_moderate_pp_week", "-0.6"},
    {"decay_high_pp_week", "-0.4"},
    {"on_campus_absentee_frac", "0"},
};

void write_manifest(const fs::path& out_dir, const std::string& command,
                    const Config& cfg, const std::vector<fs::path>& inputs,
                    const std::vector<fs::path>& outputs) {
  J m;
  m["command"] = command;
  m["tool_version"] = kToolVersion;
  m["seed"] = cfg.get_i64("seed", 0);
  J snapshot = J::object();
  for (const auto& [k, v] : cfg.entries()) snapshot[k] = v;
  m["config"] = std::move(snapshot);
  J in = J::object();
  for (const fs::path& p : inputs) in[p.filename().string()] = file_digest(p);
  m["inputs"] = std::move(in);
  J out = J::object();
  for (const fs::path& p : outputs) out[p.filename().string()] = file_digest(p);
  m["outputs"] = std::move(out);

  std::ofstream f(out_dir / ("manifest_" + command + ".json"));
  if (!f) throw DataError("cannot write manifest in " + out_dir.string());
  f << m.dump(2) << "\n";
}

std::vector<fs::path> dataset_files(const fs::path& dir) {
  return {dir / "fixes.csv",    dir / "scans.csv",  dir / "roster.csv",
          dir / "schedule.csv", dir / "grades.csv", dir / "messages.csv",
          dir / "campus.csv"};
}

AttendanceOptions attendance_options(const Config& cfg) {
  AttendanceOptions o;
  o.bin_width_s = cfg.get_i64("bin_width_s", 900);
  o.radius_m = cfg.get_f64("radius_m", 200.0);
  if (o.radius_m < 5.0 || o.radius_m > 500.0)
    throw DataError("radius_m must be in [5, 500]");
  o.min_cluster_size = static_cast<std::size_t>(
      std::max<std::int64_t>(2, cfg.get_i64("min_cluster_size", 2)));
  return o;
}

void write_pipeline_outputs(const AttendanceResult& res, const fs::path& dir,
                            std::vector<fs::path>& outputs) {
  {
    const fs::path p = dir / "attendance.csv";
    CsvWriter w(p,
                "participant,course,block_start,week,attended_bins,"
                "estimated_bins,fraction");
    for (const AttendanceEntry& e : res.matrix.entries) {
      w.field(e.participant).field(e.course).field(e.block_start);
      w.field(static_cast<std::int64_t>(e.week));
      w.field(static_cast<std::int64_t>(e.attended_bins));
      w.field(static_cast<std::int64_t>(e.estimated_bins));
      w.field(e.fraction(), 6);
      w.end_row();
    }
    outputs.push_back(p);
  }
  {
    const fs::path p = dir / "attendance_bins.csv";
    CsvWriter w(p, "course,block_start,bin_index,participant");
    for (const BinAttendance& ba : res.bin_attendance)
      for (Id id : ba.attendees) {
        w.field(ba.course).field(ba.block_start);
        w.field(static_cast<std::int64_t>(ba.bin_index)).field(id);
        w.end_row();
      }
    outputs.push_back(p);
  }
  {
    const fs::path p = dir / "locations.csv";
    CsvWriter w(p, "course,block_start,bin_index,lat,lon,cluster_size");
    for (const BinLocationEstimate& e : res.estimates) {
      if (!e.location) continue;
      w.field(e.course).field(e.block_start);
      w.field(static_cast<std::int64_t>(e.bin.index));
      w.field(e.location->lat, 7).field(e.location->lon, 7);
      w.field(static_cast<std::int64_t>(e.cluster ? e.cluster->members.size()
                                                  : 0));
      w.end_row();
    }
    outputs.push_back(p);
  }
}

AttendanceMatrix load_attendance_csv(const fs::path& path) {
  CsvFile csv(path);
  AttendanceMatrix m;
  csv.for_each_row([&](std::size_t line, const auto& f) {
    AttendanceEntry e;
    std::int64_t week = 0, attended = 0, estimated = 0;
    double frac = 0;
    if (f.size() != 7 || !parse_i64(f[0], e.participant) ||
        !parse_i64(f[1], e.course) || !parse_i64(f[2], e.block_start) ||
        !parse_i64(f[3], week) || !parse_i64(f[4], attended) ||
        !parse_i64(f[5], estimated) || !parse_f64(f[6], frac) ||
        estimated < 1 || attended < 0 || attended > estimated)
      throw DataError(csv.name() + ":" + std::to_string(line) +
                      ": malformed attendance row");
    e.week = static_cast<int>(week);
    e.attended_bins = static_cast<int>(attended);
    e.estimated_bins = static_cast<int>(estimated);
    m.entries.push_back(e);
  });
  return m;
}

std::vector<BinLocationEstimate> load_locations_csv(const fs::path& path) {
  CsvFile csv(path);
  std::vector<BinLocationEstimate> out;
  csv.for_each_row([&](std::size_t line, const auto& f) {
    BinLocationEstimate e;
    std::int64_t bin = 0, size = 0;
    GeoPoint p;
    if (f.size() != 6 || !parse_i64(f[0], e.course) ||
        !parse_i64(f[1], e.block_start) || !parse_i64(f[2], bin) ||
        !parse_f64(f[3], p.lat) || !parse_f64(f[4], p.lon) ||
        !parse_i64(f[5], size))
      throw DataError(csv.name() + ":" + std::to_string(line) +
                      ": malformed location row");
    e.bin.index = static_cast<int>(bin);
    e.location = p;
    out.push_back(e);
  });
  return out;
}

std::vector<BinAttendance> load_attendance_bins_csv(const fs::path& path) {
  CsvFile csv(path);
  std::map<std::tuple<Id, Timestamp, int>, std::vector<Id>> grouped;
  csv.for_each_row([&](std::size_t line, const auto& f) {
    Id course = 0, participant = 0;
    Timestamp start = 0;
    std::int64_t bin = 0;
    if (f.size() != 4 || !parse_i64(f[0], course) || !parse_i64(f[1], start) ||
        !parse_i64(f[2], bin) || !parse_i64(f[3], participant))
      throw DataError(csv.name() + ":" + std::to_string(line) +
                      ": malformed attendance bin row");
    grouped[{course, start, static_cast<int>(bin)}].push_back(participant);
  });
  std::vector<BinAttendance> out;
  out.reserve(grouped.size());
  for (auto& [key, ids] : grouped) {
    BinAttendance ba;
    std::tie(ba.course, ba.block_start, ba.bin_index) = key;
    std::sort(ids.begin(), ids.end());
    ba.attendees = std::move(ids);
    out.push_back(std::move(ba));
  }
  return out;
}

MwResult mw_auto(std::span<const double> a, std::span<const double> b,
                 std::int64_t exact_max) {
  const MwMode mode = static_cast<std::int64_t>(a.size() + b.size()) <= exact_max
                          ? MwMode::exact
                          : MwMode::approx;
  return mann_whitney_u(a, b, mode);
}

J box_json(const BoxSummary& b) {
  return J{{"n", b.n},           {"mean", b.mean},
           {"median", b.median}, {"q1", b.q1},
           {"q3", b.q3},         {"lower_fence", b.lower_fence},
           {"upper_fence", b.upper_fence}};
}

}  // namespace

Config resolved_config(const Config& user) {
  Config cfg;
  for (const auto& [k, v] : kDefaults) cfg.set(k, v);
  for (const auto& [k, v] : user.entries()) cfg.set(k, v);
  return cfg;
}

void run_simulate(const Config& cfg, const fs::path& out_dir) {
  cfg.require_i64("seed");
  const SimConfig sc = SimConfig::from(cfg);
  const SimOutput out = generate(sc);
  write_dataset(out, out_dir);
  std::vector<fs::path> outputs = dataset_files(out_dir);
  outputs.push_back(out_dir / "truth.csv");
  outputs.push_back(out_dir / "true_locations.csv");
  write_manifest(out_dir, "simulate", cfg, {}, outputs);
}

void run_pipeline(const Config& cfg, const fs::path& data_dir,
                  const fs::path& out_dir, bool strict) {
  const Timestamp bin_width = cfg.get_i64("bin_width_s", 900);
  const Timestamp block_duration = cfg.get_i64("block_duration_s", 14400);
  if (bin_width < 1 || block_duration % bin_width != 0)
    throw DataError("bin_width_s must divide block_duration_s");

  ParseOptions popts;
  popts.strict = strict;
  ParseReport report;
  Dataset ds = parse_dataset(DatasetPaths::in_dir(data_dir), popts, &report);
  for (const RowDiagnostic& d : report.rejected)
    std::fprintf(stderr, "%s:%zu: skipped row: %s\n", d.file.c_str(), d.line,
                 d.message.c_str());

  ds.rosters = filter_courses(
      std::move(ds.rosters),
      static_cast<std::size_t>(cfg.get_i64("min_participants", 8)),
      block_duration);
  if (ds.rosters.empty())
    throw DataError("zero eligible courses after filtering");

  const AttendanceResult res = run_attendance(ds, attendance_options(cfg));

  fs::create_directories(out_dir);
  std::vector<fs::path> outputs;
  write_pipeline_outputs(res, out_dir, outputs);
  try {
    const AccuracyReport acc = evaluate_accuracy(res.estimates, ds.rosters);
    const fs::path p = out_dir / "accuracy.csv";
    CsvWriter w(p, "distance_m,cum_fraction");
    for (const auto& [d, frac] : acc.cdf) {
      w.field(d, 3).field(frac, 6);
      w.end_row();
    }
    outputs.push_back(p);
  } catch (const DataError& e) {
    std::fprintf(stderr, "accuracy report skipped: %s\n", e.what());
  }
  write_manifest(out_dir, "pipeline", cfg, dataset_files(data_dir), outputs);
}

void run_analyze(const Config& cfg, const fs::path& data_dir,
                 const fs::path& out_dir) {
  const fs::path attendance_path = out_dir / "attendance.csv";
  if (!fs::exists(attendance_path))
    throw DataError("missing pipeline output " + attendance_path.string());
  const AttendanceMatrix matrix = load_attendance_csv(attendance_path);
  const std::vector<GradeRecord> grades =
      load_grades(data_dir / "grades.csv");
  const std::vector<MessageEvent> messages =
      load_messages(data_dir / "messages.csv");

  const bool use_median = cfg.get_bool("peer_use_median", false);
  const bool same_course = cfg.get_bool("peer_same_course", false);
  const std::int64_t exact_max = cfg.get_i64("mw_exact_max", 16);

  std::vector<fs::path> outputs;
  J summary;
  std::vector<std::string> notes;
  const auto section = [&](const char* name, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      notes.push_back(std::string(name) + ": skipped (" + e.what() + ")");
    }
  };

  const auto term_means = matrix.term_means();
  const auto course_means = matrix.course_means();

  {
    std::vector<double> fracs;
    fracs.reserve(matrix.entries.size());
    for (const AttendanceEntry& e : matrix.entries)
      fracs.push_back(e.fraction());
    summary["attendance"] = {{"n_entries", matrix.entries.size()},
                             {"n_students", term_means.size()}};
    if (!fracs.empty())
      summary["attendance"]["box"] = box_json(box_summary(fracs));
  }

  // Attendance vs grade, at the (student, course) level and per student.
  section("attendance_grade_spearman", [&] {
    std::vector<double> att, grd;
    for (const GradeRecord& g : grades) {
      if (g.no_show) continue;
      const auto it = course_means.find({g.participant, g.course});
      if (it == course_means.end()) continue;
      att.push_back(it->second);
      grd.push_back(g.grade);
    }
    summary["attendance_grade_spearman"] = {{"value", spearman(att, grd)},
                                            {"n", att.size()}};
  });
  section("attendance_grade_spearman_term", [&] {
    std::map<Id, std::pair<double, int>> grade_acc;
    for (const GradeRecord& g : grades) {
      if (g.no_show) continue;
      auto& [sum, count] = grade_acc[g.participant];
      sum += g.grade;
      ++count;
    }
    std::vector<double> att, grd;
    for (const auto& [id, sc] : grade_acc) {
      const auto it = term_means.find(id);
      if (it == term_means.end()) continue;
      att.push_back(it->second);
      grd.push_back(sc.first / sc.second);
    }
    summary["attendance_grade_spearman_term"] = {{"value", spearman(att, grd)},
                                                 {"n", att.size()}};
  });

  // Attendance split of the graded population (box stats per grade).
  section("grade_box", [&] {
    std::map<int, std::vector<double>> by_grade;
    for (const GradeRecord& g : grades) {
      if (g.no_show) continue;
      const auto it = course_means.find({g.participant, g.course});
      if (it != course_means.end()) by_grade[g.grade].push_back(it->second);
    }
    if (by_grade.empty()) throw DataError("no graded attendance observations");
    const fs::path p = out_dir / "grade_box.csv";
    CsvWriter w(p, "grade,n,mean,median,q1,q3,lower_fence,upper_fence");
    for (const auto& [grade, vals] : by_grade) {
      const BoxSummary b = box_summary(vals);
      w.field(static_cast<std::int64_t>(grade));
      w.field(static_cast<std::int64_t>(b.n));
      w.field(b.mean, 6).field(b.median, 6).field(b.q1, 6).field(b.q3, 6);
      w.field(b.lower_fence, 6).field(b.upper_fence, 6);
      w.end_row();
    }
    w.close();
    outputs.push_back(p);
  });

  // Quintiles with per-group grade histograms and the pairwise test matrix.
  section("quintiles", [&] {
    const int n_groups =
        static_cast<int>(cfg.get_i64("quintiles", 5));
    const QuintileGrouping q = quintile_grouping(term_means, n_groups);
    const fs::path p = out_dir / "quintiles.csv";
    CsvWriter w(p,
                "quintile,att_lo,att_hi,n_students,n_grades,mean_grade,"
                "fail_rate,f_m3,f_0,f_2,f_4,f_7,f_10,f_12");
    J groups = J::array();
    std::vector<std::vector<double>> pooled(q.groups.size());
    for (std::size_t i = 0; i < q.groups.size(); ++i) {
      const std::set<Id> members(q.groups[i].begin(), q.groups[i].end());
      const GradeHistogram h = grade_distribution(members, grades);
      double mean_grade = 0;
      int n_grades = 0;
      for (const GradeRecord& g : grades)
        if (!g.no_show && members.count(g.participant)) {
          mean_grade += g.grade;
          ++n_grades;
          pooled[i].push_back(g.grade);
        }
      if (n_grades) mean_grade /= n_grades;
      w.field(static_cast<std::int64_t>(i + 1));
      w.field(q.spans[i].first, 6).field(q.spans[i].second, 6);
      w.field(static_cast<std::int64_t>(q.groups[i].size()));
      w.field(static_cast<std::int64_t>(n_grades));
      if (n_grades)
        w.field(mean_grade, 6);
      else
        w.blank();
      w.field(h.fail_rate(), 6);
      for (double f : h.freq) w.field(f, 6);
      w.end_row();

      groups.push_back({{"quintile", i + 1},
                        {"att_lo", q.spans[i].first},
                        {"att_hi", q.spans[i].second},
                        {"n_students", q.groups[i].size()},
                        {"n_grades", n_grades},
                        {"mean_grade", n_grades ? J(mean_grade) : J()},
                        {"fail_rate", h.fail_rate()}});
    }
    w.close();
    outputs.push_back(p);
    summary["quintiles"] = {{"n_groups", q.groups.size()},
                            {"groups", std::move(groups)}};

    J matrix_json = J::array();
    for (std::size_t i = 0; i < pooled.size(); ++i) {
      J row = J::array();
      for (std::size_t j = 0; j < pooled.size(); ++j)
        row.push_back(mw_auto(pooled[i], pooled[j], exact_max).p);
      matrix_json.push_back(std::move(row));
    }
    summary["quintiles"]["mw_p_matrix"] = std::move(matrix_json);
  });

  // Weekly trends per performance group, their robust slopes, the pairwise
  // slope histograms, and the group-level tests on per-student term means.
  const auto grouping = performance_grouping(grades);
  section("trends", [&] {
    const auto trend = weekly_trend(matrix, grouping);
    if (trend.empty()) throw DataError("no graded observations to trend");
    const fs::path p = out_dir / "trends.csv";
    CsvWriter w(p, "group,week,mean_attendance");
    for (const auto& [group, series] : trend)
      for (const auto& [week, mean] : series) {
        w.field(std::string_view(perf_group_name(group)));
        w.field(static_cast<std::int64_t>(week)).field(mean, 6);
        w.end_row();
      }
    w.close();
    outputs.push_back(p);

    const fs::path ph = out_dir / "slope_hist.csv";
    CsvWriter wh(ph, "group,slope_lo,slope_hi,count,density");
    const double bin_w = cfg.get_f64("slope_hist_bin_width", 0.002);
    J slopes = J::object();
    for (const auto& [group, series] : trend) {
      std::vector<std::pair<double, double>> pts;
      for (const auto& [week, mean] : series) pts.emplace_back(week, mean);
      const double slope = theil_sen(pts);
      slopes[perf_group_name(group)] = {
          {"fraction_per_week", slope},
          {"pp_per_week", slope * 100.0},
          {"n_weeks", series.size()}};
      for (const HistogramBin& b :
           density_histogram(pairwise_slopes(pts), bin_w)) {
        wh.field(std::string_view(perf_group_name(group)));
        wh.field(b.lo, 6).field(b.hi, 6);
        wh.field(static_cast<std::int64_t>(b.count)).field(b.density, 6);
        wh.end_row();
      }
    }
    wh.close();
    outputs.push_back(ph);
    summary["trends"] = {{"slopes", std::move(slopes)}};

    std::map<PerfGroup, std::set<Id>> group_students;
    std::map<PerfGroup, std::size_t> group_obs;
    for (const auto& [key, group] : grouping) {
      group_students[group].insert(key.first);
      ++group_obs[group];
    }
    J shares = J::object();
    for (const auto& [group, count] : group_obs)
      shares[perf_group_name(group)] =
          static_cast<double>(count) / static_cast<double>(grouping.size());
    summary["trends"]["observation_shares"] = std::move(shares);

    // Two-sided tests between groups on per-student term means.
    std::map<PerfGroup, std::vector<double>> samples;
    for (const auto& [group, students] : group_students)
      for (Id s : students) {
        const auto it = term_means.find(s);
        if (it != term_means.end()) samples[group].push_back(it->second);
      }
    J tests = J::object();
    const PerfGroup order[] = {PerfGroup::Low, PerfGroup::Moderate,
                               PerfGroup::High};
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = i + 1; j < 3; ++j) {
        const auto a = samples.find(order[i]);
        const auto b = samples.find(order[j]);
        if (a == samples.end() || b == samples.end()) continue;
        const std::string key = std::string(perf_group_name(order[i])) +
                                "_vs_" + perf_group_name(order[j]);
        tests[key] = mw_auto(a->second, b->second, exact_max).p;
      }
    summary["trends"]["term_mean_mw_p"] = std::move(tests);
  });

  // Per-course attendance-grade correlations and their density.
  section("course_correlations", [&] {
    const PerCourseCorrelations pcc = per_course_correlations(matrix, grades);
    const fs::path p = out_dir / "course_corr.csv";
    CsvWriter w(p, "course,n,spearman");
    std::vector<double> rhos;
    for (const CourseCorrelation& c : pcc.correlations) {
      w.field(c.course).field(static_cast<std::int64_t>(c.n)).field(c.rho, 6);
      w.end_row();
      rhos.push_back(c.rho);
    }
    w.close();
    outputs.push_back(p);
    J skipped = J::array();
    for (const auto& [course, reason] : pcc.skipped)
      skipped.push_back({{"course", course}, {"reason", reason}});
    J block = {{"n_courses", pcc.correlations.size()},
               {"skipped", std::move(skipped)}};
    if (!rhos.empty()) {
      std::vector<double> sorted = rhos;
      std::sort(sorted.begin(), sorted.end());
      block["median"] = sorted.size() % 2
                            ? sorted[sorted.size() / 2]
                            : 0.5 * (sorted[sorted.size() / 2 - 1] +
                                     sorted[sorted.size() / 2]);
      J hist = J::array();
      for (const HistogramBin& b : density_histogram(
               rhos, cfg.get_f64("course_corr_bin_width", 0.1)))
        hist.push_back({{"lo", b.lo},
                        {"hi", b.hi},
                        {"count", b.count},
                        {"density", b.density}});
      block["histogram"] = std::move(hist);
    }
    summary["course_correlations"] = std::move(block);
  });

  // Social side: network, own-vs-peer scatter, corrected attendance, and
  // the per-group peer trends.
  const SocialNetwork net = build_social_network(messages);
  {
    const std::size_t nodes = net.adj.size();
    summary["social_network"] = {
        {"nodes", nodes},
        {"edges", net.edge_count()},
        {"mean_degree",
         nodes ? 2.0 * static_cast<double>(net.edge_count()) / nodes : 0.0}};
  }

  const auto scatter_json = [](const ScatterResult& r) {
    J j = {{"n", r.points.size()}, {"degenerate", r.degenerate}};
    if (!r.degenerate) j["correlation"] = r.correlation;
    return j;
  };
  const auto write_scatter = [&](const fs::path& p, const ScatterResult& r) {
    CsvWriter w(p, "own,peer_mean,density_bin");
    for (const auto& [own, peer] : r.points) {
      w.field(own, 6).field(peer, 6);
      w.field(static_cast<std::int64_t>(r.grid.counts[r.grid.cell(own, peer)]));
      w.end_row();
    }
    w.close();
    outputs.push_back(p);
  };

  section("peer_scatter", [&] {
    PeerOptions po;
    po.scope = PeerScope::course;
    po.use_median = use_median;
    const ScatterResult r = own_vs_peer_scatter(matrix, net, po);
    write_scatter(out_dir / "peer_scatter.csv", r);
    summary["peer"]["course_scope"] = scatter_json(r);
  });
  section("peer_scatter_term", [&] {
    PeerOptions po;
    po.scope = PeerScope::term;
    po.use_median = use_median;
    summary["peer"]["term_scope"] =
        scatter_json(own_vs_peer_scatter(matrix, net, po));
  });

  section("corrected_attendance", [&] {
    const CorrectedAttendance ca = corrected_attendance(matrix);
    const fs::path p = out_dir / "corrected_blocks.csv";
    CsvWriter w(p, "participant,course,block_start,week,deviation");
    for (const BlockDeviation& d : ca.block_deviations) {
      w.field(d.participant).field(d.course).field(d.block_start);
      w.field(static_cast<std::int64_t>(d.week)).field(d.deviation, 6);
      w.end_row();
    }
    w.close();
    outputs.push_back(p);
    const ScatterResult r = corrected_scatter(ca, net, use_median);
    write_scatter(out_dir / "corrected_scatter.csv", r);
    summary["peer"]["corrected"] = scatter_json(r);
  });

  section("peer_trends", [&] {
    PeerOptions po;
    po.use_median = use_median;
    po.same_course_peers = same_course;
    const auto trend = peer_trend(matrix, net, grouping, po);
    if (trend.empty()) throw DataError("no graded observations with peers");
    const fs::path p = out_dir / "peer_trends.csv";
    CsvWriter w(p, "group,week,peer_mean_attendance");
    for (const auto& [group, series] : trend)
      for (const auto& [week, mean] : series) {
        w.field(std::string_view(perf_group_name(group)));
        w.field(static_cast<std::int64_t>(week)).field(mean, 6);
        w.end_row();
      }
    w.close();
    outputs.push_back(p);
  });

  summary["notes"] = notes;
  const fs::path summary_path = out_dir / "analysis_summary.json";
  {
    std::ofstream f(summary_path);
    if (!f) throw DataError("cannot write " + summary_path.string());
    f << summary.dump(2) << "\n";
  }
  outputs.push_back(summary_path);
  write_manifest(out_dir, "analyze", cfg,
                 {attendance_path, data_dir / "grades.csv",
                  data_dir / "messages.csv"},
                 outputs);
}

void run_verify(const Config& cfg, const fs::path& data_dir,
                const fs::path& out_dir) {
  const GroundTruth truth = read_truth(data_dir);
  AttendanceResult res;
  res.matrix = load_attendance_csv(out_dir / "attendance.csv");
  res.estimates = load_locations_csv(out_dir / "locations.csv");
  res.bin_attendance = load_attendance_bins_csv(out_dir / "attendance_bins.csv");
  const RecoveryMetrics rm = score_against_truth(res, truth);

  J report;
  report["metrics"] = {{"n_location_bins", rm.n_location_bins},
                       {"frac_within_50", rm.frac_within_50},
                       {"frac_within_100", rm.frac_within_100},
                       {"frac_within_200", rm.frac_within_200},
                       {"max_error_m", rm.max_error_m},
                       {"mean_error_m", rm.mean_error_m},
                       {"n_attendance_bins", rm.n_attendance_bins},
                       {"precision", rm.precision},
                       {"recall", rm.recall},
                       {"coverage", rm.coverage},
                       {"term_spearman", rm.term_spearman},
                       {"n_students", rm.n_students}};

  // Thresholds are enforced only when configured.
  std::vector<std::string> failures;
  J thresholds = J::object();
  const auto check = [&](const char* key, const char* metric, double value) {
    if (!cfg.has(key)) return;
    const double thr = cfg.get_f64(key, 0.0);
    thresholds[metric] = thr;
    if (!(value >= thr))
      failures.push_back(std::string(metric) + " = " + std::to_string(value) +
                         " < " + std::to_string(thr));
  };
  check("verify_min_within_50", "frac_within_50", rm.frac_within_50);
  check("verify_min_within_100", "frac_within_100", rm.frac_within_100);
  check("verify_min_within_200", "frac_within_200", rm.frac_within_200);
  check("verify_min_precision", "precision", rm.precision);
  check("verify_min_recall", "recall", rm.recall);
  check("verify_min_coverage", "coverage", rm.coverage);
  check("verify_min_term_spearman", "term_spearman", rm.term_spearman);
  report["thresholds"] = std::move(thresholds);
  report["failures"] = failures;

  const fs::path report_path = out_dir / "verify_report.json";
  {
    std::ofstream f(report_path);
    if (!f) throw DataError("cannot write " + report_path.string());
    f << report.dump(2) << "\n";
  }
  write_manifest(out_dir, "verify", cfg,
                 {data_dir / "truth.csv", data_dir / "true_locations.csv",
                  out_dir / "attendance.csv", out_dir / "locations.csv",
                  out_dir / "attendance_bins.csv"},
                 {report_path});

  std::printf("location bins scored: %zu\n", rm.n_location_bins);
  std::printf("within 50 m: %.4f\nwithin 100 m: %.4f\nwithin 200 m: %.4f\n",
              rm.frac_within_50, rm.frac_within_100, rm.frac_within_200);
  std::printf("attendance precision: %.4f recall: %.4f coverage: %.4f\n",
              rm.precision, rm.recall, rm.coverage);
  std::printf("term attendance spearman (true vs estimated): %.4f\n",
              rm.term_spearman);
  if (!failures.empty()) {
    std::string joined;
    for (const std::string& f : failures) {
      if (!joined.empty()) joined += "; ";
      joined += f;
    }
    throw VerifyError("verification failed: " + joined);
  }
}

void run_all(const Config& cfg, const fs::path& out_dir, bool strict) {
  const fs::path data_dir = out_dir / "dataset";
  run_simulate(cfg, data_dir);
  run_pipeline(cfg, data_dir, out_dir, strict);
  run_analyze(cfg, data_dir, out_dir);
  run_verify(cfg, data_dir, out_dir);
}

}  // namespace campus
