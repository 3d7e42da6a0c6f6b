#include "campus/sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include "campus/csv.hpp"
#include "campus/geo.hpp"
#include "campus/rng.hpp"
#include "campus/stats.hpp"

namespace campus {

namespace {

constexpr double kCenterLat = 55.785;
constexpr double kCenterLon = 12.521;
constexpr double kMetersPerDegLat =
    kEarthRadiusM * std::numbers::pi / 180.0;

// Substream tags; every random decision belongs to exactly one stream so
// that changing one knob (noise level, coupling, ...) leaves the draws of
// unrelated stages untouched.
enum Stream : std::uint64_t {
  kLatents = 1,
  kEnroll,
  kPresence,
  kGps,
  kScan,
  kMessage,
  kAbsent,
};

GeoPoint offset_m(const GeoPoint& base, double north_m, double east_m) {
  GeoPoint p;
  p.lat = base.lat + north_m / kMetersPerDegLat;
  p.lon = base.lon + east_m / (kMetersPerDegLat *
                               std::cos(base.lat * std::numbers::pi / 180.0));
  return p;
}

int slot_of(Id course) { return static_cast<int>((course - 1) % kSlotsPerWeek); }

Timestamp block_start_for(Id course, int week) {
  const int slot = slot_of(course);
  const int day = slot % 5;
  const int hour = slot < 5 ? 8 : 13;
  return kSimEpoch + (static_cast<Timestamp>(week - 1) * 7 + day) * 86400 +
         static_cast<Timestamp>(hour) * 3600;
}

struct Student {
  double x = 0.0;       // attendance driver
  int grade = 0;
  double p_base = 0.0;  // week-1 presence probability
  double decay = 0.0;   // per week
  GeoPoint home;
  bool on_campus_absentee = false;
  std::vector<Id> courses;
};

int grade_from_measure(double m) {
  // Band cuts chosen so the three tiers land near the 22/41/37 split, with
  // each band divided evenly into its grade steps.
  if (m < 0.22 * (1.0 / 3.0)) return -3;
  if (m < 0.22 * (2.0 / 3.0)) return 0;
  if (m < 0.22) return 2;
  if (m < 0.425) return 4;
  if (m < 0.63) return 7;
  if (m < 0.815) return 10;
  return 12;
}

// Prefix-sum tree for weighted sampling without replacement.
class WeightTree {
 public:
  explicit WeightTree(std::vector<double> weights)
      : vals_(std::move(weights)), tree_(vals_.size() + 1, 0.0) {
    for (std::size_t i = 0; i < vals_.size(); ++i) add(i, vals_[i]);
    total_ = 0;
    for (double w : vals_) total_ += w;
  }

  double total() const { return total_; }

  std::size_t pick(double r) const {
    std::size_t pos = 0;
    for (std::size_t mask = std::bit_floor(vals_.size()); mask; mask >>= 1) {
      const std::size_t next = pos + mask;
      if (next < tree_.size() && tree_[next] <= r) {
        pos = next;
        r -= tree_[next];
      }
    }
    // Rounding can land on an exhausted slot; walk to a live one.
    while (pos < vals_.size() && vals_[pos] == 0.0) ++pos;
    while (pos > 0 && (pos >= vals_.size() || vals_[pos] == 0.0)) --pos;
    return pos;
  }

  void remove(std::size_t i) {
    total_ -= vals_[i];
    add(i, -vals_[i]);
    vals_[i] = 0.0;
  }

 private:
  void add(std::size_t i, double d) {
    for (std::size_t j = i + 1; j < tree_.size(); j += j & (~j + 1))
      tree_[j] += d;
  }

  std::vector<double> vals_;
  std::vector<double> tree_;
  double total_ = 0.0;
};

}  // namespace

CampusBoundary default_campus() {
  CampusBoundary b;
  b.ring = {{kCenterLat - 0.008, kCenterLon - 0.014},
            {kCenterLat - 0.008, kCenterLon + 0.014},
            {kCenterLat + 0.008, kCenterLon + 0.014},
            {kCenterLat + 0.008, kCenterLon - 0.014}};
  return b;
}

std::vector<GeoPoint> default_buildings() {
  // Two rows of four; neighboring rooms sit ~440 m apart, comfortably more
  // than twice the default capture radius.
  std::vector<GeoPoint> rooms;
  for (double dlat : {-0.004, 0.004})
    for (double dlon : {-0.0105, -0.0035, 0.0035, 0.0105})
      rooms.push_back({kCenterLat + dlat, kCenterLon + dlon});
  return rooms;
}

SimConfig SimConfig::from(const Config& cfg) {
  SimConfig c;
  c.n_students = cfg.get_i64("n_students", c.n_students);
  c.n_courses = cfg.get_i64("n_courses", c.n_courses);
  c.weeks = static_cast<int>(cfg.get_i64("weeks", c.weeks));
  c.courses_per_student = static_cast<int>(
      cfg.get_i64("courses_per_student", c.courses_per_student));
  c.bin_width_s = cfg.get_i64("bin_width_s", c.bin_width_s);
  c.block_duration_s = cfg.get_i64("block_duration_s", c.block_duration_s);
  c.gps_sigma_m = cfg.get_f64("gps_sigma_m", c.gps_sigma_m);
  c.accuracy_min_m = cfg.get_f64("accuracy_min_m", c.accuracy_min_m);
  c.accuracy_max_m = cfg.get_f64("accuracy_max_m", c.accuracy_max_m);
  c.bt_detect_prob = cfg.get_f64("bt_detect_prob", c.bt_detect_prob);
  c.mean_degree = cfg.get_f64("mean_degree", c.mean_degree);
  c.homophily = cfg.get_f64("homophily", c.homophily);
  c.coupling = cfg.get_f64("ability_attendance_coupling", c.coupling);
  c.decay_low = cfg.get_f64("decay_low_pp_week", c.decay_low * 100.0) / 100.0;
  c.decay_moderate =
      cfg.get_f64("decay_moderate_pp_week", c.decay_moderate * 100.0) / 100.0;
  c.decay_high =
      cfg.get_f64("decay_high_pp_week", c.decay_high * 100.0) / 100.0;
  c.on_campus_absentee_frac =
      cfg.get_f64("on_campus_absentee_frac", c.on_campus_absentee_frac);
  c.seed = static_cast<std::uint64_t>(
      cfg.get_i64("seed", static_cast<std::int64_t>(c.seed)));
  c.validate();
  return c;
}

void SimConfig::validate() const {
  const auto fail = [](const std::string& what) {
    throw std::invalid_argument("sim config: " + what);
  };
  if (n_students < 1) fail("n_students must be >= 1");
  if (n_courses < 1) fail("n_courses must be >= 1");
  if (weeks < 1) fail("weeks must be >= 1");
  if (courses_per_student < 1) fail("courses_per_student must be >= 1");
  // A student's courses must occupy distinct weekly slots.
  const std::int64_t distinct_slots = std::min<std::int64_t>(n_courses, kSlotsPerWeek);
  if (courses_per_student > distinct_slots)
    fail("courses_per_student exceeds the distinct weekly slots available");
  if (bin_width_s < 1 || block_duration_s < 1 ||
      block_duration_s % bin_width_s != 0)
    fail("bin width must divide the block duration");
  if (gps_sigma_m < 0) fail("gps_sigma_m must be >= 0");
  if (!(accuracy_min_m > 0) || accuracy_max_m < accuracy_min_m)
    fail("accuracy range must satisfy 0 < min <= max");
  if (bt_detect_prob < 0 || bt_detect_prob > 1)
    fail("bt_detect_prob must be in [0, 1]");
  if (homophily < 0 || homophily > 1) fail("homophily must be in [0, 1]");
  if (coupling < 0 || coupling > 1)
    fail("ability_attendance_coupling must be in [0, 1]");
  if (mean_degree < 0 || mean_degree > static_cast<double>(n_students - 1))
    fail("mean_degree must be in [0, n_students - 1]");
  if (on_campus_absentee_frac < 0 || on_campus_absentee_frac > 1)
    fail("on_campus_absentee_frac must be in [0, 1]");
  if (!buildings.empty()) {
    const CampusBoundary ring = campus.ring.empty() ? default_campus() : campus;
    for (const GeoPoint& b : buildings)
      if (!contains(ring, b)) fail("building outside the campus ring");
  }
}

SimOutput generate(const SimConfig& cfg) {
  cfg.validate();
  const CampusBoundary campus =
      cfg.campus.ring.empty() ? default_campus() : cfg.campus;
  const std::vector<GeoPoint> rooms =
      cfg.buildings.empty() ? default_buildings() : cfg.buildings;
  const GeoPoint center{kCenterLat, kCenterLon};

  const std::int64_t n = cfg.n_students;
  const std::int64_t m = cfg.n_courses;
  const int bins_per_block =
      static_cast<int>(cfg.block_duration_s / cfg.bin_width_s);

  SimOutput out;
  out.dataset.campus = campus;

  // Latent per-student state, one fixed-size draw batch per student so
  // paired seeds stay aligned when knobs change.
  Rng lat_rng(substream_seed(cfg.seed, kLatents));
  std::vector<Student> students(n);
  for (std::int64_t s = 0; s < n; ++s) {
    Student& st = students[s];
    const double a = lat_rng.u01();
    const double u = lat_rng.u01();
    const double eps = lat_rng.normal();
    const double angle = lat_rng.u01() * 2.0 * std::numbers::pi;
    const double dist = 3000.0 + lat_rng.u01() * 5000.0;
    const double oc = lat_rng.u01();
    st.x = cfg.coupling * a + (1.0 - cfg.coupling) * u;
    st.grade = grade_from_measure(a + 0.12 * eps);
    st.p_base = 0.50 + 0.47 * st.x;
    switch (performance_group(st.grade)) {
      case PerfGroup::Low: st.decay = cfg.decay_low; break;
      case PerfGroup::Moderate: st.decay = cfg.decay_moderate; break;
      case PerfGroup::High: st.decay = cfg.decay_high; break;
    }
    st.home = offset_m(center, dist * std::sin(angle), dist * std::cos(angle));
    st.on_campus_absentee = oc < cfg.on_campus_absentee_frac;
  }

  // Enrollment: distinct courses in distinct weekly slots.
  Rng enroll_rng(substream_seed(cfg.seed, kEnroll));
  std::vector<CourseRoster> rosters(m);
  for (std::int64_t c = 0; c < m; ++c) rosters[c].course = c + 1;
  for (std::int64_t s = 0; s < n; ++s) {
    std::set<Id> chosen;
    std::set<int> slots;
    int attempts = 0;
    while (static_cast<int>(chosen.size()) < cfg.courses_per_student) {
      if (++attempts > 64 * cfg.courses_per_student) {
        for (Id c = 1; c <= m &&
             static_cast<int>(chosen.size()) < cfg.courses_per_student; ++c)
          if (!chosen.count(c) && !slots.count(slot_of(c))) {
            chosen.insert(c);
            slots.insert(slot_of(c));
          }
        break;
      }
      const Id c = enroll_rng.uniform_int(1, m);
      if (chosen.count(c) || slots.count(slot_of(c))) continue;
      chosen.insert(c);
      slots.insert(slot_of(c));
    }
    for (Id c : chosen) {
      students[s].courses.push_back(c);
      rosters[c - 1].participants.insert(s + 1);
    }
  }

  for (std::int64_t c = 0; c < m; ++c) {
    for (int w = 1; w <= cfg.weeks; ++w) {
      ScheduleBlock b;
      b.course = c + 1;
      b.start = block_start_for(b.course, w);
      b.duration_s = cfg.block_duration_s;
      b.week = w;
      b.official_location = rooms[c % rooms.size()];
      rosters[c].blocks.push_back(b);
    }
  }
  out.dataset.rosters = rosters;

  for (std::int64_t s = 0; s < n; ++s)
    for (Id c : students[s].courses)
      out.dataset.grades.push_back({s + 1, c, students[s].grade, false});
  std::sort(out.dataset.grades.begin(), out.dataset.grades.end(),
            [](const GradeRecord& a, const GradeRecord& b) {
              return std::tie(a.participant, a.course) <
                     std::tie(b.participant, b.course);
            });

  // Presence, fixes, scans, truth: one pass per (course, week).
  Rng presence_rng(substream_seed(cfg.seed, kPresence));
  Rng gps_rng(substream_seed(cfg.seed, kGps));
  Rng scan_rng(substream_seed(cfg.seed, kScan));
  Rng absent_rng(substream_seed(cfg.seed, kAbsent));

  for (std::int64_t c = 0; c < m; ++c) {
    const CourseRoster& roster = rosters[c];
    const GeoPoint room = rooms[c % rooms.size()];
    const std::vector<Id> members(roster.participants.begin(),
                                  roster.participants.end());
    for (int w = 1; w <= cfg.weeks; ++w) {
      const Timestamp start = block_start_for(c + 1, w);

      std::vector<char> present(members.size());
      std::vector<GeoPoint> spot(members.size());
      for (std::size_t k = 0; k < members.size(); ++k) {
        const Student& st = students[members[k] - 1];
        const double p =
            std::clamp(st.p_base + st.decay * (w - 1), 0.01, 0.99);
        present[k] = presence_rng.u01() < p;
        if (present[k]) {
          spot[k] = room;
        } else if (st.on_campus_absentee) {
          spot[k] = rooms[absent_rng.uniform_int(
              0, static_cast<std::int64_t>(rooms.size()) - 1)];
        } else {
          spot[k] = st.home;
        }
      }

      std::vector<Id> in_class;
      for (std::size_t k = 0; k < members.size(); ++k)
        if (present[k]) in_class.push_back(members[k]);

      for (int b = 0; b < bins_per_block; ++b) {
        const Timestamp bin_start = start + b * cfg.bin_width_s;
        out.truth.locations.push_back({c + 1, start, b, room});
        for (std::size_t k = 0; k < members.size(); ++k) {
          LocationFix f;
          f.participant = members[k];
          f.t = bin_start + gps_rng.uniform_int(0, cfg.bin_width_s - 1);
          f.point = offset_m(spot[k], cfg.gps_sigma_m * gps_rng.normal(),
                             cfg.gps_sigma_m * gps_rng.normal());
          f.accuracy_m = cfg.accuracy_min_m +
                         gps_rng.u01() * (cfg.accuracy_max_m - cfg.accuracy_min_m);
          out.dataset.fixes.push_back(f);
        }
        for (std::size_t i = 0; i < in_class.size(); ++i)
          for (std::size_t j = 0; j < in_class.size(); ++j) {
            if (i == j) continue;
            if (scan_rng.u01() < cfg.bt_detect_prob)
              out.dataset.scans.push_back({in_class[i], in_class[j], bin_start});
          }
      }
      for (std::size_t k = 0; k < members.size(); ++k)
        for (int b = 0; b < bins_per_block; ++b)
          out.truth.presence.push_back(
              {members[k], c + 1, start, b, present[k] != 0});
    }
  }

  // Message network: fixed edge budget, pair weights tilted toward similar
  // attendance drivers. One message per edge.
  Rng msg_rng(substream_seed(cfg.seed, kMessage));
  const std::int64_t n_pairs = n * (n - 1) / 2;
  std::int64_t budget = std::llround(static_cast<double>(n) *
                                     cfg.mean_degree / 2.0);
  budget = std::min(budget, n_pairs);
  if (budget > 0) {
    std::vector<std::pair<Id, Id>> pairs;
    std::vector<double> weights;
    pairs.reserve(n_pairs);
    weights.reserve(n_pairs);
    for (std::int64_t i = 0; i < n; ++i)
      for (std::int64_t j = i + 1; j < n; ++j) {
        const double d = (students[i].x - students[j].x) / 0.1;
        pairs.emplace_back(i + 1, j + 1);
        weights.push_back(std::exp(-cfg.homophily * d * d));
      }
    WeightTree tree(std::move(weights));
    const Timestamp span = static_cast<Timestamp>(cfg.weeks) * 7 * 86400;
    for (std::int64_t e = 0; e < budget; ++e) {
      const std::size_t idx = tree.pick(msg_rng.u01() * tree.total());
      tree.remove(idx);
      const auto [a, b] = pairs[idx];
      MessageEvent msg;
      msg.sender = msg_rng.u01() < 0.5 ? a : b;
      msg.receiver = msg.sender == a ? b : a;
      msg.t = kSimEpoch + msg_rng.uniform_int(0, span - 1);
      out.dataset.messages.push_back(msg);
    }
  }
  std::sort(out.dataset.messages.begin(), out.dataset.messages.end(),
            [](const MessageEvent& a, const MessageEvent& b) {
              return std::tie(a.t, a.sender, a.receiver) <
                     std::tie(b.t, b.sender, b.receiver);
            });

  std::sort(out.truth.presence.begin(), out.truth.presence.end(),
            [](const TruthBin& a, const TruthBin& b) {
              return std::tie(a.student, a.course, a.block_start, a.bin_index) <
                     std::tie(b.student, b.course, b.block_start, b.bin_index);
            });
  std::sort(out.truth.locations.begin(), out.truth.locations.end(),
            [](const TrueLocation& a, const TrueLocation& b) {
              return std::tie(a.course, a.block_start, a.bin_index) <
                     std::tie(b.course, b.block_start, b.bin_index);
            });
  return out;
}

void write_dataset(const SimOutput& out, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const Dataset& ds = out.dataset;

  {
    CsvWriter w(dir / "campus.csv", "lat,lon");
    for (const GeoPoint& p : ds.campus.ring) {
      w.field(p.lat, 7).field(p.lon, 7);
      w.end_row();
    }
  }
  {
    CsvWriter w(dir / "roster.csv", "course,participant");
    for (const CourseRoster& r : ds.rosters)
      for (Id p : r.participants) {
        w.field(r.course).field(p);
        w.end_row();
      }
  }
  {
    CsvWriter w(dir / "schedule.csv",
                "course,start,duration_s,week,official_lat,official_lon");
    for (const CourseRoster& r : ds.rosters)
      for (const ScheduleBlock& b : r.blocks) {
        w.field(b.course).field(b.start).field(b.duration_s);
        w.field(static_cast<std::int64_t>(b.week));
        if (b.official_location) {
          w.field(b.official_location->lat, 7);
          w.field(b.official_location->lon, 7);
        } else {
          w.blank().blank();
        }
        w.end_row();
      }
  }
  {
    CsvWriter w(dir / "grades.csv", "participant,course,grade,no_show");
    for (const GradeRecord& g : ds.grades) {
      w.field(g.participant).field(g.course);
      if (g.no_show)
        w.blank().field(std::int64_t{1});
      else
        w.field(static_cast<std::int64_t>(g.grade)).field(std::int64_t{0});
      w.end_row();
    }
  }
  {
    CsvWriter w(dir / "fixes.csv", "participant,t,lat,lon,accuracy");
    for (const LocationFix& f : ds.fixes) {
      w.field(f.participant).field(f.t);
      w.field(f.point.lat, 7).field(f.point.lon, 7).field(f.accuracy_m, 2);
      w.end_row();
    }
  }
  {
    CsvWriter w(dir / "scans.csv", "scanner,seen,t");
    for (const ProximityScan& s : ds.scans) {
      w.field(s.scanner).field(s.seen).field(s.t);
      w.end_row();
    }
  }
  {
    CsvWriter w(dir / "messages.csv", "sender,receiver,t");
    for (const MessageEvent& msg : ds.messages) {
      w.field(msg.sender).field(msg.receiver).field(msg.t);
      w.end_row();
    }
  }
  {
    CsvWriter w(dir / "truth.csv", "student,course,block_start,bin_index,present");
    for (const TruthBin& t : out.truth.presence) {
      w.field(t.student).field(t.course).field(t.block_start);
      w.field(static_cast<std::int64_t>(t.bin_index));
      w.field(std::int64_t{t.present ? 1 : 0});
      w.end_row();
    }
  }
  {
    CsvWriter w(dir / "true_locations.csv", "course,block_start,bin_index,lat,lon");
    for (const TrueLocation& t : out.truth.locations) {
      w.field(t.course).field(t.block_start);
      w.field(static_cast<std::int64_t>(t.bin_index));
      w.field(t.room.lat, 7).field(t.room.lon, 7);
      w.end_row();
    }
  }
}

GroundTruth read_truth(const std::filesystem::path& dir) {
  GroundTruth truth;
  {
    CsvFile csv(dir / "truth.csv");
    if (csv.header().size() != 5)
      throw DataError(csv.name() + ": unexpected header");
    csv.for_each_row([&](std::size_t line, const auto& f) {
      TruthBin t;
      std::int64_t bin = 0, present = 0;
      if (f.size() != 5 || !parse_i64(f[0], t.student) ||
          !parse_i64(f[1], t.course) || !parse_i64(f[2], t.block_start) ||
          !parse_i64(f[3], bin) || !parse_i64(f[4], present) ||
          (present != 0 && present != 1))
        throw DataError(csv.name() + ":" + std::to_string(line) +
                        ": malformed truth row");
      t.bin_index = static_cast<int>(bin);
      t.present = present == 1;
      truth.presence.push_back(t);
    });
  }
  {
    CsvFile csv(dir / "true_locations.csv");
    if (csv.header().size() != 5)
      throw DataError(csv.name() + ": unexpected header");
    csv.for_each_row([&](std::size_t line, const auto& f) {
      TrueLocation t;
      std::int64_t bin = 0;
      if (f.size() != 5 || !parse_i64(f[0], t.course) ||
          !parse_i64(f[1], t.block_start) || !parse_i64(f[2], bin) ||
          !parse_f64(f[3], t.room.lat) || !parse_f64(f[4], t.room.lon))
        throw DataError(csv.name() + ":" + std::to_string(line) +
                        ": malformed location row");
      t.bin_index = static_cast<int>(bin);
      truth.locations.push_back(t);
    });
  }
  return truth;
}

RecoveryMetrics score_against_truth(const AttendanceResult& result,
                                    const GroundTruth& truth) {
  RecoveryMetrics rm;

  std::map<std::tuple<Id, Timestamp, int>, GeoPoint> rooms;
  for (const TrueLocation& t : truth.locations)
    rooms[{t.course, t.block_start, t.bin_index}] = t.room;

  std::map<std::tuple<Id, Timestamp, int>, std::set<Id>> present;
  std::map<Id, std::pair<double, std::int64_t>> true_mean;  // sum, count
  for (const TruthBin& t : truth.presence) {
    if (t.present) present[{t.course, t.block_start, t.bin_index}].insert(t.student);
    auto& [sum, count] = true_mean[t.student];
    sum += t.present ? 1.0 : 0.0;
    ++count;
  }

  std::vector<double> errors;
  for (const BinLocationEstimate& e : result.estimates) {
    if (!e.location) continue;
    const auto it = rooms.find({e.course, e.block_start, e.bin.index});
    if (it == rooms.end())
      throw DataError("estimate for course " + std::to_string(e.course) +
                      " has no matching truth row (mismatched runs?)");
    errors.push_back(haversine_m(*e.location, it->second));
  }
  if (errors.empty()) throw DataError("no location estimates to score");
  rm.n_location_bins = errors.size();
  double sum = 0;
  for (double d : errors) {
    sum += d;
    rm.max_error_m = std::max(rm.max_error_m, d);
    rm.frac_within_50 += d <= 50.0;
    rm.frac_within_100 += d <= 100.0;
    rm.frac_within_200 += d <= 200.0;
  }
  rm.mean_error_m = sum / errors.size();
  rm.frac_within_50 /= errors.size();
  rm.frac_within_100 /= errors.size();
  rm.frac_within_200 /= errors.size();

  std::int64_t tp = 0, fp = 0, fn = 0;
  for (const BinAttendance& ba : result.bin_attendance) {
    const auto it = present.find({ba.course, ba.block_start, ba.bin_index});
    if (it == present.end() && !rooms.count({ba.course, ba.block_start,
                                             ba.bin_index}))
      throw DataError("attendance bin has no matching truth row");
    static const std::set<Id> kEmpty;
    const std::set<Id>& truly = it == present.end() ? kEmpty : it->second;
    for (Id id : ba.attendees)
      truly.count(id) ? ++tp : ++fp;
    for (Id id : truly)
      if (!std::binary_search(ba.attendees.begin(), ba.attendees.end(), id))
        ++fn;
  }
  rm.n_attendance_bins = result.bin_attendance.size();
  rm.precision = tp + fp ? static_cast<double>(tp) / (tp + fp) : 0.0;
  rm.recall = tp + fn ? static_cast<double>(tp) / (tp + fn) : 0.0;
  rm.coverage = truth.locations.empty()
                    ? 0.0
                    : static_cast<double>(rm.n_attendance_bins) /
                          truth.locations.size();

  std::vector<double> est, tru;
  for (const auto& [student, mean] : result.matrix.term_means()) {
    const auto it = true_mean.find(student);
    if (it == true_mean.end())
      throw DataError("attendance for student " + std::to_string(student) +
                      " has no truth rows (mismatched runs?)");
    est.push_back(mean);
    tru.push_back(it->second.first / it->second.second);
  }
  rm.n_students = est.size();
  try {
    rm.term_spearman = spearman(tru, est);
  } catch (const std::invalid_argument&) {
    rm.term_spearman = std::numeric_limits<double>::quiet_NaN();
  }
  return rm;
}

}  // namespace campus
