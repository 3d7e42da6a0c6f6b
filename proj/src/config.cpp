#include "campus/config.hpp"

#include <fstream>

#include "campus/csv.hpp"

namespace campus {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

Config Config::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file " + path.string());
  Config cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected key=value");
    cfg.set(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
  }
  return cfg;
}

void Config::set(const std::string& key, std::string value) {
  kv_[key] = std::move(value);
}

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }

std::int64_t Config::get_i64(const std::string& key,
                             std::int64_t fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  std::int64_t v = 0;
  if (!parse_i64(it->second, v))
    throw DataError("config key '" + key + "' is not an integer: " +
                    it->second);
  return v;
}

double Config::get_f64(const std::string& key, double fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  double v = 0;
  if (!parse_f64(it->second, v))
    throw DataError("config key '" + key + "' is not a number: " + it->second);
  return v;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  if (it->second == "1" || it->second == "true" || it->second == "yes")
    return true;
  if (it->second == "0" || it->second == "false" || it->second == "no")
    return false;
  throw DataError("config key '" + key + "' is not a boolean: " + it->second);
}

std::string Config::get_str(const std::string& key,
                            std::string fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

std::int64_t Config::require_i64(const std::string& key) const {
  if (!has(key)) throw DataError("missing required config key '" + key + "'");
  return get_i64(key, 0);
}

}  // namespace campus
