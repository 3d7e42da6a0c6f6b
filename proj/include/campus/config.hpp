#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace campus {

// key=value configuration. Lines starting with '#' and blank lines are
// ignored; whitespace around keys and values is trimmed. Later assignments
// win, which is how CLI flags override file values.
class Config {
 public:
  Config() = default;

  static Config from_file(const std::filesystem::path& path);

  void set(const std::string& key, std::string value);
  bool has(const std::string& key) const;

  std::int64_t get_i64(const std::string& key, std::int64_t fallback) const;
  double get_f64(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_str(const std::string& key, std::string fallback) const;

  // Like the getters above but fails with an error naming the key.
  std::int64_t require_i64(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace campus
