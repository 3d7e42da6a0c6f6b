#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace campus {

// Thrown for unreadable/missing files and, in strict mode, malformed rows.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Splits one CSV line on commas. The schemas here are numeric-only, so no
// quoting rules apply. A trailing '\r' is stripped.
std::vector<std::string_view> split_csv_line(std::string_view line);

// Whole-file CSV reader. Loads the file once and hands out header +
// line-numbered rows.
class CsvFile {
 public:
  explicit CsvFile(const std::filesystem::path& path);

  const std::vector<std::string_view>& header() const { return header_; }
  // Row iteration: calls fn(line_number, fields) for each non-empty data row.
  // line_number is 1-based and counts the header.
  template <typename Fn>
  void for_each_row(Fn&& fn) const {
    for (const auto& [line_no, line] : rows_) fn(line_no, split_csv_line(line));
  }
  std::size_t row_count() const { return rows_.size(); }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  std::string content_;
  std::vector<std::string_view> header_;
  std::vector<std::pair<std::size_t, std::string_view>> rows_;
};

// Buffered CSV writer with fixed numeric formatting so reruns are
// byte-identical.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::string_view header);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  CsvWriter& field(std::int64_t v);
  CsvWriter& field(double v, int precision);
  CsvWriter& field(std::string_view v);
  // Empty field (optional column left blank).
  CsvWriter& blank();
  void end_row();
  void close();

 private:
  void sep();
  void flush_if_full();
  std::FILE* file_ = nullptr;
  std::string buf_;
  bool row_open_ = false;
};

// Parsing helpers; return false on malformed input.
bool parse_i64(std::string_view s, std::int64_t& out);
bool parse_f64(std::string_view s, double& out);

}  // namespace campus
