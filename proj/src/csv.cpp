#include "campus/csv.hpp"

#include <charconv>
#include <cstring>
#include <fstream>

namespace campus {

std::vector<std::string_view> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

CsvFile::CsvFile(const std::filesystem::path& path)
    : name_(path.filename().string()) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  content_.assign(std::istreambuf_iterator<char>(in),
                  std::istreambuf_iterator<char>());

  std::string_view rest(content_);
  std::size_t line_no = 0;
  bool saw_header = false;
  while (!rest.empty()) {
    ++line_no;
    const std::size_t nl = rest.find('\n');
    std::string_view line =
        nl == std::string_view::npos ? rest : rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{}
                                        : rest.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!saw_header) {
      header_ = split_csv_line(line);
      saw_header = true;
    } else {
      rows_.emplace_back(line_no, line);
    }
  }
  if (!saw_header) throw DataError(name_ + ": missing header row");
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     std::string_view header) {
  file_ = std::fopen(path.string().c_str(), "wb");
  if (!file_) throw DataError("cannot create " + path.string());
  buf_.reserve(1 << 20);
  buf_.append(header);
  buf_.push_back('\n');
}

CsvWriter::~CsvWriter() { close(); }

void CsvWriter::sep() {
  if (row_open_) buf_.push_back(',');
  row_open_ = true;
}

CsvWriter& CsvWriter::field(std::int64_t v) {
  sep();
  char tmp[24];
  auto [ptr, ec] = std::to_chars(tmp, tmp + sizeof(tmp), v);
  buf_.append(tmp, ptr);
  return *this;
}

CsvWriter& CsvWriter::field(double v, int precision) {
  sep();
  char tmp[64];
  const int len = std::snprintf(tmp, sizeof(tmp), "%.*f", precision, v);
  buf_.append(tmp, tmp + len);
  return *this;
}

CsvWriter& CsvWriter::field(std::string_view v) {
  sep();
  buf_.append(v);
  return *this;
}

CsvWriter& CsvWriter::blank() {
  sep();
  return *this;
}

void CsvWriter::end_row() {
  buf_.push_back('\n');
  row_open_ = false;
  flush_if_full();
}

void CsvWriter::flush_if_full() {
  if (buf_.size() >= (1 << 20)) {
    std::fwrite(buf_.data(), 1, buf_.size(), file_);
    buf_.clear();
  }
}

void CsvWriter::close() {
  if (!file_) return;
  if (!buf_.empty()) std::fwrite(buf_.data(), 1, buf_.size(), file_);
  std::fclose(file_);
  file_ = nullptr;
  buf_.clear();
}

bool parse_i64(std::string_view s, std::int64_t& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

bool parse_f64(std::string_view s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

}  // namespace campus
