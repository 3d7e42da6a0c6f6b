#include "campus/digest.hpp"

#include <cstdio>
#include <vector>

#include "campus/csv.hpp"

namespace campus {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string file_digest(const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "rb");
  if (!f) throw DataError("cannot open " + path.string());
  std::uint64_t h = 0xCBF29CE484222325ULL;
  std::vector<unsigned char> buf(1 << 16);
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), f)) > 0)
    for (std::size_t i = 0; i < got; ++i) {
      h ^= buf[i];
      h *= 0x100000001B3ULL;
    }
  std::fclose(f);
  char out[17];
  std::snprintf(out, sizeof out, "%016llx",
                static_cast<unsigned long long>(h));
  return out;
}

}  // namespace campus
