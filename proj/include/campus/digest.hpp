#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace campus {

// FNV-1a over raw bytes; used to fingerprint files in run manifests.
std::uint64_t fnv1a64(std::string_view bytes);

// Hex digest of a whole file. Throws DataError when unreadable.
std::string file_digest(const std::filesystem::path& path);

}  // namespace campus
