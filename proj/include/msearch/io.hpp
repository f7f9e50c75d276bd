#pragma once

#include <filesystem>
#include <string>

namespace msearch {

/// Writes `contents` to a temporary file next to `path` and renames it into
/// place. Creates parent directories as needed.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents);

std::string read_file(const std::filesystem::path& path);

/// $MSEARCH_CACHE when set and non-empty, otherwise "cache".
std::filesystem::path default_cache_dir();

}  // namespace msearch
