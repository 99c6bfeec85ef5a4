#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace rsched {

/// Writes `content` to a sibling temp file and renames it over `path`, so
/// readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path &path, std::string_view content);

std::string read_file(const std::filesystem::path &path);

/// Shortest text that parses back to exactly `value`.
std::string format_double(double value);

} // namespace rsched
