#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace kinetics {

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(std::string_view text);

/// Writes `content` to a sibling temporary file and renames it over `path`,
/// so readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace kinetics
