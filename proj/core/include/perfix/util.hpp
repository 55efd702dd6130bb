#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace perfix {

std::string sha256_hex(std::string_view data);

/// Throws IoError.
std::string read_file(const std::filesystem::path& path);

/// Writes through a temporary sibling and renames. Throws IoError.
void write_file(const std::filesystem::path& path, std::string_view data);

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
bool starts_with_icase(std::string_view s, std::string_view prefix);

std::vector<std::string_view> split(std::string_view s, char sep);

/// Collapses every whitespace run to one space and trims.
std::string collapse_whitespace(std::string_view s);

}  // namespace perfix
