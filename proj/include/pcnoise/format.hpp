#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pcnoise {

// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

// Locale-independent parse of the whole field; nullopt-style failure via bool.
bool parse_double(std::string_view text, double& out);
bool parse_uint64(std::string_view text, std::uint64_t& out);

std::vector<std::string_view> split(std::string_view line, char sep);
std::string_view trim(std::string_view text);

// Writes `contents` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);

std::string read_file(const std::filesystem::path& path);

// Splits file contents into lines, dropping a trailing '\r' on each.
std::vector<std::string_view> split_lines(std::string_view contents);

}  // namespace pcnoise
