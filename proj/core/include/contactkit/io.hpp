#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace contactkit {

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

// Shortest decimal text that parses back to the identical double.
std::string format_double(double value);
std::string format_doubles(const std::vector<double>& values, char sep = ' ');

// Whole-string parse; throws FormatError naming `what` on failure.
double parse_double(std::string_view text, std::string_view what = "value");

std::vector<std::string> split(std::string_view text, char sep);
std::string trim(std::string_view text);

// 64-bit FNV-1a, rendered as 16 hex digits. Stable across platforms.
std::string fnv1a_hex(std::string_view text);

}  // namespace contactkit
