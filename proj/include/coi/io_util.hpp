#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace coi {

// Shortest decimal representation that parses back to the same double.
// Used by every CSV emitter so that serialize/load round-trips exactly.
std::string format_double(double value);

// Locale-independent double parse of a full token; nullopt on any junk.
std::optional<double> parse_double(std::string_view token);

// Splits one CSV line on commas. No quoting; fields are trimmed of
// surrounding whitespace and trailing '\r'.
std::vector<std::string_view> split_csv_line(std::string_view line);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace coi
