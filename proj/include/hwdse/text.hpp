#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hwdse::text {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

/// Parses the whole of `token` as a double; nullopt on any trailing junk.
std::optional<double> parse_double(std::string_view token);

std::string_view trim(std::string_view s);

/// Splits a CSV record on commas. Fields may not contain quoted commas.
std::vector<std::string> split_csv(std::string_view line);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace hwdse::text
