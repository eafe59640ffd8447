#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cryptsim::util {

/// Shortest round-trippable text for a double ("nan" for NaN).
std::string format_double(double value);

/// Fixed-precision text (%.12g), the precision used by metric CSVs.
std::string format_metric(double value);

std::string trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);

/// FNV-1a 64-bit, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

}  // namespace cryptsim::util
