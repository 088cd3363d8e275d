#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

namespace vshift {

/// Shortest decimal string that round-trips the double exactly.
/// Locale-independent, '.' decimal separator, suitable for deterministic
/// CSV/JSON output.
std::string format_double(double value);

/// Fixed-notation formatting with the given number of decimals (for labels).
std::string format_fixed(double value, int decimals);

std::string format_u64(std::uint64_t value);

/// Strict parsers: the whole string must be consumed.
double parse_double(std::string_view text);
std::int64_t parse_i64(std::string_view text);
std::uint64_t parse_u64(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace vshift
