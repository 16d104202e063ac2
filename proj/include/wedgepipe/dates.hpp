#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace wedgepipe {

using Timestamp = std::chrono::sys_seconds;
using Day = std::chrono::sys_days;

/// Parses ISO-8601 timestamps such as `2020-03-19T12:00:00Z`,
/// `2020-03-19T12:00:00.250+02:00` or `2020-03-19 12:00:00`. Offsets are
/// applied so the result is UTC; fractional seconds are truncated. A value
/// without an offset is taken as UTC.
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// Parses a `YYYY-MM-DD` calendar date.
std::optional<Day> parse_date(std::string_view text);

std::string format_date(Day day);
std::string format_timestamp(Timestamp ts);

inline Day day_of(Timestamp ts) { return std::chrono::floor<std::chrono::days>(ts); }

}  // namespace wedgepipe
