#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace finsight {

/// Wall-clock instant, UTC, millisecond resolution.
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using CalendarDate = std::chrono::year_month_day;

/// "2024-07-04T06:00:00.000Z"
std::string to_iso8601(Timestamp t);

/// Accepts "YYYY-MM-DDTHH:MM:SS[.fff]Z" (the "Z" is required). Throws ParseError.
Timestamp parse_iso8601(std::string_view text);

/// "YYYY-MM-DD", validated against the calendar. Throws ParseError.
CalendarDate parse_date(std::string_view text);
std::string to_string(CalendarDate date);

CalendarDate utc_date(Timestamp t);

inline Timestamp timestamp_from_millis(std::int64_t ms) {
    return Timestamp{std::chrono::milliseconds{ms}};
}

inline std::int64_t to_millis(Timestamp t) { return t.time_since_epoch().count(); }

} // namespace finsight
