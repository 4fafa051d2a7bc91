#include "finsight/common/time.hpp"

#include "finsight/common/error.hpp"

#include <charconv>
#include <cstdio>

namespace finsight {

namespace {

int parse_fixed(std::string_view text, std::size_t pos, std::size_t len, std::string_view what) {
    if (pos + len > text.size())
        throw ParseError("truncated " + std::string(what), pos);
    int value = 0;
    const char* first = text.data() + pos;
    const char* last = first + len;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw ParseError("bad " + std::string(what), pos);
    return value;
}

void expect_char(std::string_view text, std::size_t pos, char c) {
    if (pos >= text.size() || text[pos] != c)
        throw ParseError(std::string("expected '") + c + "'", pos);
}

CalendarDate parse_date_prefix(std::string_view text) {
    const int y = parse_fixed(text, 0, 4, "year");
    expect_char(text, 4, '-');
    const int m = parse_fixed(text, 5, 2, "month");
    expect_char(text, 7, '-');
    const int d = parse_fixed(text, 8, 2, "day");
    CalendarDate date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                      std::chrono::day{static_cast<unsigned>(d)}};
    if (!date.ok())
        throw ParseError("not a calendar date: " + std::string(text.substr(0, 10)), 0);
    return date;
}

} // namespace

std::string to_iso8601(Timestamp t) {
    using namespace std::chrono;
    const auto day = floor<days>(t);
    const year_month_day ymd{day};
    const hh_mm_ss tod{t - day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                  static_cast<int>(tod.seconds().count()), static_cast<int>(tod.subseconds().count()));
    return buf;
}

Timestamp parse_iso8601(std::string_view text) {
    using namespace std::chrono;
    const CalendarDate date = parse_date_prefix(text);
    expect_char(text, 10, 'T');
    const int hh = parse_fixed(text, 11, 2, "hour");
    expect_char(text, 13, ':');
    const int mm = parse_fixed(text, 14, 2, "minute");
    expect_char(text, 16, ':');
    const int ss = parse_fixed(text, 17, 2, "second");
    if (hh > 23 || mm > 59 || ss > 59)
        throw ParseError("time of day out of range", 11);
    std::size_t pos = 19;
    int millis = 0;
    if (pos < text.size() && text[pos] == '.') {
        std::size_t digits = 0;
        ++pos;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
            if (digits < 3)
                millis = millis * 10 + (text[pos] - '0');
            ++digits;
            ++pos;
        }
        if (digits == 0)
            throw ParseError("empty fraction", pos);
        for (std::size_t i = digits; i < 3; ++i)
            millis *= 10;
    }
    expect_char(text, pos, 'Z');
    if (pos + 1 != text.size())
        throw ParseError("trailing characters after timestamp", pos + 1);
    return Timestamp{sys_days{date}.time_since_epoch() + hours{hh} + minutes{mm} + seconds{ss} +
                     milliseconds{millis}};
}

CalendarDate parse_date(std::string_view text) {
    if (text.size() != 10)
        throw ParseError("date must be YYYY-MM-DD", 0);
    return parse_date_prefix(text);
}

std::string to_string(CalendarDate date) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

CalendarDate utc_date(Timestamp t) {
    return CalendarDate{std::chrono::floor<std::chrono::days>(t)};
}

} // namespace finsight
