#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "lightcast/errors.hpp"

namespace lightcast {

inline constexpr std::int64_t kSecondsPerHour = 3600;
inline constexpr std::int64_t kSecondsPerDay = 86400;

struct CivilDate {
    int year;
    unsigned month; // 1..12
    unsigned day;   // 1..31
};

// Days since 1970-01-01 for a proleptic Gregorian date (Hinnant's algorithm).
constexpr std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

constexpr CivilDate civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return {static_cast<int>(y + (m <= 2)), m, d};
}

inline std::int64_t timestamp_from_civil(int y, unsigned mo, unsigned d,
                                         unsigned h = 0, unsigned mi = 0, unsigned s = 0) {
    return days_from_civil(y, mo, d) * kSecondsPerDay + h * 3600 + mi * 60 + s;
}

namespace detail {

inline int parse_digits(std::string_view text, std::size_t pos, std::size_t len, const char* what) {
    int value = 0;
    if (pos + len > text.size()) throw ValueError(std::string("truncated timestamp field: ") + what);
    auto [p, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, value);
    if (ec != std::errc() || p != text.data() + pos + len)
        throw ValueError(std::string("invalid timestamp field: ") + what);
    return value;
}

} // namespace detail

/// Parses "YYYY-MM-DDTHH:MM:SSZ" or the Open-Meteo short form "YYYY-MM-DDTHH:MM".
/// A bare "YYYY-MM-DD" is read as midnight UTC.
inline std::int64_t parse_iso8601_utc(std::string_view text) {
    if (text.size() < 10) throw ValueError("timestamp too short: " + std::string(text));
    const int y = detail::parse_digits(text, 0, 4, "year");
    if (text[4] != '-' || text[7] != '-') throw ValueError("bad date separators: " + std::string(text));
    const int mo = detail::parse_digits(text, 5, 2, "month");
    const int d = detail::parse_digits(text, 8, 2, "day");
    if (mo < 1 || mo > 12 || d < 1 || d > 31) throw ValueError("date out of range: " + std::string(text));
    int h = 0, mi = 0, s = 0;
    if (text.size() > 10) {
        if (text[10] != 'T' && text[10] != ' ')
            throw ValueError("bad date/time separator: " + std::string(text));
        h = detail::parse_digits(text, 11, 2, "hour");
        if (text.size() < 16 || text[13] != ':') throw ValueError("bad time: " + std::string(text));
        mi = detail::parse_digits(text, 14, 2, "minute");
        if (text.size() >= 19 && text[16] == ':') s = detail::parse_digits(text, 17, 2, "second");
        if (h > 23 || mi > 59 || s > 60) throw ValueError("time out of range: " + std::string(text));
        const char last = text.back();
        if (last != 'Z' && last != '0' && last != '5' && !(last >= '0' && last <= '9'))
            throw ValueError("unsupported timestamp suffix: " + std::string(text));
    }
    return timestamp_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d),
                                static_cast<unsigned>(h), static_cast<unsigned>(mi),
                                static_cast<unsigned>(s));
}

/// "YYYY-MM-DDTHH:MM:SSZ"
inline std::string format_iso8601_utc(std::int64_t ts) {
    std::int64_t days = ts / kSecondsPerDay;
    std::int64_t sod = ts % kSecondsPerDay;
    if (sod < 0) {
        sod += kSecondsPerDay;
        --days;
    }
    const CivilDate cd = civil_from_days(days);
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", cd.year, cd.month, cd.day,
                  static_cast<long long>(sod / 3600), static_cast<long long>((sod / 60) % 60),
                  static_cast<long long>(sod % 60));
    return buf;
}

/// "YYYY-MM-DD" (the Open-Meteo archive query format).
inline std::string format_iso_date(std::int64_t ts) {
    std::int64_t days = ts / kSecondsPerDay;
    if (ts % kSecondsPerDay < 0) --days;
    const CivilDate cd = civil_from_days(days);
    char buf[12];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", cd.year, cd.month, cd.day);
    return buf;
}

inline int hour_of_day(std::int64_t ts) {
    std::int64_t sod = ts % kSecondsPerDay;
    if (sod < 0) sod += kSecondsPerDay;
    return static_cast<int>(sod / kSecondsPerHour);
}

/// 0 = Monday .. 6 = Sunday (1970-01-01 was a Thursday).
inline int day_of_week(std::int64_t ts) {
    std::int64_t days = ts / kSecondsPerDay;
    if (ts % kSecondsPerDay < 0) --days;
    return static_cast<int>(((days % 7) + 7 + 3) % 7);
}

} // namespace lightcast
