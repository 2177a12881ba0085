#pragma once

#include <compare>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <optional>
#include <string>
#include <string_view>

namespace floors {

struct CivilDate {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31

    auto operator<=>(const CivilDate&) const = default;
};

// Days since 1970-01-01 (Howard Hinnant's civil-days algorithm).
inline std::int64_t days_from_civil(CivilDate d) {
    const int y = d.year - (d.month <= 2 ? 1 : 0);
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(d.month + (d.month > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d.day) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline CivilDate civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return CivilDate{static_cast<int>(y + (m <= 2 ? 1 : 0)), static_cast<int>(m), static_cast<int>(d)};
}

inline CivilDate add_days(CivilDate d, std::int64_t n) { return civil_from_days(days_from_civil(d) + n); }

inline std::string format_date(CivilDate d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

inline std::optional<CivilDate> parse_date(std::string_view s) {
    CivilDate d;
    if (s.size() < 10) return std::nullopt;
    if (std::sscanf(std::string(s.substr(0, 10)).c_str(), "%4d-%2d-%2d", &d.year, &d.month, &d.day) != 3)
        return std::nullopt;
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31) return std::nullopt;
    return d;
}

// UTC timestamp "YYYY-MM-DDTHH:MM:SS.ffffffZ" with microsecond fraction.
inline std::string format_timestamp(CivilDate date, std::int64_t micros_of_day) {
    const std::int64_t sec = micros_of_day / 1000000;
    const std::int64_t frac = micros_of_day % 1000000;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%06dZ", date.year, date.month, date.day,
                  static_cast<int>(sec / 3600), static_cast<int>((sec / 60) % 60), static_cast<int>(sec % 60),
                  static_cast<int>(frac));
    return buf;
}

// Accepts an optional fractional-seconds part; returns the date component.
inline std::optional<CivilDate> timestamp_date(std::string_view ts) {
    if (ts.size() < 19 || ts[10] != 'T') return std::nullopt;
    return parse_date(ts.substr(0, 10));
}

// Wall-clock UTC now, for operational records (not deterministic output).
inline std::string now_timestamp() {
    const std::int64_t us = std::time(nullptr) * 1000000LL;
    const std::int64_t day = us / 86400000000LL;
    return format_timestamp(civil_from_days(day), us - day * 86400000000LL);
}

}  // namespace floors
