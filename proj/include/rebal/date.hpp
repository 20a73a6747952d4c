#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace rebal {

/// A calendar day with no time-of-day or timezone.
using Date = std::chrono::sys_days;

/// Parses `YYYY-MM-DD`. Throws ParseError on anything else, including
/// impossible days such as 2021-02-30.
Date parse_date(std::string_view text);

std::string format_date(Date d);

inline Date make_date(int y, unsigned m, unsigned d) {
    return Date{std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d}};
}

inline std::chrono::year_month_day ymd(Date d) { return std::chrono::year_month_day{d}; }

/// ISO-8601 week key: (iso_year * 100 + iso_week). Days in the same ISO week
/// share a key; keys increase with time.
int iso_week_key(Date d);

}  // namespace rebal
