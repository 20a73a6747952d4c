#include "rebal/date.hpp"

#include <charconv>

#include <fmt/format.h>

#include "rebal/errors.hpp"

namespace rebal {

namespace {

template <typename T>
bool parse_field(std::string_view text, T& out) {
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

}  // namespace

Date parse_date(std::string_view text) {
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    const bool shaped = text.size() == 10 && text[4] == '-' && text[7] == '-';
    if (!shaped || !parse_field(text.substr(0, 4), y) || !parse_field(text.substr(5, 2), m) ||
        !parse_field(text.substr(8, 2), d)) {
        throw ParseError(fmt::format("invalid date '{}', expected YYYY-MM-DD", text));
    }
    const auto date = std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d};
    if (!date.ok()) {
        throw ParseError(fmt::format("invalid calendar day '{}'", text));
    }
    return Date{date};
}

std::string format_date(Date d) {
    const auto v = ymd(d);
    return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(v.year()),
                       static_cast<unsigned>(v.month()), static_cast<unsigned>(v.day()));
}

int iso_week_key(Date d) {
    using namespace std::chrono;
    // ISO weeks start on Monday; the week belongs to the year of its Thursday.
    const auto iso_weekday = weekday{d}.iso_encoding();  // Mon=1 .. Sun=7
    const Date thursday = d + days{4 - static_cast<int>(iso_weekday)};
    const year iso_year = year_month_day{thursday}.year();
    const Date jan1 = sys_days{iso_year / January / 1};
    const int week = static_cast<int>((thursday - jan1).count()) / 7 + 1;
    return static_cast<int>(iso_year) * 100 + week;
}

}  // namespace rebal
