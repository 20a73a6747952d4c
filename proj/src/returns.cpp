#include "rebal/returns.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "rebal/errors.hpp"

namespace rebal {

std::string_view to_string(ReturnFrequency f) {
    switch (f) {
        case ReturnFrequency::daily: return "daily";
        case ReturnFrequency::weekly: return "weekly";
        case ReturnFrequency::monthly: return "monthly";
        case ReturnFrequency::annual: return "annual";
    }
    return "?";
}

void ReturnSeries::validate() const {
    if (dates.size() != values.size()) {
        throw DomainError(fmt::format("return series has {} dates but {} values", dates.size(),
                                      values.size()));
    }
    if (std::adjacent_find(dates.begin(), dates.end(), std::greater_equal<>{}) != dates.end()) {
        throw DomainError("return series dates must be strictly increasing");
    }
    for (const double v : values) {
        if (!std::isfinite(v)) throw DomainError("return series holds a non-finite value");
        if (kind == ReturnKind::simple && v <= -1.0) {
            throw DomainError(fmt::format("simple return {} is at or below -100%", v));
        }
    }
}

ReturnSeries ReturnSeries::from_values(std::vector<double> values) {
    ReturnSeries out;
    const Date origin = make_date(2000, 1, 1);
    out.dates.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        out.dates.push_back(origin + std::chrono::days{static_cast<int>(i)});
    }
    out.values = std::move(values);
    out.validate();
    return out;
}

namespace {

template <typename Step>
ReturnSeries step_returns(std::span<const Date> dates, std::span<const double> values,
                          ReturnKind kind, Step step) {
    if (dates.size() != values.size()) {
        throw DomainError(fmt::format("{} dates for {} values", dates.size(), values.size()));
    }
    if (values.size() < 2) throw DomainError("need at least 2 values to form returns");
    for (const double v : values) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw DomainError(fmt::format("value {} is not positive", v));
        }
    }
    ReturnSeries out;
    out.kind = kind;
    out.dates.assign(dates.begin() + 1, dates.end());
    out.values.reserve(values.size() - 1);
    for (std::size_t t = 1; t < values.size(); ++t) out.values.push_back(step(values[t - 1], values[t]));
    out.validate();
    return out;
}

}  // namespace

ReturnSeries simple_returns(std::span<const Date> dates, std::span<const double> values) {
    return step_returns(dates, values, ReturnKind::simple,
                        [](double prev, double cur) { return cur / prev - 1.0; });
}

ReturnSeries log_returns(std::span<const Date> dates, std::span<const double> values) {
    return step_returns(dates, values, ReturnKind::log,
                        [](double prev, double cur) { return std::log(cur / prev); });
}

double cumulative_return(double initial, double final_value) {
    if (!(initial > 0.0)) {
        throw DomainError(fmt::format("initial value {} must be positive", initial));
    }
    return (final_value - initial) / initial;
}

std::vector<double> cumulative_return_series(const ReturnSeries& returns) {
    if (returns.kind != ReturnKind::simple) {
        throw DomainError("cumulative_return_series expects simple returns");
    }
    std::vector<double> out;
    out.reserve(returns.size());
    double wealth = 1.0;
    for (const double r : returns.values) {
        wealth *= 1.0 + r;
        out.push_back(wealth - 1.0);
    }
    return out;
}

ReturnSeries aggregate(const ReturnSeries& returns, ReturnFrequency target) {
    if (returns.empty()) throw DomainError("cannot aggregate an empty return series");
    if (returns.kind != ReturnKind::simple) throw DomainError("aggregate expects simple returns");
    const auto bucket = [target](Date d) -> long {
        const auto v = ymd(d);
        switch (target) {
            case ReturnFrequency::daily: return d.time_since_epoch().count();
            case ReturnFrequency::weekly: return iso_week_key(d);
            case ReturnFrequency::monthly:
                return static_cast<int>(v.year()) * 100L + static_cast<unsigned>(v.month());
            case ReturnFrequency::annual: return static_cast<int>(v.year());
        }
        return 0;
    };
    ReturnSeries out;
    out.frequency = target;
    double growth = 1.0;
    for (std::size_t i = 0; i < returns.size(); ++i) {
        growth *= 1.0 + returns.values[i];
        const bool closes = i + 1 == returns.size() ||
                            bucket(returns.dates[i + 1]) != bucket(returns.dates[i]);
        if (closes) {
            out.dates.push_back(returns.dates[i]);
            out.values.push_back(growth - 1.0);
            growth = 1.0;
        }
    }
    return out;
}

SampleSplit split_sample(const ReturnSeries& returns, Date split_date) {
    const auto cut = std::lower_bound(returns.dates.begin(), returns.dates.end(), split_date);
    if (cut == returns.dates.begin() || cut == returns.dates.end()) {
        throw WindowError(fmt::format("split date {} leaves an empty sample", format_date(split_date)));
    }
    const auto k = cut - returns.dates.begin();
    SampleSplit s;
    s.split_date = split_date;
    for (auto* half : {&s.in_sample, &s.out_of_sample}) {
        half->kind = returns.kind;
        half->frequency = returns.frequency;
    }
    s.in_sample.dates.assign(returns.dates.begin(), cut);
    s.in_sample.values.assign(returns.values.begin(), returns.values.begin() + k);
    s.out_of_sample.dates.assign(cut, returns.dates.end());
    s.out_of_sample.values.assign(returns.values.begin() + k, returns.values.end());
    return s;
}

ReturnSeries slice(const ReturnSeries& returns, Date start, Date end) {
    const auto lo = std::lower_bound(returns.dates.begin(), returns.dates.end(), start);
    const auto hi = std::upper_bound(returns.dates.begin(), returns.dates.end(), end);
    ReturnSeries out;
    out.kind = returns.kind;
    out.frequency = returns.frequency;
    if (lo >= hi) return out;
    out.dates.assign(lo, hi);
    out.values.assign(returns.values.begin() + (lo - returns.dates.begin()),
                      returns.values.begin() + (hi - returns.dates.begin()));
    return out;
}

}  // namespace rebal
