#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "rebal/date.hpp"

namespace rebal {

enum class ReturnKind { simple, log };
enum class ReturnFrequency { daily, weekly, monthly, annual };

std::string_view to_string(ReturnFrequency f);

/// Dated returns. Each value is the return from the previous observation to
/// the one on `dates[i]`.
struct ReturnSeries {
    std::vector<Date> dates;
    std::vector<double> values;
    ReturnKind kind = ReturnKind::simple;
    ReturnFrequency frequency = ReturnFrequency::daily;

    std::size_t size() const noexcept { return values.size(); }
    bool empty() const noexcept { return values.empty(); }

    /// Throws DomainError on length mismatch, unordered dates, or a simple
    /// return at or below -1.
    void validate() const;

    /// Undated daily simple series; dates are consecutive days from 2000-01-01.
    static ReturnSeries from_values(std::vector<double> values);

    friend bool operator==(const ReturnSeries&, const ReturnSeries&) = default;
};

struct SampleSplit {
    ReturnSeries in_sample;
    ReturnSeries out_of_sample;
    Date split_date{};
};

/// r_t = v_t / v_{t-1} - 1, dated at t. Needs two or more positive values.
ReturnSeries simple_returns(std::span<const Date> dates, std::span<const double> values);
/// ln(v_t / v_{t-1}), dated at t.
ReturnSeries log_returns(std::span<const Date> dates, std::span<const double> values);

/// (final - initial) / initial.
double cumulative_return(double initial, double final_value);

/// c_t = prod_{s<=t}(1 + r_s) - 1 for a simple series.
std::vector<double> cumulative_return_series(const ReturnSeries& returns);

/// Compounds daily simple returns within ISO weeks, calendar months or
/// calendar years; each bucket is dated at its last trading day.
ReturnSeries aggregate(const ReturnSeries& returns, ReturnFrequency target);

/// Dates before `split_date` go in-sample, the rest out-of-sample. Throws
/// WindowError unless both halves are non-empty.
SampleSplit split_sample(const ReturnSeries& returns, Date split_date);

/// Entries with start <= date <= end.
ReturnSeries slice(const ReturnSeries& returns, Date start, Date end);

}  // namespace rebal
