#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "rebal/returns.hpp"

namespace rebal {

struct MetricConfig {
    int periods_per_year = 252;
    double risk_free_rate_annual = 0.0;
    double omega_threshold_daily = 0.0;
    double var_cutoff = 0.05;

    void validate() const;
    /// Per-period rate that compounds to the annual risk-free rate.
    double risk_free_per_period() const;
};

/// Not-computable metrics are empty.
using MetricValue = std::optional<double>;

struct TearSheet {
    std::string window_label;
    MetricValue annual_return;
    MetricValue cumulative_return;
    MetricValue annual_volatility;
    MetricValue max_drawdown;
    MetricValue sharpe;
    MetricValue calmar;
    MetricValue sortino;
    MetricValue omega;
    MetricValue tail_ratio;
    MetricValue skewness;
    MetricValue kurtosis;
    MetricValue stability;
    MetricValue daily_var;
    MetricValue alpha;
    MetricValue beta;

    friend bool operator==(const TearSheet&, const TearSheet&) = default;
};

struct MetricField {
    std::string_view key;    // serialized name
    std::string_view label;  // row label in tabular reports
    MetricValue TearSheet::*member;
};

/// The fifteen tear-sheet rows in report order.
inline constexpr std::array<MetricField, 15> kTearSheetFields{{
    {"annual_return", "Annual return", &TearSheet::annual_return},
    {"cumulative_return", "Cumulative return", &TearSheet::cumulative_return},
    {"annual_volatility", "Annual volatility", &TearSheet::annual_volatility},
    {"max_drawdown", "Max drawdown", &TearSheet::max_drawdown},
    {"sharpe", "Sharpe ratio", &TearSheet::sharpe},
    {"calmar", "Calmar ratio", &TearSheet::calmar},
    {"sortino", "Sortino ratio", &TearSheet::sortino},
    {"omega", "Omega ratio", &TearSheet::omega},
    {"tail_ratio", "Tail ratio", &TearSheet::tail_ratio},
    {"skewness", "Skewness", &TearSheet::skewness},
    {"kurtosis", "Kurtosis", &TearSheet::kurtosis},
    {"stability", "Stability", &TearSheet::stability},
    {"daily_var", "Daily value at risk", &TearSheet::daily_var},
    {"alpha", "Alpha", &TearSheet::alpha},
    {"beta", "Beta", &TearSheet::beta},
}};

struct BoxSummary {
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
};

struct AlphaBeta {
    double alpha_annual = 0.0;
    double beta = 0.0;
};

/// Linear interpolation between closest ranks: position (n - 1) * q / 100
/// in the sorted sample. `q` in [0, 100].
double percentile(std::span<const double> values, double q);

/// (final / initial)^(1 / years) - 1.
double cagr(double initial, double final_value, double years);

/// Geometric annualization of the compounded return over n periods.
double annual_return(std::span<const double> returns, const MetricConfig& cfg);
double total_return(std::span<const double> returns);

/// Sample standard deviation scaled by sqrt(periods_per_year).
double annual_volatility(std::span<const double> returns, const MetricConfig& cfg);

/// Worst decline of `wealth` from its running peak; in [-1, 0].
double max_drawdown(std::span<const double> wealth);
/// Drawdown of the wealth curve 1, (1+r_1), (1+r_1)(1+r_2), ...
double max_drawdown_from_returns(std::span<const double> returns);

double sharpe(std::span<const double> returns, const MetricConfig& cfg);
double sortino(std::span<const double> returns, const MetricConfig& cfg);
double calmar(std::span<const double> returns, const MetricConfig& cfg);
double omega(std::span<const double> returns, const MetricConfig& cfg);
double tail_ratio(std::span<const double> returns);

/// Adjusted Fisher-Pearson sample skewness.
double skewness(std::span<const double> returns);
/// Sample-adjusted excess kurtosis; a normal sample scores near 0.
double kurtosis(std::span<const double> returns);
/// Non-excess counterpart of kurtosis(): kurtosis() + 3.
double kurtosis_pearson(std::span<const double> returns);

/// R^2 of an ordinary least-squares line through the cumulative log returns
/// against the period index.
double stability(std::span<const double> returns);

/// Historical value at risk: the var_cutoff quantile of the returns.
double daily_var(std::span<const double> returns, const MetricConfig& cfg);

/// Regression of portfolio excess returns on benchmark excess returns.
/// Dates must match exactly.
AlphaBeta alpha_beta(const ReturnSeries& portfolio, const ReturnSeries& benchmark,
                     const MetricConfig& cfg);
AlphaBeta alpha_beta(std::span<const double> portfolio, std::span<const double> benchmark,
                     const MetricConfig& cfg);

TearSheet tear_sheet(const ReturnSeries& portfolio, const ReturnSeries& benchmark,
                     const MetricConfig& cfg, std::string window_label);

BoxSummary box_plot_summary(std::span<const double> returns);

}  // namespace rebal
