#include "rebal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <fmt/format.h>

#include "rebal/errors.hpp"

namespace rebal {

void MetricConfig::validate() const {
    if (periods_per_year < 1) {
        throw ConfigError(fmt::format("periods_per_year {} must be at least 1", periods_per_year));
    }
    if (!(var_cutoff > 0.0 && var_cutoff < 0.5)) {
        throw ConfigError(fmt::format("var_cutoff {} outside (0, 0.5)", var_cutoff));
    }
    if (!(risk_free_rate_annual >= -1.0) || !std::isfinite(risk_free_rate_annual)) {
        throw ConfigError(fmt::format("risk-free rate {} below -1", risk_free_rate_annual));
    }
    if (!std::isfinite(omega_threshold_daily)) throw ConfigError("omega threshold must be finite");
}

double MetricConfig::risk_free_per_period() const {
    return std::pow(1.0 + risk_free_rate_annual, 1.0 / periods_per_year) - 1.0;
}

namespace {

void require_nonempty(std::span<const double> xs, std::string_view what) {
    if (xs.empty()) throw DomainError(fmt::format("{}: empty return series", what));
}

bool all_equal(std::span<const double> xs) {
    return std::adjacent_find(xs.begin(), xs.end(), std::not_equal_to<>{}) == xs.end();
}

double mean(std::span<const double> xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_std(std::span<const double> xs) {
    const double m = mean(xs);
    double ss = 0.0;
    for (const double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

std::vector<double> shifted(std::span<const double> xs, double by) {
    std::vector<double> out(xs.begin(), xs.end());
    for (auto& x : out) x -= by;
    return out;
}

// Central moments m2, m3, m4 with divisor n.
struct Moments {
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
};

Moments central_moments(std::span<const double> xs) {
    const double m = mean(xs);
    Moments mo;
    for (const double x : xs) {
        const double d = x - m;
        const double d2 = d * d;
        mo.m2 += d2;
        mo.m3 += d2 * d;
        mo.m4 += d2 * d2;
    }
    const auto n = static_cast<double>(xs.size());
    mo.m2 /= n;
    mo.m3 /= n;
    mo.m4 /= n;
    return mo;
}

}  // namespace

double percentile(std::span<const double> values, double q) {
    if (values.empty()) throw DomainError("percentile of an empty sample");
    if (!(q >= 0.0 && q <= 100.0)) throw DomainError(fmt::format("percentile {} outside [0, 100]", q));
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double h = static_cast<double>(sorted.size() - 1) * q / 100.0;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double cagr(double initial, double final_value, double years) {
    if (!(initial > 0.0) || !(final_value > 0.0) || !(years > 0.0)) {
        throw DomainError(fmt::format("cagr needs positive inputs (initial {}, final {}, years {})",
                                      initial, final_value, years));
    }
    return std::pow(final_value / initial, 1.0 / years) - 1.0;
}

double total_return(std::span<const double> returns) {
    require_nonempty(returns, "total_return");
    double growth = 1.0;
    for (const double r : returns) growth *= 1.0 + r;
    return growth - 1.0;
}

double annual_return(std::span<const double> returns, const MetricConfig& cfg) {
    require_nonempty(returns, "annual_return");
    double log_growth = 0.0;
    for (const double r : returns) log_growth += std::log1p(r);
    return std::expm1(log_growth * cfg.periods_per_year / static_cast<double>(returns.size()));
}

double annual_volatility(std::span<const double> returns, const MetricConfig& cfg) {
    if (returns.size() < 2) throw DomainError("annual_volatility needs at least 2 returns");
    if (all_equal(returns)) return 0.0;
    return sample_std(returns) * std::sqrt(static_cast<double>(cfg.periods_per_year));
}

double max_drawdown(std::span<const double> wealth) {
    if (wealth.empty()) throw DomainError("max_drawdown of an empty series");
    double peak = wealth.front();
    if (!(peak > 0.0)) throw DomainError("wealth curve must start positive");
    double worst = 0.0;
    for (const double w : wealth) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw DomainError(fmt::format("wealth {} is negative or not finite", w));
        }
        peak = std::max(peak, w);
        worst = std::min(worst, w / peak - 1.0);
    }
    return worst;
}

double max_drawdown_from_returns(std::span<const double> returns) {
    require_nonempty(returns, "max_drawdown");
    std::vector<double> wealth;
    wealth.reserve(returns.size() + 1);
    wealth.push_back(1.0);
    for (const double r : returns) wealth.push_back(wealth.back() * (1.0 + r));
    return max_drawdown(wealth);
}

double sharpe(std::span<const double> returns, const MetricConfig& cfg) {
    require_nonempty(returns, "sharpe");
    const auto excess = shifted(returns, cfg.risk_free_per_period());
    if (excess.size() < 2 || all_equal(excess)) {
        throw UndefinedMetric("sharpe: returns have zero standard deviation");
    }
    return mean(excess) / sample_std(excess) * std::sqrt(static_cast<double>(cfg.periods_per_year));
}

double sortino(std::span<const double> returns, const MetricConfig& cfg) {
    require_nonempty(returns, "sortino");
    const auto excess = shifted(returns, cfg.risk_free_per_period());
    double downside = 0.0;
    for (const double x : excess) {
        if (x < 0.0) downside += x * x;
    }
    if (downside == 0.0) throw UndefinedMetric("sortino: no returns below the target");
    const double dd = std::sqrt(downside / static_cast<double>(excess.size()));
    return mean(excess) / dd * std::sqrt(static_cast<double>(cfg.periods_per_year));
}

double calmar(std::span<const double> returns, const MetricConfig& cfg) {
    const double mdd = max_drawdown_from_returns(returns);
    if (mdd == 0.0) throw UndefinedMetric("calmar: zero maximum drawdown");
    return annual_return(returns, cfg) / std::abs(mdd);
}

double omega(std::span<const double> returns, const MetricConfig& cfg) {
    require_nonempty(returns, "omega");
    const double threshold = cfg.omega_threshold_daily;
    double gains = 0.0;
    double losses = 0.0;
    for (const double r : returns) {
        if (r > threshold) gains += r - threshold;
        else losses += threshold - r;
    }
    if (losses == 0.0) throw UndefinedMetric("omega: no returns below the threshold");
    return gains / losses;
}

double tail_ratio(std::span<const double> returns) {
    require_nonempty(returns, "tail_ratio");
    const double left = percentile(returns, 5.0);
    if (left == 0.0) throw UndefinedMetric("tail_ratio: 5th percentile is zero");
    return std::abs(percentile(returns, 95.0)) / std::abs(left);
}

double skewness(std::span<const double> returns) {
    if (returns.size() < 3 || all_equal(returns)) {
        throw UndefinedMetric("skewness needs 3+ returns with non-zero variance");
    }
    const auto n = static_cast<double>(returns.size());
    const auto mo = central_moments(returns);
    const double g1 = mo.m3 / std::pow(mo.m2, 1.5);
    return g1 * std::sqrt(n * (n - 1.0)) / (n - 2.0);
}

double kurtosis(std::span<const double> returns) {
    if (returns.size() < 4 || all_equal(returns)) {
        throw UndefinedMetric("kurtosis needs 4+ returns with non-zero variance");
    }
    const auto n = static_cast<double>(returns.size());
    const auto mo = central_moments(returns);
    const double g2 = mo.m4 / (mo.m2 * mo.m2) - 3.0;
    return ((n + 1.0) * g2 + 6.0) * (n - 1.0) / ((n - 2.0) * (n - 3.0));
}

double kurtosis_pearson(std::span<const double> returns) { return kurtosis(returns) + 3.0; }

double stability(std::span<const double> returns) {
    if (returns.size() < 3) throw UndefinedMetric("stability needs at least 3 returns");
    std::vector<double> cum(returns.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < returns.size(); ++i) {
        acc += std::log1p(returns[i]);
        cum[i] = acc;
    }
    if (all_equal(cum)) throw UndefinedMetric("stability: cumulative log returns are constant");

    const auto n = static_cast<double>(cum.size());
    const double x_mean = (n - 1.0) / 2.0;
    const double y_mean = mean(cum);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < cum.size(); ++i) {
        const double dx = static_cast<double>(i) - x_mean;
        sxy += dx * (cum[i] - y_mean);
        sxx += dx * dx;
    }
    const double slope = sxy / sxx;
    const double intercept = y_mean - slope * x_mean;
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < cum.size(); ++i) {
        const double fit = intercept + slope * static_cast<double>(i);
        ss_res += (cum[i] - fit) * (cum[i] - fit);
        ss_tot += (cum[i] - y_mean) * (cum[i] - y_mean);
    }
    if (ss_tot == 0.0) throw UndefinedMetric("stability: cumulative log returns are constant");
    return std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
}

double daily_var(std::span<const double> returns, const MetricConfig& cfg) {
    require_nonempty(returns, "daily_var");
    return percentile(returns, 100.0 * cfg.var_cutoff);
}

AlphaBeta alpha_beta(std::span<const double> portfolio, std::span<const double> benchmark,
                     const MetricConfig& cfg) {
    if (portfolio.size() != benchmark.size()) {
        throw AlignmentError(fmt::format("portfolio has {} returns, benchmark {}",
                                         portfolio.size(), benchmark.size()));
    }
    if (portfolio.size() < 3) throw DomainError("alpha_beta needs at least 3 paired returns");
    const double rf = cfg.risk_free_per_period();
    const auto ep = shifted(portfolio, rf);
    const auto eb = shifted(benchmark, rf);
    if (all_equal(eb)) throw UndefinedMetric("beta: benchmark returns have zero variance");

    const double mp = mean(ep);
    const double mb = mean(eb);
    double cov = 0.0;
    double var = 0.0;
    for (std::size_t i = 0; i < ep.size(); ++i) {
        cov += (ep[i] - mp) * (eb[i] - mb);
        var += (eb[i] - mb) * (eb[i] - mb);
    }
    const double beta = cov / var;  // the n-1 divisors cancel
    const double alpha_daily = mp - beta * mb;
    return {std::pow(1.0 + alpha_daily, cfg.periods_per_year) - 1.0, beta};
}

AlphaBeta alpha_beta(const ReturnSeries& portfolio, const ReturnSeries& benchmark,
                     const MetricConfig& cfg) {
    if (portfolio.dates != benchmark.dates) {
        throw AlignmentError("portfolio and benchmark returns are not on the same dates");
    }
    return alpha_beta(std::span<const double>(portfolio.values),
                      std::span<const double>(benchmark.values), cfg);
}

namespace {

template <typename F>
MetricValue computable(F&& f) {
    try {
        return f();
    } catch (const UndefinedMetric&) {
        return std::nullopt;
    }
}

}  // namespace

TearSheet tear_sheet(const ReturnSeries& portfolio, const ReturnSeries& benchmark,
                     const MetricConfig& cfg, std::string window_label) {
    cfg.validate();
    portfolio.validate();
    benchmark.validate();
    if (portfolio.dates != benchmark.dates) {
        throw AlignmentError(fmt::format("window {}: portfolio and benchmark dates differ",
                                         window_label));
    }
    if (portfolio.size() < 2) {
        throw DomainError(fmt::format("window {}: needs at least 2 daily returns, got {}",
                                      window_label, portfolio.size()));
    }
    const std::span<const double> r = portfolio.values;
    TearSheet ts;
    ts.window_label = std::move(window_label);
    ts.annual_return = annual_return(r, cfg);
    ts.cumulative_return = total_return(r);
    ts.annual_volatility = annual_volatility(r, cfg);
    ts.max_drawdown = max_drawdown_from_returns(r);
    ts.sharpe = computable([&] { return sharpe(r, cfg); });
    ts.calmar = computable([&] { return calmar(r, cfg); });
    ts.sortino = computable([&] { return sortino(r, cfg); });
    ts.omega = computable([&] { return omega(r, cfg); });
    ts.tail_ratio = computable([&] { return tail_ratio(r); });
    ts.skewness = computable([&] { return skewness(r); });
    ts.kurtosis = computable([&] { return kurtosis(r); });
    ts.stability = computable([&] { return stability(r); });
    ts.daily_var = daily_var(r, cfg);
    if (portfolio.size() >= 3) {
        try {
            const auto ab = alpha_beta(portfolio, benchmark, cfg);
            ts.alpha = ab.alpha_annual;
            ts.beta = ab.beta;
        } catch (const UndefinedMetric&) {
        }
    }
    return ts;
}

BoxSummary box_plot_summary(std::span<const double> returns) {
    if (returns.empty()) throw DomainError("box_plot_summary of an empty series");
    return {percentile(returns, 0.0), percentile(returns, 25.0), percentile(returns, 50.0),
            percentile(returns, 75.0), percentile(returns, 100.0)};
}

}  // namespace rebal
