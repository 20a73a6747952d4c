#include "rebal/portfolio.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "rebal/errors.hpp"

namespace rebal {

Frequency parse_frequency(std::string_view text) {
    if (text == "daily") return Frequency::daily;
    if (text == "monthly") return Frequency::monthly;
    if (text == "yearly") return Frequency::yearly;
    if (text == "never") return Frequency::never;
    throw ConfigError(fmt::format("unknown rebalance frequency '{}'", text));
}

std::string_view to_string(Frequency f) {
    switch (f) {
        case Frequency::daily: return "daily";
        case Frequency::monthly: return "monthly";
        case Frequency::yearly: return "yearly";
        case Frequency::never: return "never";
    }
    return "?";
}

void RebalancePolicy::validate() const {
    if (!(cost_rate >= 0.0 && cost_rate < 1.0)) {
        throw ConfigError(fmt::format("cost_rate {} outside [0, 1)", cost_rate));
    }
}

void CapitalPlan::validate() const {
    if (!(per_asset_capital > 0.0) || !std::isfinite(per_asset_capital)) {
        throw ConfigError(fmt::format("per-asset capital {} must be positive", per_asset_capital));
    }
    if (n_assets < 1) throw ConfigError("capital plan needs at least one asset");
}

double Ledger::value(const PriceMap& prices) const {
    double v = cash;
    for (const auto& [ticker, count] : shares) v += static_cast<double>(count) * prices.at(ticker);
    return v;
}

namespace {

// Cash left after holding `shares` out of `budget`, net of trading costs
// against the previous holdings.
double residual_cash(std::span<const double> prices, std::span<const std::int64_t> shares,
                     std::span<const std::int64_t> before, double budget, double cost_rate) {
    double invested = 0.0;
    double traded = 0.0;
    for (std::size_t i = 0; i < prices.size(); ++i) {
        invested += static_cast<double>(shares[i]) * prices[i];
        traded += static_cast<double>(std::llabs(shares[i] - before[i])) * prices[i];
    }
    return budget - invested - cost_rate * traded;
}

struct Holdings {
    std::vector<std::int64_t> shares;
    double cash = 0.0;
};

// Rounds each target to the nearest whole share, then sells single shares of
// the position furthest above its target until cash is non-negative. Assets
// are indexed in ticker order, so the lowest index wins ties.
Holdings settle(std::span<const double> prices, double target_per_asset,
                std::span<const std::int64_t> before, double budget, double cost_rate) {
    Holdings h;
    h.shares.resize(prices.size());
    for (std::size_t i = 0; i < prices.size(); ++i) {
        h.shares[i] = std::llround(target_per_asset / prices[i]);
    }
    h.cash = residual_cash(prices, h.shares, before, budget, cost_rate);
    while (h.cash < 0.0) {
        std::size_t pick = prices.size();
        double worst = 0.0;
        for (std::size_t i = 0; i < prices.size(); ++i) {
            if (h.shares[i] == 0) continue;
            const double excess = static_cast<double>(h.shares[i]) * prices[i] - target_per_asset;
            if (pick == prices.size() || excess > worst) {
                pick = i;
                worst = excess;
            }
        }
        if (pick == prices.size()) {
            throw InsolvencyError(fmt::format("cannot restore non-negative cash ({})", h.cash));
        }
        --h.shares[pick];
        h.cash = residual_cash(prices, h.shares, before, budget, cost_rate);
    }
    return h;
}

void check_prices(std::span<const double> prices, std::span<const std::string> tickers) {
    for (std::size_t i = 0; i < prices.size(); ++i) {
        if (!(prices[i] > 0.0) || !std::isfinite(prices[i])) {
            throw AllocationError(
                fmt::format("price {} for {} is not positive", prices[i], tickers[i]));
        }
    }
}

Holdings rebalance_holdings(std::span<const double> prices, const Holdings& current,
                            double cost_rate) {
    double value = current.cash;
    for (std::size_t i = 0; i < prices.size(); ++i) {
        value += static_cast<double>(current.shares[i]) * prices[i];
    }
    if (!(value > 0.0)) {
        throw InsolvencyError(fmt::format("portfolio value {} is not positive", value));
    }
    const double target = value / static_cast<double>(prices.size());
    return settle(prices, target, current.shares, value, cost_rate);
}

}  // namespace

Ledger initial_allocation(const PriceMap& prices, const CapitalPlan& plan, Date date) {
    plan.validate();
    if (prices.size() != plan.n_assets) {
        throw AllocationError(fmt::format("capital plan expects {} assets, got {} prices",
                                          plan.n_assets, prices.size()));
    }
    std::vector<std::string> tickers;
    std::vector<double> px;
    for (const auto& [t, p] : prices) {
        tickers.push_back(t);
        px.push_back(p);
    }
    check_prices(px, tickers);
    const std::vector<std::int64_t> none(px.size(), 0);
    const auto h = settle(px, plan.per_asset_capital, none, plan.total(), 0.0);
    Ledger out{date, {}, h.cash};
    for (std::size_t i = 0; i < tickers.size(); ++i) out.shares.emplace(tickers[i], h.shares[i]);
    return out;
}

std::vector<Date> rebalance_dates(std::span<const Date> calendar, Frequency frequency) {
    std::vector<Date> out;
    if (calendar.size() < 2) return out;
    switch (frequency) {
        case Frequency::never:
            break;
        case Frequency::daily:
            out.assign(calendar.begin() + 1, calendar.end());
            break;
        case Frequency::monthly:
            for (std::size_t i = 1; i < calendar.size(); ++i) {
                const auto prev = ymd(calendar[i - 1]);
                const auto cur = ymd(calendar[i]);
                if (cur.year() != prev.year() || cur.month() != prev.month()) {
                    out.push_back(calendar[i]);
                }
            }
            break;
        case Frequency::yearly: {
            const auto start = ymd(calendar.front());
            for (int k = 1;; ++k) {
                // Feb 29 anniversaries roll to Mar 1 in common years.
                const auto anniversary =
                    Date{(start.year() + std::chrono::years{k}) / start.month() / start.day()};
                if (anniversary > calendar.back()) break;
                const auto it = std::lower_bound(calendar.begin(), calendar.end(), anniversary);
                if (out.empty() || out.back() != *it) out.push_back(*it);
            }
            break;
        }
    }
    return out;
}

Ledger rebalance(const Ledger& ledger, const PriceMap& prices, const RebalancePolicy& policy) {
    policy.validate();
    std::vector<std::string> tickers;
    std::vector<double> px;
    Holdings current{{}, ledger.cash};
    for (const auto& [t, count] : ledger.shares) {
        const auto it = prices.find(t);
        if (it == prices.end()) throw AllocationError("no price for " + t);
        if (count < 0) throw ValidationError(fmt::format("negative share count for {}", t));
        tickers.push_back(t);
        px.push_back(it->second);
        current.shares.push_back(count);
    }
    if (tickers.empty()) throw AllocationError("ledger holds no tickers");
    check_prices(px, tickers);
    const auto h = rebalance_holdings(px, current, policy.cost_rate);
    Ledger out{ledger.date, {}, h.cash};
    for (std::size_t i = 0; i < tickers.size(); ++i) out.shares.emplace(tickers[i], h.shares[i]);
    return out;
}

BacktestResult run_backtest(const PricePanel& panel, const CapitalPlan& plan,
                            const RebalancePolicy& policy) {
    plan.validate();
    policy.validate();
    const std::size_t n = panel.num_assets();
    const std::size_t days = panel.num_days();
    if (n != plan.n_assets) {
        throw AllocationError(
            fmt::format("panel has {} tickers but the plan expects {}", n, plan.n_assets));
    }

    BacktestResult r;
    r.calendar = panel.calendar();
    r.tickers = panel.tickers();
    r.initial_capital = plan.total();
    r.rebalance_dates = rebalance_dates(r.calendar, policy.frequency);
    r.value.resize(days);
    r.cash.resize(days);
    r.weights.assign(n, std::vector<double>(days));
    r.shares.assign(n, std::vector<std::int64_t>(days));

    std::vector<double> px(n);
    const auto prices_on = [&](std::size_t t) {
        for (std::size_t i = 0; i < n; ++i) px[i] = panel.price(i, t);
        return std::span<const double>(px);
    };

    const std::vector<std::int64_t> none(n, 0);
    Holdings book = settle(prices_on(0), plan.per_asset_capital, none, plan.total(), 0.0);

    auto next_rebalance = r.rebalance_dates.begin();
    for (std::size_t t = 0; t < days; ++t) {
        const auto prices = prices_on(t);
        if (next_rebalance != r.rebalance_dates.end() && *next_rebalance == r.calendar[t]) {
            book = rebalance_holdings(prices, book, policy.cost_rate);
            ++next_rebalance;
        }
        double value = book.cash;
        for (std::size_t i = 0; i < n; ++i) value += static_cast<double>(book.shares[i]) * prices[i];
        r.value[t] = value;
        r.cash[t] = book.cash;
        for (std::size_t i = 0; i < n; ++i) {
            r.shares[i][t] = book.shares[i];
            r.weights[i][t] = static_cast<double>(book.shares[i]) * prices[i] / value;
        }
    }
    return r;
}

}  // namespace rebal
