#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rebal/date.hpp"
#include "rebal/market_data.hpp"

namespace rebal {

enum class Frequency { daily, monthly, yearly, never };

Frequency parse_frequency(std::string_view text);
std::string_view to_string(Frequency f);

struct RebalancePolicy {
    Frequency frequency = Frequency::yearly;
    /// Fraction of traded notional charged per trade, in [0, 1).
    double cost_rate = 0.0;

    void validate() const;
};

struct CapitalPlan {
    double per_asset_capital = 100000.0;
    std::size_t n_assets = 1;

    void validate() const;
    double total() const { return per_asset_capital * static_cast<double>(n_assets); }
};

using ShareMap = std::map<std::string, std::int64_t>;
using PriceMap = std::map<std::string, double>;

/// Holdings on one day: whole shares per ticker plus uninvested cash.
struct Ledger {
    Date date{};
    ShareMap shares;
    double cash = 0.0;

    double value(const PriceMap& prices) const;

    friend bool operator==(const Ledger&, const Ledger&) = default;
};

struct BacktestResult {
    std::vector<Date> calendar;
    std::vector<std::string> tickers;
    std::vector<double> value;
    /// Indexed [asset][day], asset order matching `tickers`.
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<std::int64_t>> shares;
    std::vector<double> cash;
    std::vector<Date> rebalance_dates;
    double initial_capital = 0.0;

    friend bool operator==(const BacktestResult&, const BacktestResult&) = default;
};

/// Buys round(capital / price) shares of every ticker (half away from zero),
/// then sells back single shares of the most overweight position until cash
/// is non-negative. Throws AllocationError on a non-positive price or a
/// ticker count that disagrees with the plan.
Ledger initial_allocation(const PriceMap& prices, const CapitalPlan& plan, Date date = {});

/// Trading days on which a rebalance happens. The first calendar day is never
/// one: the initial allocation covers it.
///  - daily:   every day after the first
///  - monthly: first trading day of each calendar month after the start month
///  - yearly:  first trading day on or after each anniversary of the start
///  - never:   none
std::vector<Date> rebalance_dates(std::span<const Date> calendar, Frequency frequency);

/// Resets the ledger to equal value per ticker at the given prices.
/// Throws InsolvencyError when the marked value is not positive.
Ledger rebalance(const Ledger& ledger, const PriceMap& prices, const RebalancePolicy& policy);

/// Runs the allocation on the first panel day and rebalances on the policy's
/// schedule, marking to market at each day's close.
BacktestResult run_backtest(const PricePanel& panel, const CapitalPlan& plan,
                            const RebalancePolicy& policy);

}  // namespace rebal
