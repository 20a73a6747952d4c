#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rebal/date.hpp"

namespace rebal {

/// Daily adjusted-close observations for one ticker. Dates strictly
/// increasing, prices finite and positive, at least two observations.
class PriceSeries {
public:
    /// Validates and sorts by date. Throws ValidationError on duplicate dates,
    /// non-positive or non-finite prices, or fewer than two observations.
    PriceSeries(std::string ticker, std::vector<Date> dates, std::vector<double> prices);

    const std::string& ticker() const noexcept { return ticker_; }
    const std::vector<Date>& dates() const noexcept { return dates_; }
    const std::vector<double>& prices() const noexcept { return prices_; }
    std::size_t size() const noexcept { return dates_.size(); }

    friend bool operator==(const PriceSeries&, const PriceSeries&) = default;

private:
    std::string ticker_;
    std::vector<Date> dates_;
    std::vector<double> prices_;
};

struct SectorManifest {
    std::string sector;
    std::vector<std::string> tickers;
    std::string benchmark;

    friend bool operator==(const SectorManifest&, const SectorManifest&) = default;
};

/// Prices for a set of tickers and a benchmark on one shared trading calendar.
///
/// Columns are held in ascending ticker order so that the panel does not
/// depend on the order its inputs were supplied in.
class PricePanel {
public:
    PricePanel(std::vector<Date> calendar, std::vector<std::string> tickers,
               std::vector<std::vector<double>> columns, std::string benchmark_ticker,
               std::vector<double> benchmark);

    const std::vector<Date>& calendar() const noexcept { return calendar_; }
    const std::vector<std::string>& tickers() const noexcept { return tickers_; }
    std::size_t num_assets() const noexcept { return tickers_.size(); }
    std::size_t num_days() const noexcept { return calendar_.size(); }

    /// Price column for asset `i` (index into tickers()).
    std::span<const double> column(std::size_t i) const { return columns_.at(i); }
    /// Price column by ticker; throws std::out_of_range if absent.
    std::span<const double> column(const std::string& ticker) const;
    double price(std::size_t asset, std::size_t day) const { return columns_.at(asset).at(day); }

    const std::string& benchmark_ticker() const noexcept { return benchmark_ticker_; }
    std::span<const double> benchmark() const noexcept { return benchmark_; }

    friend bool operator==(const PricePanel&, const PricePanel&) = default;

private:
    std::vector<Date> calendar_;
    std::vector<std::string> tickers_;
    std::vector<std::vector<double>> columns_;
    std::string benchmark_ticker_;
    std::vector<double> benchmark_;
};

/// Reads a `date,ticker,adj_close` CSV and returns the rows for `ticker`.
/// Files may hold one ticker or many (long format). Throws ParseError with a
/// line number for malformed rows, ValidationError for invariant violations,
/// IoError when the file cannot be opened.
PriceSeries load_price_series(const std::filesystem::path& path, const std::string& ticker);

/// Locates a ticker in a data directory: `<dir>/<ticker>.csv` first, then the
/// long-format `<dir>/prices.csv`. Throws IoError naming the ticker when
/// neither holds it.
PriceSeries load_ticker(const std::filesystem::path& data_dir, const std::string& ticker);

/// Parses a `{"sector", "tickers", "benchmark"}` JSON manifest.
SectorManifest load_sector_manifest(const std::filesystem::path& path);
void validate_manifest(const SectorManifest& manifest);

/// Restricts every series to the intersection of all date sets.
/// Throws AlignmentError when fewer than two dates are shared.
PricePanel align_panel(std::span<const PriceSeries> series, const PriceSeries& benchmark);

/// Restricts the calendar to [start, end] inclusive. Throws WindowError when
/// start > end or fewer than two trading days remain.
PricePanel clip_panel(const PricePanel& panel, Date start, Date end);

}  // namespace rebal
