#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rebal/date.hpp"
#include "rebal/errors.hpp"
#include "rebal/market_data.hpp"
#include "rebal/metrics.hpp"
#include "rebal/portfolio.hpp"
#include "rebal/report.hpp"

namespace rebal {

struct RunConfig {
    std::filesystem::path data_dir = "data";
    std::vector<std::filesystem::path> manifests;
    Date start = make_date(2021, 1, 4);
    Date split = make_date(2022, 7, 1);
    Date end = make_date(2023, 9, 20);
    Frequency frequency = Frequency::yearly;
    double per_asset_capital = 100000.0;
    double cost_rate = 0.0;
    MetricConfig metrics;
    std::filesystem::path out_dir = "out";
    TearSheetFormat tear_sheet_format = TearSheetFormat::csv;

    /// Throws ConfigError unless start < split <= end and every numeric
    /// setting is in range.
    void validate() const;
};

/// Reads a JSON run config. Keys mirror RunConfig (`data_dir`, `manifests`,
/// `start`, `split`, `end`, `frequency`, `per_asset_capital`, `cost_rate`,
/// `periods_per_year`, `risk_free`, `omega_threshold`, `var_cutoff`,
/// `out_dir`, `tear_sheet_format`); all optional. Relative paths resolve
/// against the config file's directory.
RunConfig load_run_config(const std::filesystem::path& path);

/// A failure tied to one sector and pipeline stage.
class SectorError : public Error {
public:
    SectorError(std::string sector, std::string stage, const std::string& message);
    const std::string& sector() const noexcept { return sector_; }
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string sector_;
    std::string stage_;
};

struct SectorData {
    SectorManifest manifest;
    PricePanel panel;
    /// Observations per constituent inside [start, end] before alignment.
    std::vector<std::pair<std::string, std::size_t>> coverage;
};

/// Loads, aligns and clips one sector to the configured window.
SectorData load_sector(const RunConfig& config, const std::filesystem::path& manifest_path);

/// Lower-case, underscore-separated directory name for a sector.
std::string sector_slug(std::string_view sector);

struct SectorReport {
    std::string sector;
    std::filesystem::path directory;
    ReportBundle bundle;
};

struct BacktestOutcome {
    std::vector<SectorReport> sectors;
    std::vector<SectorError> failures;
    std::vector<OutputFile> summary_files;

    bool ok() const noexcept { return failures.empty(); }
};

/// For every manifest: load, align, clip, backtest, split the returns at
/// config.split, compute in-sample / out-of-sample / overall tear sheets and
/// write them with the plot data into `out_dir/<sector>/`. A sector is
/// written to a staging directory and only renamed into place after every
/// file reparses. Failed sectors leave nothing behind.
BacktestOutcome run_backtest_command(const RunConfig& config);

/// Dry run: loads and aligns every sector and prints the calendar span,
/// coverage and planned rebalance dates. Writes nothing. Throws on the first
/// failing sector.
void run_validate_command(const RunConfig& config, std::ostream& out);

}  // namespace rebal
