#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rebal/date.hpp"
#include "rebal/metrics.hpp"
#include "rebal/portfolio.hpp"

namespace rebal {

enum class TearSheetFormat { csv, json };

TearSheetFormat parse_tear_sheet_format(std::string_view text);

struct OutputFile {
    std::string kind;  // tear_sheet, shares, weights, cumulative, distribution, summary
    std::filesystem::path path;
};

struct ReportBundle {
    std::vector<TearSheet> tear_sheets;
    std::vector<OutputFile> files;
};

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

/// CSV: one row per metric, one column per window, empty cell for
/// not-computable. JSON: `[{"window": str, "metrics": {name: number|null}}]`.
/// Throws ValidationError on duplicate window labels, IoError when the file
/// cannot be written.
void export_tear_sheets(std::span<const TearSheet> sheets, const std::filesystem::path& path,
                        TearSheetFormat format);

/// Inverse of export_tear_sheets. Throws ParseError on malformed content.
std::vector<TearSheet> read_tear_sheets(const std::filesystem::path& path, TearSheetFormat format);

struct SectorSheet {
    std::string sector;
    TearSheet sheet;
};

/// Cross-sector table for one window: metrics as rows, sectors as columns.
void export_sector_summary(std::span<const SectorSheet> sheets, const std::filesystem::path& path);

/// Writes the four plot datasets for one backtest into `out_dir`:
///   shares.csv        date,<ticker...>
///   weights.csv       date,<ticker...>
///   cumulative.csv    date,portfolio_cum,benchmark_cum,segment
///   distribution.csv  frequency,stat,value
/// `benchmark_cum` is aligned with result.calendar. Ticker columns follow
/// `column_order` when given, else result.tickers.
std::vector<OutputFile> emit_plot_data(const BacktestResult& result,
                                       std::span<const double> benchmark_cum, Date split_date,
                                       const std::filesystem::path& out_dir,
                                       std::span<const std::string> column_order = {});

/// Reads any of the emitted CSV files back as a header plus rows of cells.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv_table(const std::filesystem::path& path);

}  // namespace rebal
