#include "rebal/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "rebal/returns.hpp"

namespace rebal {

namespace fs = std::filesystem;

void RunConfig::validate() const {
    if (!(start < split && split <= end)) {
        throw ConfigError(fmt::format("dates must satisfy start < split <= end (got {}, {}, {})",
                                      format_date(start), format_date(split), format_date(end)));
    }
    CapitalPlan{per_asset_capital, 1}.validate();
    RebalancePolicy{frequency, cost_rate}.validate();
    metrics.validate();
}

RunConfig load_run_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    RunConfig cfg;
    const auto base = path.parent_path();
    const auto resolve = [&](const std::string& p) {
        const fs::path q = p;
        return q.is_absolute() ? q : base / q;
    };
    try {
        const auto doc = nlohmann::json::parse(in);
        if (!doc.is_object()) throw ConfigError(path.string() + ": config must be a JSON object");
        static const std::set<std::string> known{
            "data_dir", "manifests", "start", "split", "end", "frequency", "per_asset_capital",
            "cost_rate", "periods_per_year", "risk_free", "omega_threshold", "var_cutoff",
            "out_dir", "tear_sheet_format"};
        for (const auto& [key, _] : doc.items()) {
            if (!known.contains(key)) throw ConfigError(path.string() + ": unknown key '" + key + "'");
        }
        if (doc.contains("data_dir")) cfg.data_dir = resolve(doc["data_dir"].get<std::string>());
        if (doc.contains("out_dir")) cfg.out_dir = resolve(doc["out_dir"].get<std::string>());
        if (doc.contains("manifests")) {
            for (const auto& m : doc["manifests"]) cfg.manifests.push_back(resolve(m.get<std::string>()));
        }
        if (doc.contains("start")) cfg.start = parse_date(doc["start"].get<std::string>());
        if (doc.contains("split")) cfg.split = parse_date(doc["split"].get<std::string>());
        if (doc.contains("end")) cfg.end = parse_date(doc["end"].get<std::string>());
        if (doc.contains("frequency")) cfg.frequency = parse_frequency(doc["frequency"].get<std::string>());
        if (doc.contains("per_asset_capital")) cfg.per_asset_capital = doc["per_asset_capital"].get<double>();
        if (doc.contains("cost_rate")) cfg.cost_rate = doc["cost_rate"].get<double>();
        if (doc.contains("periods_per_year")) cfg.metrics.periods_per_year = doc["periods_per_year"].get<int>();
        if (doc.contains("risk_free")) cfg.metrics.risk_free_rate_annual = doc["risk_free"].get<double>();
        if (doc.contains("omega_threshold")) cfg.metrics.omega_threshold_daily = doc["omega_threshold"].get<double>();
        if (doc.contains("var_cutoff")) cfg.metrics.var_cutoff = doc["var_cutoff"].get<double>();
        if (doc.contains("tear_sheet_format")) {
            cfg.tear_sheet_format = parse_tear_sheet_format(doc["tear_sheet_format"].get<std::string>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
    } catch (const ParseError& e) {
        throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
    }
    return cfg;
}

SectorError::SectorError(std::string sector, std::string stage, const std::string& message)
    : Error(fmt::format("sector '{}' failed at {}: {}", sector, stage, message)),
      sector_(std::move(sector)),
      stage_(std::move(stage)) {}

std::string sector_slug(std::string_view sector) {
    std::string out;
    bool gap = false;
    for (const unsigned char c : sector) {
        if (std::isalnum(c)) {
            if (gap && !out.empty()) out += '_';
            out += static_cast<char>(std::tolower(c));
            gap = false;
        } else {
            gap = true;
        }
    }
    return out.empty() ? "sector" : out;
}

namespace {

// Runs `f`, re-throwing library errors as SectorError tagged with the stage.
template <typename F>
auto staged(const std::string& sector, const char* stage, F&& f) {
    try {
        return f();
    } catch (const SectorError&) {
        throw;
    } catch (const std::exception& e) {
        throw SectorError(sector, stage, e.what());
    }
}

std::size_t observations_in(const PriceSeries& s, Date start, Date end) {
    const auto& d = s.dates();
    return static_cast<std::size_t>(std::upper_bound(d.begin(), d.end(), end) -
                                    std::lower_bound(d.begin(), d.end(), start));
}

bool same_number(const std::string& text, double expected) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) return false;
    return std::abs(v - expected) <= 1e-9 * std::max(1.0, std::abs(expected));
}

bool same_metric(const MetricValue& a, const MetricValue& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || std::abs(*a - *b) <= 1e-9 * std::max(1.0, std::abs(*b));
}

void verify_outputs(const fs::path& dir, const ReportBundle& bundle, TearSheetFormat format,
                    const BacktestResult& result, std::span<const std::string> columns) {
    for (const auto& file : bundle.files) {
        if (file.kind == "tear_sheet") {
            const auto back = read_tear_sheets(file.path, format);
            if (back.size() != bundle.tear_sheets.size()) throw IoError("tear sheet count mismatch");
            for (std::size_t i = 0; i < back.size(); ++i) {
                if (back[i].window_label != bundle.tear_sheets[i].window_label) {
                    throw IoError("tear sheet window mismatch in " + file.path.string());
                }
                for (const auto& f : kTearSheetFields) {
                    if (!same_metric(back[i].*f.member, bundle.tear_sheets[i].*f.member)) {
                        throw IoError(fmt::format("{} does not reparse for {}",
                                                  file.path.string(), f.key));
                    }
                }
            }
            continue;
        }
        const auto table = read_csv_table(file.path);
        if (file.kind == "shares" || file.kind == "weights") {
            if (table.rows.size() != result.calendar.size() ||
                table.header.size() != columns.size() + 1) {
                throw IoError(file.path.string() + " has the wrong shape");
            }
            for (std::size_t c = 0; c < columns.size(); ++c) {
                const auto asset = static_cast<std::size_t>(
                    std::find(result.tickers.begin(), result.tickers.end(), columns[c]) -
                    result.tickers.begin());
                for (std::size_t t = 0; t < table.rows.size(); ++t) {
                    const double expected =
                        file.kind == "shares" ? static_cast<double>(result.shares[asset][t])
                                              : result.weights[asset][t];
                    if (!same_number(table.rows[t][c + 1], expected)) {
                        throw IoError(fmt::format("{} row {} does not reparse",
                                                  file.path.string(), t + 2));
                    }
                }
            }
        } else if (file.kind == "cumulative") {
            if (table.rows.size() != result.calendar.size()) {
                throw IoError(file.path.string() + " has the wrong shape");
            }
            for (std::size_t t = 0; t < table.rows.size(); ++t) {
                const double expected = cumulative_return(result.value[0], result.value[t]);
                if (!same_number(table.rows[t][1], expected)) {
                    throw IoError(fmt::format("{} row {} does not reparse", file.path.string(), t + 2));
                }
            }
        } else {
            for (const auto& row : table.rows) {
                double v = 0.0;
                const auto& text = row.at(2);
                const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
                if (ec != std::errc{} || ptr != text.data() + text.size()) {
                    throw IoError(file.path.string() + " holds an unparsable number");
                }
            }
        }
    }
    if (!fs::is_directory(dir)) throw IoError("missing output directory " + dir.string());
}

SectorReport run_sector(const RunConfig& config, const fs::path& manifest_path,
                        std::set<std::string>& used_slugs) {
    const std::string label = manifest_path.stem().string();
    auto data = staged(label, "load", [&] { return load_sector(config, manifest_path); });
    const auto& sector = data.manifest.sector;
    const auto slug = sector_slug(sector);
    if (!used_slugs.insert(slug).second) {
        throw SectorError(sector, "config", "two manifests map to output directory " + slug);
    }
    spdlog::info("{}: {} tickers, {} trading days", sector, data.panel.num_assets(),
                 data.panel.num_days());

    const auto result = staged(sector, "backtest", [&] {
        return run_backtest(data.panel, CapitalPlan{config.per_asset_capital, data.panel.num_assets()},
                            RebalancePolicy{config.frequency, config.cost_rate});
    });
    spdlog::debug("{}: {} rebalances", sector, result.rebalance_dates.size());

    const auto sheets = staged(sector, "metrics", [&] {
        const auto port = simple_returns(result.calendar, result.value);
        const auto bench = simple_returns(data.panel.calendar(), data.panel.benchmark());
        const auto p = split_sample(port, config.split);
        const auto b = split_sample(bench, config.split);
        return std::vector<TearSheet>{
            tear_sheet(p.in_sample, b.in_sample, config.metrics, "in_sample"),
            tear_sheet(p.out_of_sample, b.out_of_sample, config.metrics, "out_of_sample"),
            tear_sheet(port, bench, config.metrics, "overall"),
        };
    });

    const auto final_dir = config.out_dir / slug;
    const auto staging = config.out_dir / (slug + ".partial");
    SectorReport report{sector, final_dir, {sheets, {}}};
    try {
        staged(sector, "report", [&] {
            fs::remove_all(staging);
            fs::create_directories(staging);
            const auto ext = config.tear_sheet_format == TearSheetFormat::csv ? ".csv" : ".json";
            const auto ts_path = staging / (std::string("tear_sheet") + ext);
            export_tear_sheets(sheets, ts_path, config.tear_sheet_format);

            const auto bench = data.panel.benchmark();
            std::vector<double> bench_cum;
            for (const double p : bench) bench_cum.push_back(cumulative_return(bench.front(), p));
            auto files = emit_plot_data(result, bench_cum, config.split, staging,
                                        data.manifest.tickers);
            report.bundle.files.push_back({"tear_sheet", ts_path});
            report.bundle.files.insert(report.bundle.files.end(), files.begin(), files.end());
            return 0;
        });
        staged(sector, "verify", [&] {
            verify_outputs(staging, report.bundle, config.tear_sheet_format, result,
                           data.manifest.tickers);
            return 0;
        });
        staged(sector, "report", [&] {
            fs::remove_all(final_dir);
            fs::rename(staging, final_dir);
            for (auto& f : report.bundle.files) f.path = final_dir / f.path.filename();
            return 0;
        });
    } catch (...) {
        std::error_code ec;
        fs::remove_all(staging, ec);
        throw;
    }
    return report;
}

}  // namespace

SectorData load_sector(const RunConfig& config, const fs::path& manifest_path) {
    auto manifest = load_sector_manifest(manifest_path);
    std::vector<PriceSeries> series;
    std::vector<std::pair<std::string, std::size_t>> coverage;
    for (const auto& t : manifest.tickers) {
        series.push_back(load_ticker(config.data_dir, t));
        coverage.emplace_back(t, observations_in(series.back(), config.start, config.end));
    }
    const auto bench = load_ticker(config.data_dir, manifest.benchmark);
    auto panel = clip_panel(align_panel(series, bench), config.start, config.end);
    return {std::move(manifest), std::move(panel), std::move(coverage)};
}

BacktestOutcome run_backtest_command(const RunConfig& config) {
    config.validate();
    if (config.manifests.empty()) throw ConfigError("no sector manifests given");
    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec) throw IoError(fmt::format("cannot create {}: {}", config.out_dir.string(), ec.message()));

    BacktestOutcome outcome;
    std::set<std::string> slugs;
    for (const auto& m : config.manifests) {
        try {
            outcome.sectors.push_back(run_sector(config, m, slugs));
        } catch (const SectorError& e) {
            spdlog::error("{}", e.what());
            outcome.failures.push_back(e);
        }
    }
    if (outcome.ok() && outcome.sectors.size() > 1) {
        for (std::size_t w = 0; w < outcome.sectors.front().bundle.tear_sheets.size(); ++w) {
            std::vector<SectorSheet> rows;
            for (const auto& s : outcome.sectors) rows.push_back({s.sector, s.bundle.tear_sheets[w]});
            const auto path =
                config.out_dir / ("summary_" + outcome.sectors.front().bundle.tear_sheets[w].window_label + ".csv");
            export_sector_summary(rows, path);
            outcome.summary_files.push_back({"summary", path});
        }
    }
    return outcome;
}

void run_validate_command(const RunConfig& config, std::ostream& out) {
    config.validate();
    if (config.manifests.empty()) throw ConfigError("no sector manifests given");
    for (const auto& m : config.manifests) {
        const auto data = staged(m.stem().string(), "load", [&] { return load_sector(config, m); });
        const auto& cal = data.panel.calendar();
        const auto planned = rebalance_dates(cal, config.frequency);
        fmt::print(out, "sector: {}\n", data.manifest.sector);
        fmt::print(out, "  benchmark: {}\n", data.manifest.benchmark);
        fmt::print(out, "  calendar: {} .. {} ({} trading days)\n", format_date(cal.front()),
                   format_date(cal.back()), cal.size());
        const auto split_at = std::lower_bound(cal.begin(), cal.end(), config.split);
        fmt::print(out, "  in-sample days: {}, out-of-sample days: {}\n", split_at - cal.begin(),
                   cal.end() - split_at);
        for (const auto& [ticker, count] : data.coverage) {
            fmt::print(out, "  coverage {}: {} observations, {} after alignment\n", ticker, count,
                       cal.size());
        }
        fmt::print(out, "  planned {} rebalances: {}\n", to_string(config.frequency), planned.size());
        for (const auto d : planned) fmt::print(out, "    {}\n", format_date(d));
    }
}

}  // namespace rebal
