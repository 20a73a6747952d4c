// rebal: calendar-rebalanced equal-weight backtests from the command line.
//
//   rebal backtest --config run.json [--frequency monthly] [manifest.json ...]
//   rebal validate --config run.json

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "rebal/pipeline.hpp"

namespace {

struct Overrides {
    std::string config;
    std::string data_dir;
    std::string out_dir;
    std::string frequency;
    std::string start;
    std::string split;
    std::string end;
    std::string format;
    double capital = 0.0;
    double cost_rate = 0.0;
    double risk_free = 0.0;
    double omega_threshold = 0.0;
    double var_cutoff = 0.0;
    int periods_per_year = 0;
    std::vector<std::string> manifests;
};

void add_run_flags(CLI::App& cmd, Overrides& o) {
    cmd.add_option("--config", o.config, "JSON run configuration");
    cmd.add_option("--data-dir", o.data_dir, "Directory of price CSV files");
    cmd.add_option("--out-dir", o.out_dir, "Output directory");
    cmd.add_option("--frequency", o.frequency, "Rebalance frequency")
        ->check(CLI::IsMember({"daily", "monthly", "yearly", "never"}));
    cmd.add_option("--start", o.start, "First day of the window (YYYY-MM-DD)");
    cmd.add_option("--split", o.split, "First out-of-sample day (YYYY-MM-DD)");
    cmd.add_option("--end", o.end, "Last day of the window (YYYY-MM-DD)");
    cmd.add_option("--capital", o.capital, "Capital allocated per stock");
    cmd.add_option("--cost-rate", o.cost_rate, "Transaction cost as a fraction of traded notional");
    cmd.add_option("--risk-free", o.risk_free, "Annual risk-free rate");
    cmd.add_option("--periods-per-year", o.periods_per_year, "Annualization factor");
    cmd.add_option("--omega-threshold", o.omega_threshold, "Daily Omega ratio threshold");
    cmd.add_option("--var-cutoff", o.var_cutoff, "Value-at-risk tail probability");
    cmd.add_option("--tear-sheet-format", o.format, "Tear sheet file format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd.add_option("manifests", o.manifests, "Sector manifest files (replace the config's list)");
}

rebal::RunConfig build_config(const CLI::App& cmd, const Overrides& o) {
    rebal::RunConfig cfg = o.config.empty() ? rebal::RunConfig{} : rebal::load_run_config(o.config);
    const auto given = [&](const char* flag) { return cmd.count(flag) > 0; };
    if (given("--data-dir")) cfg.data_dir = o.data_dir;
    if (given("--out-dir")) cfg.out_dir = o.out_dir;
    if (given("--frequency")) cfg.frequency = rebal::parse_frequency(o.frequency);
    if (given("--start")) cfg.start = rebal::parse_date(o.start);
    if (given("--split")) cfg.split = rebal::parse_date(o.split);
    if (given("--end")) cfg.end = rebal::parse_date(o.end);
    if (given("--capital")) cfg.per_asset_capital = o.capital;
    if (given("--cost-rate")) cfg.cost_rate = o.cost_rate;
    if (given("--risk-free")) cfg.metrics.risk_free_rate_annual = o.risk_free;
    if (given("--periods-per-year")) cfg.metrics.periods_per_year = o.periods_per_year;
    if (given("--omega-threshold")) cfg.metrics.omega_threshold_daily = o.omega_threshold;
    if (given("--var-cutoff")) cfg.metrics.var_cutoff = o.var_cutoff;
    if (given("--tear-sheet-format")) cfg.tear_sheet_format = rebal::parse_tear_sheet_format(o.format);
    if (!o.manifests.empty()) cfg.manifests.assign(o.manifests.begin(), o.manifests.end());
    cfg.validate();
    return cfg;
}

void configure_logging() {
    auto logger = spdlog::stderr_color_mt("rebal");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    const char* level = std::getenv("REBAL_LOG");
    const std::string name = level ? level : "info";
    if (name == "error") spdlog::set_level(spdlog::level::err);
    else if (name == "debug") spdlog::set_level(spdlog::level::debug);
    else spdlog::set_level(spdlog::level::info);
}

}  // namespace

int main(int argc, char** argv) {
    configure_logging();
    CLI::App app{"Equal-weight calendar rebalancing backtester"};
    app.require_subcommand(1);

    Overrides bt;
    auto* backtest = app.add_subcommand("backtest", "Run backtests and write reports");
    add_run_flags(*backtest, bt);
    Overrides va;
    auto* validate = app.add_subcommand("validate", "Check data and print the planned schedule");
    add_run_flags(*validate, va);

    CLI11_PARSE(app, argc, argv);

    try {
        if (backtest->parsed()) {
            const auto cfg = build_config(*backtest, bt);
            const auto outcome = rebal::run_backtest_command(cfg);
            for (const auto& s : outcome.sectors) {
                std::cout << s.sector << ": wrote " << s.bundle.files.size() << " files to "
                          << s.directory.string() << "\n";
            }
            for (const auto& f : outcome.failures) std::cerr << "error: " << f.what() << "\n";
            return outcome.ok() ? 0 : 1;
        }
        const auto cfg = build_config(*validate, va);
        rebal::run_validate_command(cfg, std::cout);
        return 0;
    } catch (const rebal::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
