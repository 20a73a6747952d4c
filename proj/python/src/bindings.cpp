#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rebal/errors.hpp"
#include "rebal/metrics.hpp"
#include "rebal/pipeline.hpp"
#include "rebal/portfolio.hpp"
#include "rebal/returns.hpp"

namespace py = pybind11;
using namespace rebal;

namespace {

using Values = std::vector<double>;

MetricConfig metric_config(int periods_per_year, double risk_free, double omega_threshold,
                           double var_cutoff) {
    MetricConfig cfg;
    cfg.periods_per_year = periods_per_year;
    cfg.risk_free_rate_annual = risk_free;
    cfg.omega_threshold_daily = omega_threshold;
    cfg.var_cutoff = var_cutoff;
    cfg.validate();
    return cfg;
}

std::vector<Date> parse_dates(const std::vector<std::string>& text) {
    std::vector<Date> out;
    out.reserve(text.size());
    for (const auto& t : text) out.push_back(parse_date(t));
    return out;
}

std::vector<std::string> format_dates(const std::vector<Date>& dates) {
    std::vector<std::string> out;
    out.reserve(dates.size());
    for (const auto d : dates) out.push_back(format_date(d));
    return out;
}

ReturnSeries series(const Values& values, const std::optional<std::vector<std::string>>& dates) {
    if (!dates) return ReturnSeries::from_values(values);
    ReturnSeries s;
    s.dates = parse_dates(*dates);
    s.values = values;
    s.validate();
    return s;
}

py::dict sheet_dict(const TearSheet& ts) {
    py::dict d;
    d["window"] = ts.window_label;
    for (const auto& f : kTearSheetFields) {
        const auto& v = ts.*f.member;
        d[py::str(std::string(f.key))] = v ? py::cast(*v) : py::none();
    }
    return d;
}

py::dict result_dict(const BacktestResult& r) {
    py::dict d;
    d["dates"] = format_dates(r.calendar);
    d["tickers"] = r.tickers;
    d["value"] = r.value;
    d["cash"] = r.cash;
    d["initial_capital"] = r.initial_capital;
    py::dict shares, weights;
    for (std::size_t a = 0; a < r.tickers.size(); ++a) {
        shares[py::str(r.tickers[a])] = r.shares[a];
        weights[py::str(r.tickers[a])] = r.weights[a];
    }
    d["shares"] = shares;
    d["weights"] = weights;
    d["rebalance_dates"] = format_dates(r.rebalance_dates);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Equal-weight calendar rebalancing backtests and tear-sheet metrics";

    static py::exception<Error> error(m, "Error");
    // Subclasses registered after the base so their translators run first.
    py::register_exception<DomainError>(m, "DomainError", error.ptr());
    py::register_exception<UndefinedMetric>(m, "UndefinedMetric", error.ptr());
    py::register_exception<AlignmentError>(m, "AlignmentError", error.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", error.ptr());

#define REBAL_CFG_ARGS                                                                  \
    py::arg("periods_per_year") = 252, py::arg("risk_free") = 0.0,                      \
        py::arg("omega_threshold") = 0.0, py::arg("var_cutoff") = 0.05

    m.def("cagr", &cagr, py::arg("initial"), py::arg("final"), py::arg("years"));
    m.def("cumulative_return", &cumulative_return, py::arg("initial"), py::arg("final"));
    m.def("percentile", [](const Values& v, double q) { return percentile(v, q); }, py::arg("values"),
          py::arg("q"));
    m.def("total_return", [](const Values& r) { return total_return(r); }, py::arg("returns"));
    m.def("max_drawdown", [](const Values& w) { return max_drawdown(w); }, py::arg("wealth"));
    m.def("max_drawdown_from_returns", [](const Values& r) { return max_drawdown_from_returns(r); },
          py::arg("returns"));
    m.def("tail_ratio", [](const Values& r) { return tail_ratio(r); }, py::arg("returns"));
    m.def("skewness", [](const Values& r) { return skewness(r); }, py::arg("returns"));
    m.def("kurtosis", [](const Values& r) { return kurtosis(r); }, py::arg("returns"));
    m.def("stability", [](const Values& r) { return stability(r); }, py::arg("returns"));

    const auto with_cfg = [&m](const char* name, double (*f)(std::span<const double>, const MetricConfig&)) {
        m.def(
            name,
            [f](const Values& r, int ppy, double rf, double omega_l, double cutoff) {
                return f(r, metric_config(ppy, rf, omega_l, cutoff));
            },
            py::arg("returns"), py::kw_only(), REBAL_CFG_ARGS);
    };
    with_cfg("annual_return", &annual_return);
    with_cfg("annual_volatility", &annual_volatility);
    with_cfg("sharpe", &sharpe);
    with_cfg("sortino", &sortino);
    with_cfg("calmar", &calmar);
    with_cfg("omega", &omega);
    with_cfg("daily_var", &daily_var);

    m.def(
        "alpha_beta",
        [](const Values& p, const Values& b, int ppy, double rf, double omega_l, double cutoff) {
            const auto ab = alpha_beta(std::span<const double>(p), std::span<const double>(b),
                                       metric_config(ppy, rf, omega_l, cutoff));
            return py::make_tuple(ab.alpha_annual, ab.beta);
        },
        py::arg("portfolio"), py::arg("benchmark"), py::kw_only(), REBAL_CFG_ARGS,
        "Returns (alpha_annual, beta).");

    m.def(
        "tear_sheet",
        [](const Values& p, const Values& b, const std::optional<std::vector<std::string>>& dates,
           const std::string& label, int ppy, double rf, double omega_l, double cutoff) {
            return sheet_dict(tear_sheet(series(p, dates), series(b, dates),
                                         metric_config(ppy, rf, omega_l, cutoff), label));
        },
        py::arg("portfolio"), py::arg("benchmark"), py::arg("dates") = py::none(),
        py::arg("label") = "overall", py::kw_only(), REBAL_CFG_ARGS,
        "Fifteen metrics keyed by name; None marks a metric that is not computable.");

    m.def(
        "box_plot_summary",
        [](const Values& r) {
            const auto b = box_plot_summary(r);
            return py::make_tuple(b.min, b.q1, b.median, b.q3, b.max);
        },
        py::arg("returns"));

    m.def(
        "aggregate",
        [](const Values& r, const std::vector<std::string>& dates, const std::string& frequency) {
            ReturnFrequency f;
            if (frequency == "weekly") f = ReturnFrequency::weekly;
            else if (frequency == "monthly") f = ReturnFrequency::monthly;
            else if (frequency == "annual") f = ReturnFrequency::annual;
            else throw ConfigError("unknown aggregation frequency '" + frequency + "'");
            const auto out = aggregate(series(r, dates), f);
            return py::make_tuple(format_dates(out.dates), out.values);
        },
        py::arg("returns"), py::arg("dates"), py::arg("frequency"),
        "Compounds daily returns into (dates, values) buckets.");

    m.def(
        "rebalance_dates",
        [](const std::vector<std::string>& calendar, const std::string& frequency) {
            return format_dates(rebalance_dates(parse_dates(calendar), parse_frequency(frequency)));
        },
        py::arg("calendar"), py::arg("frequency"));

    m.def(
        "initial_allocation",
        [](const PriceMap& prices, double per_asset_capital) {
            const auto l = initial_allocation(prices, CapitalPlan{per_asset_capital, prices.size()});
            return py::make_tuple(l.shares, l.cash);
        },
        py::arg("prices"), py::arg("per_asset_capital") = 100000.0, "Returns (shares, cash).");

    m.def(
        "run_backtest",
        [](const std::vector<std::string>& dates, const std::map<std::string, Values>& prices,
           const Values& benchmark, const std::string& frequency, double per_asset_capital,
           double cost_rate) {
            const auto cal = parse_dates(dates);
            std::vector<PriceSeries> cols;
            for (const auto& [ticker, p] : prices) cols.emplace_back(ticker, cal, p);
            const auto panel = align_panel(cols, PriceSeries("benchmark", cal, benchmark));
            return result_dict(run_backtest(panel, CapitalPlan{per_asset_capital, panel.num_assets()},
                                            RebalancePolicy{parse_frequency(frequency), cost_rate}));
        },
        py::arg("dates"), py::arg("prices"), py::arg("benchmark"), py::arg("frequency") = "yearly",
        py::arg("per_asset_capital") = 100000.0, py::arg("cost_rate") = 0.0);

    m.def(
        "backtest",
        [](const std::filesystem::path& config, std::optional<std::filesystem::path> out_dir,
           std::optional<std::string> frequency) {
            auto cfg = load_run_config(config);
            if (out_dir) cfg.out_dir = *out_dir;
            if (frequency) cfg.frequency = parse_frequency(*frequency);
            cfg.validate();
            BacktestOutcome outcome;
            {
                py::gil_scoped_release release;
                outcome = run_backtest_command(cfg);
            }
            py::list sectors;
            for (const auto& s : outcome.sectors) {
                py::dict d;
                d["sector"] = s.sector;
                d["directory"] = s.directory;
                py::list sheets;
                for (const auto& ts : s.bundle.tear_sheets) sheets.append(sheet_dict(ts));
                d["tear_sheets"] = sheets;
                sectors.append(d);
            }
            py::list failures;
            for (const auto& f : outcome.failures) {
                failures.append(py::make_tuple(f.sector(), f.stage(), std::string(f.what())));
            }
            py::dict d;
            d["sectors"] = sectors;
            d["failures"] = failures;
            return d;
        },
        py::arg("config"), py::arg("out_dir") = py::none(), py::arg("frequency") = py::none(),
        "Runs a JSON run configuration end to end and writes the per-sector reports.");
#undef REBAL_CFG_ARGS
}
