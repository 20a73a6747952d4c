#include "rebal/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "rebal/errors.hpp"

namespace rebal {

namespace fs = std::filesystem;

PriceSeries::PriceSeries(std::string ticker, std::vector<Date> dates, std::vector<double> prices)
    : ticker_(std::move(ticker)) {
    if (dates.size() != prices.size()) {
        throw ValidationError(fmt::format("{}: {} dates but {} prices", ticker_, dates.size(),
                                          prices.size()));
    }
    std::vector<std::size_t> order(dates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return dates[a] < dates[b]; });
    dates_.reserve(order.size());
    prices_.reserve(order.size());
    for (const auto i : order) {
        if (!std::isfinite(prices[i]) || prices[i] <= 0.0) {
            throw ValidationError(fmt::format("{}: price {} on {} is not a positive finite number",
                                              ticker_, prices[i], format_date(dates[i])));
        }
        if (!dates_.empty() && dates_.back() == dates[i]) {
            throw ValidationError(
                fmt::format("{}: duplicate date {}", ticker_, format_date(dates[i])));
        }
        dates_.push_back(dates[i]);
        prices_.push_back(prices[i]);
    }
    if (dates_.size() < 2) {
        throw ValidationError(
            fmt::format("{}: need at least 2 observations, got {}", ticker_, dates_.size()));
    }
}

PricePanel::PricePanel(std::vector<Date> calendar, std::vector<std::string> tickers,
                       std::vector<std::vector<double>> columns, std::string benchmark_ticker,
                       std::vector<double> benchmark)
    : calendar_(std::move(calendar)),
      tickers_(std::move(tickers)),
      columns_(std::move(columns)),
      benchmark_ticker_(std::move(benchmark_ticker)),
      benchmark_(std::move(benchmark)) {
    if (tickers_.empty() || tickers_.size() != columns_.size()) {
        throw ValidationError("price panel needs one column per ticker and at least one ticker");
    }
    if (!std::is_sorted(tickers_.begin(), tickers_.end()) ||
        std::adjacent_find(tickers_.begin(), tickers_.end()) != tickers_.end()) {
        throw ValidationError("price panel tickers must be unique and sorted");
    }
    if (std::adjacent_find(calendar_.begin(), calendar_.end(), std::greater_equal<>{}) !=
        calendar_.end()) {
        throw ValidationError("price panel calendar must be strictly increasing");
    }
    const auto n = calendar_.size();
    const auto check = [n](const std::vector<double>& col, const std::string& name) {
        if (col.size() != n) {
            throw ValidationError(fmt::format("column {} has {} prices for {} days", name,
                                              col.size(), n));
        }
        for (const double p : col) {
            if (!std::isfinite(p) || p <= 0.0) {
                throw ValidationError(fmt::format("column {} holds a non-positive price", name));
            }
        }
    };
    for (std::size_t i = 0; i < columns_.size(); ++i) check(columns_[i], tickers_[i]);
    check(benchmark_, benchmark_ticker_);
}

std::span<const double> PricePanel::column(const std::string& ticker) const {
    const auto it = std::lower_bound(tickers_.begin(), tickers_.end(), ticker);
    if (it == tickers_.end() || *it != ticker) {
        throw std::out_of_range("ticker not in panel: " + ticker);
    }
    return columns_[static_cast<std::size_t>(it - tickers_.begin())];
}

namespace {

std::string_view trim(std::string_view s) {
    const auto ws = " \t\r";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

PriceSeries load_price_series(const fs::path& path, const std::string& ticker) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(fmt::format("cannot open price file {} for ticker {}", path.string(), ticker));
    }
    std::vector<Date> dates;
    std::vector<double> prices;
    std::vector<std::size_t> lines;
    std::string raw;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (!header_seen) {
            if (fields.size() != 3 || fields[0] != "date" || fields[1] != "ticker" ||
                fields[2] != "adj_close") {
                throw ParseError(fmt::format("{}:{}: expected header 'date,ticker,adj_close'",
                                             path.string(), line_no),
                                 line_no);
            }
            header_seen = true;
            continue;
        }
        if (fields.size() != 3) {
            throw ParseError(fmt::format("{}:{}: expected 3 fields, got {}", path.string(),
                                         line_no, fields.size()),
                             line_no);
        }
        if (fields[1] != ticker) continue;
        Date date;
        try {
            date = parse_date(fields[0]);
        } catch (const ParseError& e) {
            throw ParseError(fmt::format("{}:{}: {}", path.string(), line_no, e.what()), line_no);
        }
        double price = 0.0;
        const auto text = fields[2];
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), price);
        if (ec != std::errc{} || ptr != text.data() + text.size()) {
            throw ParseError(
                fmt::format("{}:{}: invalid adj_close '{}'", path.string(), line_no, text),
                line_no);
        }
        if (!std::isfinite(price) || price <= 0.0) {
            throw ValidationError(fmt::format("{}:{}: adj_close {} for {} is not positive",
                                              path.string(), line_no, text, ticker));
        }
        dates.push_back(date);
        prices.push_back(price);
        lines.push_back(line_no);
    }
    if (!header_seen) {
        throw ParseError(fmt::format("{}: empty file", path.string()), 1);
    }
    // Report duplicates with the line that repeats a date.
    std::vector<std::size_t> order(dates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return dates[a] < dates[b]; });
    for (std::size_t k = 1; k < order.size(); ++k) {
        if (dates[order[k]] == dates[order[k - 1]]) {
            throw ValidationError(fmt::format("{}:{}: duplicate date {} for {}", path.string(),
                                              lines[order[k]], format_date(dates[order[k]]),
                                              ticker));
        }
    }
    if (dates.empty()) {
        throw ValidationError(fmt::format("{}: no rows for ticker {}", path.string(), ticker));
    }
    return PriceSeries(ticker, std::move(dates), std::move(prices));
}

PriceSeries load_ticker(const fs::path& data_dir, const std::string& ticker) {
    const auto own = data_dir / (ticker + ".csv");
    if (fs::is_regular_file(own)) return load_price_series(own, ticker);
    const auto shared = data_dir / "prices.csv";
    if (fs::is_regular_file(shared)) {
        try {
            return load_price_series(shared, ticker);
        } catch (const ValidationError& e) {
            if (std::string_view(e.what()).find("no rows for ticker") == std::string_view::npos) {
                throw;
            }
        }
    }
    throw IoError(fmt::format("no price data for ticker {} in {}", ticker, data_dir.string()));
}

void validate_manifest(const SectorManifest& manifest) {
    if (manifest.tickers.empty()) {
        throw ValidationError(fmt::format("sector {}: ticker list is empty", manifest.sector));
    }
    std::set<std::string> seen;
    for (const auto& t : manifest.tickers) {
        if (t.empty()) throw ValidationError(fmt::format("sector {}: empty ticker", manifest.sector));
        if (!seen.insert(t).second) {
            throw ValidationError(
                fmt::format("sector {}: duplicate ticker {}", manifest.sector, t));
        }
    }
    if (manifest.benchmark.empty()) {
        throw ValidationError(fmt::format("sector {}: benchmark is empty", manifest.sector));
    }
    if (seen.contains(manifest.benchmark)) {
        throw ValidationError(fmt::format("sector {}: benchmark {} is also a constituent",
                                          manifest.sector, manifest.benchmark));
    }
}

SectorManifest load_sector_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path.string());
    SectorManifest manifest;
    try {
        const auto doc = nlohmann::json::parse(in);
        manifest.sector = doc.at("sector").get<std::string>();
        manifest.tickers = doc.at("tickers").get<std::vector<std::string>>();
        manifest.benchmark = doc.at("benchmark").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
    }
    validate_manifest(manifest);
    return manifest;
}

namespace {

std::vector<Date> intersect(const std::vector<Date>& a, const std::vector<Date>& b) {
    std::vector<Date> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<double> restrict_to(const PriceSeries& s, const std::vector<Date>& calendar) {
    std::vector<double> out;
    out.reserve(calendar.size());
    std::size_t j = 0;
    for (const auto d : calendar) {
        while (s.dates()[j] < d) ++j;
        out.push_back(s.prices()[j]);
    }
    return out;
}

}  // namespace

PricePanel align_panel(std::span<const PriceSeries> series, const PriceSeries& benchmark) {
    if (series.empty()) throw AlignmentError("align_panel needs at least one series");

    std::vector<const PriceSeries*> sorted;
    for (const auto& s : series) sorted.push_back(&s);
    std::sort(sorted.begin(), sorted.end(),
              [](const auto* a, const auto* b) { return a->ticker() < b->ticker(); });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i]->ticker() == sorted[i - 1]->ticker()) {
            throw AlignmentError("duplicate ticker in panel: " + sorted[i]->ticker());
        }
    }

    std::vector<const PriceSeries*> all = sorted;
    all.push_back(&benchmark);
    std::vector<Date> calendar = all.front()->dates();
    for (std::size_t i = 1; i < all.size(); ++i) calendar = intersect(calendar, all[i]->dates());

    if (calendar.size() < 2) {
        // Name the series whose removal would leave a usable intersection.
        std::vector<std::string> offending;
        for (std::size_t skip = 0; skip < all.size(); ++skip) {
            std::optional<std::vector<Date>> rest;
            for (std::size_t i = 0; i < all.size(); ++i) {
                if (i == skip) continue;
                rest = rest ? intersect(*rest, all[i]->dates()) : all[i]->dates();
            }
            if (rest && rest->size() >= 2) offending.push_back(all[skip]->ticker());
        }
        if (offending.empty()) {
            for (const auto* s : all) offending.push_back(s->ticker());
        }
        throw AlignmentError(fmt::format("series share {} common dates (need 2); offending: {}",
                                         calendar.size(), fmt::join(offending, ", ")));
    }

    std::vector<std::string> tickers;
    std::vector<std::vector<double>> columns;
    for (const auto* s : sorted) {
        tickers.push_back(s->ticker());
        columns.push_back(restrict_to(*s, calendar));
    }
    auto bench = restrict_to(benchmark, calendar);
    return PricePanel(std::move(calendar), std::move(tickers), std::move(columns),
                      benchmark.ticker(), std::move(bench));
}

PricePanel clip_panel(const PricePanel& panel, Date start, Date end) {
    if (start > end) {
        throw WindowError(fmt::format("window start {} is after end {}", format_date(start),
                                      format_date(end)));
    }
    const auto& cal = panel.calendar();
    const auto first = static_cast<std::size_t>(
        std::lower_bound(cal.begin(), cal.end(), start) - cal.begin());
    const auto last = static_cast<std::size_t>(
        std::upper_bound(cal.begin(), cal.end(), end) - cal.begin());
    if (last < first + 2) {
        throw WindowError(fmt::format("window {}..{} holds {} trading days (need 2)",
                                      format_date(start), format_date(end),
                                      last > first ? last - first : 0));
    }
    const auto cut = [&](std::span<const double> col) {
        return std::vector<double>(col.begin() + static_cast<std::ptrdiff_t>(first),
                                   col.begin() + static_cast<std::ptrdiff_t>(last));
    };
    std::vector<std::vector<double>> columns;
    for (std::size_t i = 0; i < panel.num_assets(); ++i) columns.push_back(cut(panel.column(i)));
    return PricePanel(std::vector<Date>(cal.begin() + static_cast<std::ptrdiff_t>(first),
                                        cal.begin() + static_cast<std::ptrdiff_t>(last)),
                      panel.tickers(), std::move(columns), panel.benchmark_ticker(),
                      cut(panel.benchmark()));
}

}  // namespace rebal
