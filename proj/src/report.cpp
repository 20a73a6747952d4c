#include "rebal/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "rebal/errors.hpp"
#include "rebal/returns.hpp"

namespace rebal {

namespace fs = std::filesystem;

TearSheetFormat parse_tear_sheet_format(std::string_view text) {
    if (text == "csv") return TearSheetFormat::csv;
    if (text == "json") return TearSheetFormat::json;
    throw ConfigError(fmt::format("unknown tear sheet format '{}'", text));
}

std::string format_number(double value) {
    if (!std::isfinite(value)) throw DomainError("cannot serialize a non-finite number");
    if (value == 0.0) return "0";  // drops the sign of -0.0
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw DomainError("number formatting failed");
    return std::string(buf, ptr);
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << text;
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string cell(const MetricValue& v) { return v ? format_number(*v) : std::string{}; }

void check_labels(std::span<const TearSheet> sheets) {
    std::set<std::string> seen;
    for (const auto& s : sheets) {
        if (!seen.insert(s.window_label).second) {
            throw ValidationError("duplicate tear sheet window label: " + s.window_label);
        }
        if (s.window_label.find_first_of(",\"\r\n") != std::string::npos) {
            throw ValidationError("window label may not contain commas, quotes or newlines: " +
                                  s.window_label);
        }
    }
}

const MetricField* field_by_name(std::string_view name) {
    for (const auto& f : kTearSheetFields) {
        if (f.key == name || f.label == name) return &f;
    }
    return nullptr;
}

double parse_number(std::string_view text, std::size_t line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ParseError(fmt::format("line {}: invalid number '{}'", line, text), line);
    }
    return v;
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

void export_tear_sheets(std::span<const TearSheet> sheets, const fs::path& path,
                        TearSheetFormat format) {
    check_labels(sheets);
    std::string text;
    if (format == TearSheetFormat::csv) {
        text = "metric";
        for (const auto& s : sheets) text += "," + s.window_label;
        text += '\n';
        for (const auto& f : kTearSheetFields) {
            text += f.label;
            for (const auto& s : sheets) text += "," + cell(s.*f.member);
            text += '\n';
        }
    } else {
        auto doc = nlohmann::ordered_json::array();
        for (const auto& s : sheets) {
            nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
            for (const auto& f : kTearSheetFields) {
                const auto& v = s.*f.member;
                if (v) {
                    if (!std::isfinite(*v)) throw DomainError("non-finite metric " + std::string(f.key));
                    metrics[std::string(f.key)] = *v;
                } else {
                    metrics[std::string(f.key)] = nullptr;
                }
            }
            doc.push_back({{"window", s.window_label}, {"metrics", std::move(metrics)}});
        }
        text = doc.dump(2) + "\n";
    }
    write_text(path, text);
}

std::vector<TearSheet> read_tear_sheets(const fs::path& path, TearSheetFormat format) {
    const auto text = read_text(path);
    std::vector<TearSheet> sheets;
    if (format == TearSheetFormat::json) {
        try {
            const auto doc = nlohmann::json::parse(text);
            for (const auto& entry : doc) {
                TearSheet s;
                s.window_label = entry.at("window").get<std::string>();
                const auto& metrics = entry.at("metrics");
                for (const auto& f : kTearSheetFields) {
                    const auto& v = metrics.at(std::string(f.key));
                    if (!v.is_null()) s.*f.member = v.get<double>();
                }
                sheets.push_back(std::move(s));
            }
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
        }
        return sheets;
    }

    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::set<const MetricField*> filled;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_row(line);
        if (line_no == 1) {
            if (cells.empty() || cells[0] != "metric") {
                throw ParseError(path.string() + ": tear sheet header must start with 'metric'", 1);
            }
            for (std::size_t i = 1; i < cells.size(); ++i) {
                TearSheet s;
                s.window_label = cells[i];
                sheets.push_back(std::move(s));
            }
            continue;
        }
        if (cells.size() != sheets.size() + 1) {
            throw ParseError(fmt::format("{}:{}: expected {} cells", path.string(), line_no,
                                         sheets.size() + 1),
                             line_no);
        }
        const auto* f = field_by_name(cells[0]);
        if (f == nullptr || !filled.insert(f).second) {
            throw ParseError(fmt::format("{}:{}: unknown or repeated metric '{}'", path.string(),
                                         line_no, cells[0]),
                             line_no);
        }
        for (std::size_t i = 0; i < sheets.size(); ++i) {
            if (!cells[i + 1].empty()) sheets[i].*f->member = parse_number(cells[i + 1], line_no);
        }
    }
    if (filled.size() != kTearSheetFields.size()) {
        throw ParseError(fmt::format("{}: expected {} metric rows, found {}", path.string(),
                                     kTearSheetFields.size(), filled.size()));
    }
    return sheets;
}

void export_sector_summary(std::span<const SectorSheet> sheets, const fs::path& path) {
    std::string text = "metric";
    for (const auto& s : sheets) text += "," + s.sector;
    text += '\n';
    for (const auto& f : kTearSheetFields) {
        text += f.label;
        for (const auto& s : sheets) text += "," + cell(s.sheet.*f.member);
        text += '\n';
    }
    write_text(path, text);
}

CsvTable read_csv_table(const fs::path& path) {
    std::istringstream in(read_text(path));
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_row(line);
        if (first) {
            table.header = std::move(cells);
            first = false;
        } else {
            if (cells.size() != table.header.size()) {
                throw ParseError(path.string() + ": ragged row", table.rows.size() + 2);
            }
            table.rows.push_back(std::move(cells));
        }
    }
    if (first) throw ParseError(path.string() + ": empty table", 1);
    return table;
}

std::vector<OutputFile> emit_plot_data(const BacktestResult& result,
                                       std::span<const double> benchmark_cum, Date split_date,
                                       const fs::path& out_dir,
                                       std::span<const std::string> column_order) {
    const std::size_t days = result.calendar.size();
    if (benchmark_cum.size() != days) {
        throw ValidationError(fmt::format("benchmark cumulative series has {} points for {} days",
                                          benchmark_cum.size(), days));
    }
    if (days < 2) throw DomainError("plot data needs at least 2 days");

    std::vector<std::size_t> columns;
    if (column_order.empty()) {
        for (std::size_t i = 0; i < result.tickers.size(); ++i) columns.push_back(i);
    } else {
        if (column_order.size() != result.tickers.size()) {
            throw ValidationError("column order must list every ticker exactly once");
        }
        std::set<std::string> seen;
        for (const auto& t : column_order) {
            const auto it = std::find(result.tickers.begin(), result.tickers.end(), t);
            if (it == result.tickers.end() || !seen.insert(t).second) {
                throw ValidationError("column order must list every ticker exactly once: " + t);
            }
            columns.push_back(static_cast<std::size_t>(it - result.tickers.begin()));
        }
    }

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError(fmt::format("cannot create {}: {}", out_dir.string(), ec.message()));

    std::vector<OutputFile> files;
    const auto ticker_header = [&] {
        std::string h = "date";
        for (const auto c : columns) h += "," + result.tickers[c];
        return h + "\n";
    };

    std::string shares = ticker_header();
    std::string weights = ticker_header();
    for (std::size_t t = 0; t < days; ++t) {
        const auto date = format_date(result.calendar[t]);
        shares += date;
        weights += date;
        for (const auto c : columns) {
            shares += "," + std::to_string(result.shares[c][t]);
            weights += "," + format_number(result.weights[c][t]);
        }
        shares += '\n';
        weights += '\n';
    }
    write_text(out_dir / "shares.csv", shares);
    files.push_back({"shares", out_dir / "shares.csv"});
    write_text(out_dir / "weights.csv", weights);
    files.push_back({"weights", out_dir / "weights.csv"});

    std::string cumulative = "date,portfolio_cum,benchmark_cum,segment\n";
    for (std::size_t t = 0; t < days; ++t) {
        cumulative += fmt::format("{},{},{},{}\n", format_date(result.calendar[t]),
                                  format_number(cumulative_return(result.value[0], result.value[t])),
                                  format_number(benchmark_cum[t]),
                                  result.calendar[t] < split_date ? "in_sample" : "out_of_sample");
    }
    write_text(out_dir / "cumulative.csv", cumulative);
    files.push_back({"cumulative", out_dir / "cumulative.csv"});

    const auto daily = simple_returns(result.calendar, result.value);
    std::string dist = "frequency,stat,value\n";
    for (const auto freq : {ReturnFrequency::daily, ReturnFrequency::weekly,
                            ReturnFrequency::monthly, ReturnFrequency::annual}) {
        const auto series = freq == ReturnFrequency::daily ? daily : aggregate(daily, freq);
        const std::span<const double> v = series.values;
        const auto box = box_plot_summary(v);
        const double avg = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        const auto name = to_string(freq);
        dist += fmt::format("{},count,{}\n", name, v.size());
        dist += fmt::format("{},mean,{}\n", name, format_number(avg));
        dist += fmt::format("{},min,{}\n", name, format_number(box.min));
        dist += fmt::format("{},q1,{}\n", name, format_number(box.q1));
        dist += fmt::format("{},median,{}\n", name, format_number(box.median));
        dist += fmt::format("{},q3,{}\n", name, format_number(box.q3));
        dist += fmt::format("{},max,{}\n", name, format_number(box.max));
    }
    write_text(out_dir / "distribution.csv", dist);
    files.push_back({"distribution", out_dir / "distribution.csv"});
    return files;
}

}  // namespace rebal
