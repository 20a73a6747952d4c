// Writes a synthetic, reproducible price fixture: one CSV per ticker, one
// manifest per sector, and a run config pointing at both.
//
//   make_fixture --out tests/data/ten_sector
//   make_fixture --out tests/data/smoke --sectors 1 --tickers 2 --end 2021-02-26 --split 2021-02-01

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "rebal/date.hpp"
#include "rebal/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

// std::normal_distribution differs between standard libraries; this does not.
class Gaussian {
public:
    explicit Gaussian(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double operator()() {
        if (cached_) {
            cached_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        cached_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool cached_ = false;
};

const std::vector<std::string> kSectors{"Auto",    "Banking", "Consumer Durables", "FMCG",
                                        "IT",      "Metal",   "Pharma",            "Private Banks",
                                        "PSU Banks", "Realty"};

void write_file(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synthetic price fixture generator"};
    std::string out_dir;
    int sectors = 10;
    int tickers = 3;
    std::uint64_t seed = 20210104;
    std::string start = "2021-01-04";
    std::string split = "2022-07-01";
    std::string end = "2023-09-20";
    double gap_rate = 0.01;
    app.add_option("--out", out_dir, "Fixture directory")->required();
    app.add_option("--sectors", sectors, "Number of sectors (at most 10)")->check(CLI::Range(1, 10));
    app.add_option("--tickers", tickers, "Tickers per sector")->check(CLI::Range(1, 50));
    app.add_option("--seed", seed, "Random seed");
    app.add_option("--start", start);
    app.add_option("--split", split);
    app.add_option("--end", end);
    app.add_option("--gap-rate", gap_rate, "Probability a constituent skips a day");
    CLI11_PARSE(app, argc, argv);

    const auto first = rebal::parse_date(start);
    const auto last = rebal::parse_date(end);
    std::vector<rebal::Date> weekdays;
    for (auto d = first; d <= last; d += std::chrono::days{1}) {
        const auto wd = std::chrono::weekday{d}.iso_encoding();
        if (wd <= 5) weekdays.push_back(d);
    }

    Gaussian rng(seed);
    const double dt = 1.0 / 252.0;
    std::vector<double> market(weekdays.size());
    {
        double level = 14000.0;
        for (std::size_t t = 0; t < weekdays.size(); ++t) {
            if (t > 0) level *= std::exp((0.12 - 0.5 * 0.18 * 0.18) * dt + 0.18 * std::sqrt(dt) * rng());
            market[t] = level;
        }
    }

    const fs::path root = out_dir;
    const auto csv = [&](const std::string& ticker, const std::vector<double>& prices,
                         bool gaps) {
        std::string text = "date,ticker,adj_close\n";
        for (std::size_t t = 0; t < weekdays.size(); ++t) {
            const bool interior = t > 0 && t + 1 < weekdays.size();
            if (gaps && interior && rng.uniform() < gap_rate) continue;
            text += fmt::format("{},{},{:.2f}\n", rebal::format_date(weekdays[t]), ticker, prices[t]);
        }
        write_file(root / "data" / (ticker + ".csv"), text);
    };
    csv("BENCH", market, false);

    nlohmann::ordered_json manifests = nlohmann::ordered_json::array();
    for (int s = 0; s < sectors; ++s) {
        const auto slug = rebal::sector_slug(kSectors[static_cast<std::size_t>(s)]);
        const double sector_drift = -0.05 + 0.35 * rng.uniform();
        const double beta = 0.5 + rng.uniform();
        nlohmann::ordered_json names = nlohmann::ordered_json::array();
        for (int k = 0; k < tickers; ++k) {
            std::string ticker = slug;
            for (auto& c : ticker) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            ticker = fmt::format("{}{:02d}", ticker, k + 1);
            std::erase(ticker, '_');
            const double idio = 0.15 + 0.25 * rng.uniform();
            double price = 50.0 + 4000.0 * rng.uniform() * rng.uniform();
            std::vector<double> prices(weekdays.size());
            for (std::size_t t = 0; t < weekdays.size(); ++t) {
                if (t > 0) {
                    const double mkt = std::log(market[t] / market[t - 1]);
                    price *= std::exp(beta * mkt + sector_drift * dt +
                                      idio * std::sqrt(dt) * rng());
                }
                prices[t] = price;
            }
            csv(ticker, prices, true);
            names.push_back(ticker);
        }
        nlohmann::ordered_json manifest{{"sector", kSectors[static_cast<std::size_t>(s)]},
                                        {"tickers", names},
                                        {"benchmark", "BENCH"}};
        write_file(root / "manifests" / (slug + ".json"), manifest.dump(2) + "\n");
        manifests.push_back("manifests/" + slug + ".json");
    }

    nlohmann::ordered_json config{{"data_dir", "data"},   {"manifests", manifests},
                                  {"start", start},       {"split", split},
                                  {"end", end},           {"frequency", "yearly"},
                                  {"per_asset_capital", 100000.0}, {"out_dir", "out"}};
    write_file(root / "run.json", config.dump(2) + "\n");
    std::cout << "wrote " << sectors * tickers + 1 << " price files to " << (root / "data").string()
              << "\n";
    return 0;
}
