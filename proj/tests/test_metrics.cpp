#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rebal/errors.hpp"
#include "rebal/metrics.hpp"
#include "test_support.hpp"

using namespace rebal;
using rebal::testing::dated;
using rebal::testing::random_returns;
using rebal::testing::rel_close;

namespace {

const MetricConfig kDefault{};

std::vector<double> scaled(const std::vector<double>& xs, double k) {
    std::vector<double> out(xs);
    for (auto& x : out) x *= k;
    return out;
}

}  // namespace

TEST(Cagr, PointValues) {
    EXPECT_EQ(cagr(500.0, 500.0, 7.0), 0.0);
    EXPECT_NEAR(cagr(100.0, 121.0, 2.0), 0.10, 1e-15);
    // 4.8^(1/10) - 1 at 30 digits.
    EXPECT_NEAR(cagr(10000.0, 48000.0, 10.0), 0.169833688110093399846, 1e-12);
    EXPECT_THROW(cagr(0.0, 1.0, 1.0), DomainError);
    EXPECT_THROW(cagr(1.0, -1.0, 1.0), DomainError);
    EXPECT_THROW(cagr(1.0, 1.0, 0.0), DomainError);
}

TEST(AnnualReturn, PointValues) {
    const std::vector<double> r(252, std::pow(1.2, 1.0 / 252) - 1.0);
    EXPECT_NEAR(annual_return(r, kDefault), 0.20, 1e-12);
    EXPECT_EQ(annual_return(std::vector<double>(30, 0.0), kDefault), 0.0);
    std::mt19937_64 rng(1);
    const auto x = random_returns(rng, 252);
    EXPECT_NEAR(annual_return(x, kDefault), total_return(x), 1e-12);
    EXPECT_THROW(annual_return(std::vector<double>{}, kDefault), DomainError);
}

TEST(AnnualVolatility, PointValues) {
    EXPECT_EQ(annual_volatility(std::vector<double>(10, 0.003), kDefault), 0.0);
    std::vector<double> alt;
    for (int i = 0; i < 10; ++i) alt.push_back(i % 2 == 0 ? 0.01 : -0.01);
    EXPECT_NEAR(annual_volatility(alt, kDefault), 0.167332005306815109596, 1e-15);
    EXPECT_NEAR(annual_volatility(scaled(alt, 2.0), kDefault), 2 * annual_volatility(alt, kDefault),
                1e-15);
    EXPECT_THROW(annual_volatility(std::vector<double>{0.1}, kDefault), DomainError);
}

TEST(MaxDrawdown, PointValues) {
    EXPECT_EQ(max_drawdown(std::vector<double>{1, 2, 2, 3}), 0.0);
    EXPECT_EQ(max_drawdown(std::vector<double>{100, 120, 60, 90, 130}), -0.5);
    EXPECT_EQ(max_drawdown(std::vector<double>{100, 50, 0}), -1.0);
    EXPECT_EQ(max_drawdown_from_returns(std::vector<double>{0.1, -1.0}), -1.0);
    EXPECT_THROW(max_drawdown(std::vector<double>{}), DomainError);
}

TEST(MaxDrawdown, PropertyMatchesBruteForce) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        const auto r = random_returns(rng, 1 + rng() % 400, 0.0, 0.03);
        const auto w = oracle::wealth_curve(r);
        const double got = max_drawdown(w);
        ASSERT_LE(got, 0.0);
        ASSERT_NEAR(got, static_cast<double>(oracle::max_drawdown_wealth(w)), 1e-12);
    }
}

TEST(Sharpe, PointValues) {
    EXPECT_THROW(sharpe(std::vector<double>(5, 0.01), kDefault), UndefinedMetric);
    // Frozen from a 30-digit evaluation of the definition.
    EXPECT_NEAR(sharpe(std::vector<double>{0.01, -0.005, 0.02, 0.0}, kDefault), 8.94900808820239386461,
                8.949 * 1e-9);
}

TEST(Sharpe, RiskFreeTranslation) {
    std::mt19937_64 rng(3);
    const auto r = random_returns(rng, 500);
    MetricConfig cfg;
    cfg.risk_free_rate_annual = 0.065;
    auto shifted = r;
    for (auto& x : shifted) x += cfg.risk_free_per_period();
    EXPECT_TRUE(rel_close(sharpe(shifted, cfg), sharpe(r, kDefault), 1e-9));
}

TEST(Sortino, PointValues) {
    EXPECT_EQ(sortino(std::vector<double>{0.01, -0.01}, kDefault), 0.0);
    EXPECT_THROW(sortino(std::vector<double>{0.0, 0.01, 0.02}, kDefault), UndefinedMetric);
    EXPECT_LT(sortino(std::vector<double>{-0.01, -0.02, -0.005}, kDefault), 0.0);
}

TEST(Calmar, PointValues) {
    // One 10% loss, then a monotone climb to 1.2x over a 252-day window.
    std::vector<double> r{-0.1};
    const double g = std::pow(1.2 / 0.9, 1.0 / 251) - 1.0;
    r.insert(r.end(), 251, g);
    EXPECT_NEAR(max_drawdown_from_returns(r), -0.1, 1e-15);
    EXPECT_NEAR(calmar(r, kDefault), 2.0, 1e-12);
    EXPECT_NEAR(calmar(std::vector<double>{-0.5, 1.0}, kDefault), 0.0, 1e-15);
    EXPECT_THROW(calmar(std::vector<double>{0.01, 0.02}, kDefault), UndefinedMetric);
}

TEST(Omega, PointValues) {
    EXPECT_NEAR(omega(std::vector<double>{0.02, -0.01}, kDefault), 2.0, 1e-15);
    EXPECT_EQ(omega(std::vector<double>{0.03, -0.03, 0.01, -0.01}, kDefault), 1.0);
    EXPECT_THROW(omega(std::vector<double>{0.01, 0.02}, kDefault), UndefinedMetric);
}

TEST(TailRatio, PointValues) {
    EXPECT_NEAR(tail_ratio(std::vector<double>{-0.02, -0.01, 0.0, 0.01, 0.02}), 1.0, 1e-15);
    const std::vector<double> skewed{-0.01, 0.0, 0.01, 0.02, 0.05, -0.03};
    EXPECT_NEAR(tail_ratio(scaled(skewed, -1.0)), 1.0 / tail_ratio(skewed), 1e-15);
    EXPECT_THROW(tail_ratio(std::vector<double>(20, 0.0)), UndefinedMetric);
}

TEST(Skewness, PointValues) {
    EXPECT_NEAR(skewness(std::vector<double>{-2, -1, 0, 1, 2}), 0.0, 1e-15);
    EXPECT_NEAR(skewness(std::vector<double>{0, 0, 0, 1}), 2.0, 1e-14);
    EXPECT_THROW(skewness(std::vector<double>{1, 2}), UndefinedMetric);
    EXPECT_THROW(skewness(std::vector<double>(9, 0.5)), UndefinedMetric);

    std::mt19937_64 rng(4);
    const auto r = random_returns(rng, 777);
    EXPECT_TRUE(rel_close(skewness(r), *oracle::skewness(r), 1e-12));
}

TEST(Kurtosis, PointValues) {
    const std::vector<double> two_point{-1, 1, -1, 1, -1, 1, -1, 1};
    EXPECT_NEAR(kurtosis(two_point), -2.8, 1e-14);
    EXPECT_NEAR(kurtosis(two_point), static_cast<double>(*oracle::excess_kurtosis(two_point)), 1e-14);
    std::vector<double> spike(99, 0.0);
    spike.push_back(10.0);
    EXPECT_GT(kurtosis(spike), 50.0);
    EXPECT_EQ(kurtosis_pearson(spike), kurtosis(spike) + 3.0);
    EXPECT_THROW(kurtosis(std::vector<double>{1, 2, 3}), UndefinedMetric);
}

TEST(Stability, PointValues) {
    EXPECT_NEAR(stability(std::vector<double>(50, 0.001)), 1.0, 1e-12);
    // Cumulative log returns 0.01, -0.01, -0.01, 0.01: zero slope against time.
    const std::vector<double> zigzag{std::expm1(0.01), std::expm1(-0.02), 0.0, std::expm1(0.02)};
    EXPECT_NEAR(stability(zigzag), 0.0, 1e-12);
    EXPECT_THROW(stability(std::vector<double>{0.1, 0.1}), UndefinedMetric);
    EXPECT_THROW(stability(std::vector<double>(10, 0.0)), UndefinedMetric);

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto r = random_returns(rng, 3 + rng() % 500);
        const double s = stability(r);
        ASSERT_GE(s, 0.0);
        ASSERT_LE(s, 1.0);
        ASSERT_NEAR(s, static_cast<double>(*oracle::stability(r)), 1e-12);
    }
}

TEST(DailyVar, PercentileConvention) {
    // Five -0.02 values at ranks 0..4; rank 4.95 interpolates toward the 0 at rank 5.
    std::vector<double> five(95, 0.0);
    five.insert(five.end(), 5, -0.02);
    EXPECT_NEAR(daily_var(five, kDefault), -0.001, 1e-15);
    std::vector<double> six(94, 0.0);
    six.insert(six.end(), 6, -0.02);
    EXPECT_EQ(daily_var(six, kDefault), -0.02);
    EXPECT_EQ(daily_var(std::vector<double>(10, 0.0), kDefault), 0.0);
    EXPECT_THROW(daily_var(std::vector<double>{}, kDefault), DomainError);
}

TEST(DailyVar, TranslationEquivariance) {
    std::mt19937_64 rng(6);
    const auto r = random_returns(rng, 300);
    auto up = r;
    for (auto& x : up) x += 0.003;
    EXPECT_NEAR(daily_var(up, kDefault), daily_var(r, kDefault) + 0.003, 1e-15);
}

TEST(AlphaBeta, PointValues) {
    std::mt19937_64 rng(7);
    const auto b = random_returns(rng, 250);
    const auto same = alpha_beta(std::span<const double>(b), std::span<const double>(b), kDefault);
    EXPECT_NEAR(same.beta, 1.0, 1e-12);
    EXPECT_NEAR(same.alpha_annual, 0.0, 1e-12);

    const auto half = alpha_beta(std::span<const double>(scaled(b, 0.5)), b, kDefault);
    EXPECT_NEAR(half.beta, 0.5, 1e-12);
    EXPECT_NEAR(half.alpha_annual, 0.0, 1e-12);

    auto plus = b;
    for (auto& x : plus) x += 0.0001;
    const auto drift = alpha_beta(std::span<const double>(plus), b, kDefault);
    EXPECT_NEAR(drift.beta, 1.0, 1e-12);
    EXPECT_NEAR(drift.alpha_annual, 0.0255189119876973672501, 1e-9);
}

TEST(AlphaBeta, Errors) {
    const std::vector<double> flat(5, 0.01);
    const std::vector<double> p{0.01, 0.02, 0.0, 0.01, 0.03};
    EXPECT_THROW(alpha_beta(std::span<const double>(p), flat, kDefault), UndefinedMetric);
    EXPECT_THROW(alpha_beta(std::span<const double>(p), std::span<const double>(p).first(4), kDefault),
                 AlignmentError);
    auto a = dated(p);
    auto b = dated(p, make_date(2021, 2, 1));
    EXPECT_THROW(alpha_beta(a, b, kDefault), AlignmentError);
}

TEST(AlphaBeta, PropertyRecoversLinearConstruction) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> ua(-0.001, 0.001), ub(-2.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        const auto rb = random_returns(rng, 20 + rng() % 500);
        const double a = ua(rng), bb = ub(rng);
        std::vector<double> rp;
        for (const double x : rb) rp.push_back(a + bb * x);
        const auto ab = alpha_beta(std::span<const double>(rp), rb, kDefault);
        ASSERT_NEAR(ab.beta, bb, 1e-12);
        ASSERT_NEAR(ab.alpha_annual, std::pow(1.0 + a, 252) - 1.0, 1e-9);
    }
}

TEST(BoxPlotSummary, PointValues) {
    const auto b = box_plot_summary(std::vector<double>{3, 1, 5, 2, 4});
    EXPECT_EQ(b.min, 1.0);
    EXPECT_EQ(b.q1, 2.0);
    EXPECT_EQ(b.median, 3.0);
    EXPECT_EQ(b.q3, 4.0);
    EXPECT_EQ(b.max, 5.0);
    const auto one = box_plot_summary(std::vector<double>{0.7});
    EXPECT_EQ(one.min, 0.7);
    EXPECT_EQ(one.max, 0.7);
    EXPECT_EQ(one.median, 0.7);
    EXPECT_THROW(box_plot_summary(std::vector<double>{}), DomainError);
}

TEST(TearSheet, AllZeroReturns) {
    const auto z = dated(std::vector<double>(40, 0.0));
    const auto ts = tear_sheet(z, z, kDefault, "overall");
    EXPECT_EQ(ts.cumulative_return, 0.0);
    EXPECT_EQ(ts.max_drawdown, 0.0);
    EXPECT_EQ(ts.annual_volatility, 0.0);
    EXPECT_FALSE(ts.sharpe);
    EXPECT_FALSE(ts.sortino);
    EXPECT_FALSE(ts.calmar);
    EXPECT_FALSE(ts.omega);
    EXPECT_FALSE(ts.tail_ratio);
    EXPECT_FALSE(ts.stability);
    EXPECT_FALSE(ts.beta);
}

TEST(TearSheet, CumulativeFixture) {
    // Ten years of flat growth from 10000 to 48000.
    const double g = std::pow(4.8, 1.0 / 2520) - 1.0;
    std::vector<double> wealth{10000.0};
    for (int i = 0; i < 2520; ++i) wealth.push_back(wealth.back() * (1.0 + g));
    wealth.back() = 48000.0;
    const auto cal = rebal::testing::weekdays(make_date(2010, 1, 4), wealth.size());
    const auto r = simple_returns(cal, wealth);
    const auto ts = tear_sheet(r, r, kDefault, "overall");
    EXPECT_NEAR(*ts.cumulative_return, 3.80, 1e-12);
    EXPECT_EQ(cumulative_return(wealth.front(), wealth.back()), 3.80);
    EXPECT_NEAR(*ts.annual_return, cagr(10000.0, 48000.0, 10.0), 1e-12);
}

TEST(TearSheet, MatchesOracleOnSeededFixture) {
    std::mt19937_64 rng(9);
    const auto b = dated(random_returns(rng, 600));
    auto p = b;
    for (std::size_t i = 0; i < p.size(); ++i) p.values[i] = 0.0002 + 0.8 * b.values[i] + 0.004 * std::sin(i);
    const auto ts = tear_sheet(p, b, kDefault, "w");
    const auto& r = p.values;
    const auto ab = *oracle::alpha_beta(r, b.values, 0, 252);
    const std::vector<std::pair<MetricValue, long double>> pairs{
        {ts.annual_return, oracle::annual_return(r, 252)},
        {ts.cumulative_return, oracle::total_return(r)},
        {ts.annual_volatility, oracle::annual_volatility(r, 252)},
        {ts.max_drawdown, oracle::max_drawdown_returns(r)},
        {ts.sharpe, *oracle::sharpe(r, 0, 252)},
        {ts.calmar, *oracle::calmar(r, 252)},
        {ts.sortino, *oracle::sortino(r, 0, 252)},
        {ts.omega, *oracle::omega(r, 0)},
        {ts.tail_ratio, *oracle::tail_ratio(r)},
        {ts.skewness, *oracle::skewness(r)},
        {ts.kurtosis, *oracle::excess_kurtosis(r)},
        {ts.stability, *oracle::stability(r)},
        {ts.daily_var, oracle::value_at_risk(r, 0.05L)},
        {ts.alpha, ab.alpha_annual},
        {ts.beta, ab.beta},
    };
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        ASSERT_TRUE(pairs[i].first) << kTearSheetFields[i].key;
        EXPECT_TRUE(rel_close(*pairs[i].first, pairs[i].second, 1e-9))
            << kTearSheetFields[i].key << " " << *pairs[i].first << " vs " << static_cast<double>(pairs[i].second);
    }
}

TEST(TearSheet, InvariantsOnRandomFixtures) {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 50; ++trial) {
        const auto b = dated(random_returns(rng, 5 + rng() % 300));
        const auto p = dated(random_returns(rng, b.size()));
        const auto ts = tear_sheet(p, b, kDefault, "w");
        ASSERT_LE(*ts.max_drawdown, 0.0);
        ASSERT_GE(*ts.annual_volatility, 0.0);
        if (*ts.max_drawdown < 0.0 && ts.calmar && *ts.annual_return != 0.0) {
            ASSERT_EQ(*ts.calmar > 0.0, *ts.annual_return > 0.0);
        }
        if (ts.omega) {
            ASSERT_EQ(*ts.omega > 1.0, std::accumulate(p.values.begin(), p.values.end(), 0.0) > 0.0);
        }
    }
    EXPECT_THROW(tear_sheet(dated({0.1}), dated({0.1}), kDefault, "w"), DomainError);
    EXPECT_THROW(tear_sheet(dated({0.1, 0.2}), dated({0.1, 0.2}, make_date(2022, 1, 3)), kDefault, "w"),
                 AlignmentError);
}

TEST(Invariance, PositiveScaling) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uk(0.2, 5.0);
    for (int trial = 0; trial < 50; ++trial) {
        const auto r = random_returns(rng, 30 + rng() % 500, 0.0002, 0.01);
        const double k = uk(rng);
        const auto rk = scaled(r, k);
        ASSERT_TRUE(rel_close(sharpe(rk, kDefault), sharpe(r, kDefault), 1e-9));
        ASSERT_TRUE(rel_close(skewness(rk), skewness(r), 1e-9));
        ASSERT_TRUE(rel_close(kurtosis(rk), kurtosis(r), 1e-9));
        ASSERT_TRUE(rel_close(tail_ratio(rk), tail_ratio(r), 1e-9));
        ASSERT_TRUE(rel_close(omega(rk, kDefault), omega(r, kDefault), 1e-9));
        ASSERT_TRUE(rel_close(annual_volatility(rk, kDefault), k * annual_volatility(r, kDefault), 1e-9));
        ASSERT_TRUE(rel_close(daily_var(rk, kDefault), k * daily_var(r, kDefault), 1e-9));
        // Stability regresses cumulative log returns, so it is scale-free in log space.
        std::vector<double> rk_log;
        for (const double x : r) rk_log.push_back(std::expm1(k * std::log1p(x)));
        ASSERT_TRUE(rel_close(stability(rk_log), stability(r), 1e-9));
    }
}

TEST(Invariance, PermutationHalves) {
    std::mt19937_64 rng(12);
    int mdd_changed = 0;
    int stability_changed = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const auto r = random_returns(rng, 50 + rng() % 300);
        auto s = r;
        std::shuffle(s.begin(), s.end(), rng);
        ASSERT_TRUE(rel_close(skewness(s), skewness(r), 1e-9));
        ASSERT_TRUE(rel_close(kurtosis(s), kurtosis(r), 1e-9));
        ASSERT_TRUE(rel_close(annual_volatility(s, kDefault), annual_volatility(r, kDefault), 1e-9));
        ASSERT_EQ(daily_var(s, kDefault), daily_var(r, kDefault));
        ASSERT_EQ(tail_ratio(s), tail_ratio(r));
        ASSERT_TRUE(rel_close(omega(s, kDefault), omega(r, kDefault), 1e-9));
        if (!rel_close(max_drawdown_from_returns(s), max_drawdown_from_returns(r), 1e-9)) ++mdd_changed;
        if (!rel_close(stability(s), stability(r), 1e-9)) ++stability_changed;
    }
    EXPECT_GE(mdd_changed, 25);
    EXPECT_GE(stability_changed, 25);
}

TEST(MetricConfig, Validation) {
    MetricConfig c;
    EXPECT_NO_THROW(c.validate());
    c.periods_per_year = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.var_cutoff = 0.5;
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.risk_free_rate_annual = -1.5;
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.risk_free_rate_annual = 0.0;
    EXPECT_EQ(c.risk_free_per_period(), 0.0);
}
