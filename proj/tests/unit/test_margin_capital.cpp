#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "xvab/margin_capital.hpp"

using namespace xvab;
using xvab::testing::flat_model;

namespace {

double sort_oracle_es(std::vector<double> pnl, double level) {
    std::sort(pnl.begin(), pnl.end());
    const auto k = static_cast<std::size_t>(std::ceil((1.0 - level) * static_cast<double>(pnl.size()) - 1e-9));
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += pnl[i];
    return -s / static_cast<double>(k);
}

SwapSpec annual_swap(double K, double start, double end, double notional = 1.0,
                     SwapDirection dir = SwapDirection::Payer) {
    SwapSpec s;
    s.fixed_rate = K;
    s.start = start;
    s.end = end;
    s.notional = notional;
    s.fixed_frequency = 1;
    s.float_frequency = 1;
    s.direction = dir;
    return s;
}

PathSet frozen(double f = 0.02) {
    return simulate_paths(flat_model(10.0, 1.0, f, 0.0), regular_grid(10.0, 1.0 / 12.0), 2, 3);
}

ShockSeries shocks_from(const std::vector<double>& tenors, const std::vector<double>& daily) {
    ShockSeries s;
    s.tenors = tenors;
    s.shocks.resize(static_cast<Eigen::Index>(daily.size()), static_cast<Eigen::Index>(tenors.size()));
    for (std::size_t d = 0; d < daily.size(); ++d)
        for (std::size_t c = 0; c < tenors.size(); ++c)
            s.shocks(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(c)) = daily[d];
    return s;
}

ShockSeries alternating(std::size_t days, double size) {
    std::vector<double> d(days);
    for (std::size_t i = 0; i < days; ++i) d[i] = (i % 2 == 0 ? size : -size);
    return shocks_from({0.5, 10.0}, d);
}

}  // namespace

TEST(ExpectedShortfall, ConstantLoss) {
    const std::vector<double> pnl(40, -3.5);
    EXPECT_DOUBLE_EQ(expected_shortfall(pnl, 0.975), 3.5);
}

TEST(ExpectedShortfall, SingleTailPoint) {
    std::vector<double> pnl;
    for (int i = -10; i <= 9; ++i) pnl.push_back(i);
    EXPECT_DOUBLE_EQ(expected_shortfall(pnl, 0.975), 10.0);
}

TEST(ExpectedShortfall, StandardNormalMatchesSortOracleAndAnalytic) {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> n01;
    std::vector<double> pnl(2500);
    for (double& x : pnl) x = n01(rng);
    const double es = expected_shortfall(pnl, 0.975);
    EXPECT_EQ(es, sort_oracle_es(pnl, 0.975));
    // phi(q) / (1 - level) with q = 1.959964
    const double analytic = std::exp(-0.5 * 1.959963984540054 * 1.959963984540054) / std::sqrt(2.0 * M_PI) / 0.025;
    EXPECT_NEAR(analytic, 2.338, 1e-3);
    EXPECT_NEAR(es, analytic, 0.15);
}

TEST(ExpectedShortfall, MonotoneAndHomogeneous) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n01;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> a(300), worse(300), scaled(300);
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = n01(rng);
            worse[i] = a[i] - u(rng);
            scaled[i] = 3.25 * a[i];
        }
        EXPECT_GE(expected_shortfall(worse, 0.975), expected_shortfall(a, 0.975));
        EXPECT_NEAR(expected_shortfall(scaled, 0.975), 3.25 * expected_shortfall(a, 0.975), 1e-12);
    }
}

TEST(ExpectedShortfall, Errors) {
    EXPECT_THROW(expected_shortfall(std::vector<double>{}, 0.975), std::invalid_argument);
    EXPECT_THROW(expected_shortfall(std::vector<double>{1.0}, 1.0), std::invalid_argument);
}

TEST(ShockSeries, ParseAndInterpolate) {
    std::istringstream in("1, 5\n\n0.001, 0.003\n-0.002,0.002\n");
    const auto s = parse_shock_series(in);
    ASSERT_EQ(s.days(), 2u);
    EXPECT_DOUBLE_EQ(s.at(0, 3.0), 0.002);
    EXPECT_DOUBLE_EQ(s.at(1, 0.1), -0.002);
    EXPECT_DOUBLE_EQ(s.at(1, 30.0), 0.002);
}

TEST(ShockSeries, ParseErrorsNameTheLine) {
    auto message = [](const std::string& text) {
        std::istringstream in(text);
        try {
            parse_shock_series(in);
        } catch (const std::invalid_argument& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    EXPECT_NE(message("1,5\n0.1,0.2\n0.1\n").find("line 3"), std::string::npos);
    EXPECT_NE(message("1,5\n0.1,abc\n").find("line 2"), std::string::npos);
    EXPECT_NE(message("5,1\n0.1,0.2\n").find("increase"), std::string::npos);
    EXPECT_NE(message("1,5\n").find("no days"), std::string::npos);
}

TEST(SyntheticShocks, ReproducibleWithRequestedVol) {
    SyntheticShockConfig cfg;
    cfg.days = 20000;
    const auto a = synthetic_shock_series(cfg), b = synthetic_shock_series(cfg);
    EXPECT_EQ(a.shocks, b.shocks);
    for (Eigen::Index c = 0; c < a.shocks.cols(); ++c) {
        const auto col = a.shocks.col(c);
        const double sd = std::sqrt((col.array() - col.mean()).square().mean());
        EXPECT_NEAR(sd, cfg.daily_vol[static_cast<std::size_t>(c)], 0.03 * cfg.daily_vol[static_cast<std::size_t>(c)]);
    }
}

TEST(InitialMargin, ZeroPortfolioAndZeroShocks) {
    const auto ps = frozen();
    const ImConfig cfg;
    EXPECT_EQ(compute_im(ps, 0, 0.0, {}, alternating(50, 1e-4), cfg), 0.0);
    const std::vector<SwapSpec> book{annual_swap(0.02, 0.0, 5.0)};
    EXPECT_EQ(compute_im(ps, 0, 0.0, book, shocks_from({1.0}, std::vector<double>(50, 0.0)), cfg), 0.0);
}

TEST(InitialMargin, AlternatingShocksMatchDeltaOracle) {
    // five-day sums of +-1bp alternate between +1bp and -1bp, so half the
    // scenarios lose one basis-point delta whichever side we are on
    const auto ps = frozen();
    const auto swap = annual_swap(0.02, 0.0, 1.0);
    const std::vector<SwapSpec> book{swap};
    const auto shocks = alternating(101, 1e-4);
    const ImConfig cfg;
    const double oracle = std::sqrt(2.0) * std::abs(swap_delta(ps, 0.0, swap));
    const double im = compute_im(ps, 0, 0.0, book, shocks, cfg);
    EXPECT_NEAR(im, oracle, 0.05 * oracle);

    const InitialMarginModel model(shocks, cfg);
    const auto pair = model.margin(CurveAt(ps, 0, 0), remaining_cashflows(ps, 0, 0, swap));
    EXPECT_EQ(pair.posted, im);
    EXPECT_NEAR(pair.received, oracle, 0.05 * oracle);
}

TEST(InitialMargin, BatchedPathsMatchSinglePath) {
    const auto ps = xvab::testing::flat_paths(10.0, 1.0, 0.025, 0.2, 40, 17, 0.3);
    const std::vector<SwapSpec> book{annual_swap(0.021, 2.0, 9.0, 1.0), annual_swap(0.03, 1.0, 6.0, 0.5, SwapDirection::Receiver)};
    SyntheticShockConfig sc;
    sc.days = 300;
    const auto shocks = synthetic_shock_series(sc);
    const ImConfig cfg;
    const InitialMarginModel model(shocks, cfg);
    const std::size_t d = ps.date_index(2.0);
    const auto all = model.margin_all_paths(ps, d, book);
    for (std::size_t p = 0; p < ps.n_paths(); ++p) {
        const double single = compute_im(ps, p, 2.0, book, shocks, cfg);
        EXPECT_GE(all[p].posted, 0.0);
        EXPECT_GE(all[p].received, 0.0);
        EXPECT_NEAR(all[p].posted, single, 1e-12 * std::max(1.0, single));
    }
}

TEST(InitialMargin, ConfigErrors) {
    ImConfig cfg;
    cfg.es_level = 0.4;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = ImConfig{};
    cfg.overlap_days = 10;
    EXPECT_THROW(InitialMarginModel(alternating(5, 1e-4), cfg), std::invalid_argument);
}

TEST(MarketRisk, ZeroPortfolioIsZero) {
    EXPECT_EQ(market_risk_capital(frozen(), 0, 0.0, {}, CapitalConfig{}), 0.0);
}

TEST(MarketRisk, SwapLossIsDeltaTimesShift) {
    const auto ps = frozen();
    const CapitalConfig cfg;
    for (double end : {1.0, 3.0, 8.0}) {
        const auto swap = annual_swap(0.02, 0.0, end, 1e6);
        const double shift = cfg.yield_shift(end, 0.02);
        const double oracle = std::abs(swap_delta(ps, 0.0, swap)) * shift / kBasisPoint;
        const double k = market_risk_capital(ps, 0, 0.0, std::vector<SwapSpec>{swap}, cfg);
        EXPECT_NEAR(k, oracle, 0.05 * oracle) << "end " << end;
    }
}

TEST(MarketRisk, LongAndShortNet) {
    const auto ps = frozen();
    const std::vector<SwapSpec> book{annual_swap(0.02, 0.0, 5.0), annual_swap(0.02, 0.0, 5.0, 1.0, SwapDirection::Receiver)};
    EXPECT_NEAR(market_risk_capital(ps, 0, 0.0, book, CapitalConfig{}), 0.0, 1e-16);
}

TEST(MarketRisk, ScenarioGridTakesWorstFlooredLoss) {
    const CapitalConfig cfg;
    EXPECT_EQ(scenario_grid_capital([](double, double) { return 1.0; }, cfg), 0.0);
    EXPECT_DOUBLE_EQ(scenario_grid_capital([](double v, double y) { return -v * (1.0 + y); }, cfg), 2.5);
}

TEST(CapitalConfig, TablesAndThreshold) {
    const CapitalConfig cfg;
    EXPECT_EQ(cfg.addon(0.5), 0.0);
    EXPECT_EQ(cfg.addon(5.0), 0.005);
    EXPECT_EQ(cfg.addon(30.0), 0.015);
    EXPECT_EQ(cfg.yield_shift(2.5, 0.05), 0.0080);
    EXPECT_EQ(cfg.yield_shift(2.5, 0.01), 0.0075);
    EXPECT_EQ(cfg.yield_shift(25.0, 0.01), 0.0060);
    auto bad = cfg;
    bad.ccr_addons = {{5.0, 0.0}, {1.0, 0.01}};
    EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(CcrCapital, HandFormula) {
    CapitalConfig cfg;
    cfg.ccr_addons = {{1.0, 0.0}, {std::numeric_limits<double>::infinity(), 0.005}};
    EXPECT_EQ(ccr_capital(-50.0, 1000.0, 0.5, cfg), 0.0);
    EXPECT_DOUBLE_EQ(ccr_capital(100.0, 1000.0, 3.0, cfg), 8.4);
    EXPECT_DOUBLE_EQ(ccr_capital(0.0, 2000.0, 3.0, cfg), 2.0 * ccr_capital(0.0, 1000.0, 3.0, cfg));
}

TEST(TotalCapital, ZeroPortfolioAndComponentSum) {
    const auto ps = xvab::testing::flat_paths(10.0, 1.0, 0.025, 0.2, 12, 23, 0.3);
    const CapitalConfig cfg;
    const std::vector<std::size_t> dates{0, ps.date_index(2.0), ps.date_index(4.5)};
    for (const auto& row : total_capital_profile(ps, {}, cfg, dates))
        for (double k : row) EXPECT_EQ(k, 0.0);

    const auto swap = annual_swap(0.024, 2.0, 9.0, 1e6, SwapDirection::Receiver);
    const std::vector<SwapSpec> book{swap};
    const auto K = total_capital_profile(ps, book, cfg, dates);
    for (std::size_t i = 0; i < dates.size(); ++i)
        for (std::size_t p = 0; p < ps.n_paths(); ++p) {
            const double t = ps.date_grid()[dates[i]];
            const double oracle = ccr_capital(swap_value(ps, p, t, swap), swap.notional, swap.end - t, cfg) +
                                  market_risk_capital(ps, p, t, book, cfg);
            EXPECT_GE(K[i][p], 0.0);
            EXPECT_NEAR(K[i][p], oracle, 1e-9);
        }
}

TEST(TotalCapital, MarketRiskSwitch) {
    const auto ps = frozen();
    CapitalConfig cfg;
    cfg.market_risk = false;
    const auto swap = annual_swap(0.01, 0.0, 5.0, 1e6);
    const std::vector<std::size_t> dates{0};
    const auto K = total_capital_profile(ps, std::vector<SwapSpec>{swap}, cfg, dates);
    EXPECT_NEAR(K[0][0], ccr_capital(swap_value(ps, 0, 0.0, swap), 1e6, 5.0, cfg), 1e-9);
}
