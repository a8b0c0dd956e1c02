#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "xvab/instruments.hpp"

using namespace xvab;
using xvab::testing::flat_model;
using xvab::testing::flat_paths;

namespace {

SwapSpec annual_swap(double K, double start, double end, SwapDirection dir = SwapDirection::Payer) {
    SwapSpec s;
    s.fixed_rate = K;
    s.start = start;
    s.end = end;
    s.fixed_frequency = 1;
    s.float_frequency = 1;
    s.direction = dir;
    return s;
}

PathSet flat_annual(double f, double vol = 0.0, std::size_t n = 4) {
    return simulate_paths(flat_model(10.0, 1.0, f, vol), regular_grid(10.0, 1.0 / 12.0), n, 3);
}

}  // namespace

TEST(SwapSpec, Schedules) {
    SwapSpec s;
    s.start = 5.0;
    s.end = 10.0;
    s.fixed_frequency = 1;
    s.float_frequency = 2;
    EXPECT_EQ(s.fixed_dates().size(), 6u);
    EXPECT_EQ(s.float_dates().size(), 11u);
    s.end = 5.0;
    EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(SwapValue, HandDiscountedAnnuity) {
    const auto ps = flat_annual(0.02);
    double oracle = 0.0;
    for (int i = 1; i <= 5; ++i) oracle += std::pow(1.02, -i) * 0.01;
    EXPECT_NEAR(oracle, 0.047135, 5e-7);
    EXPECT_NEAR(swap_value(ps, 0, 0.0, annual_swap(0.01, 0.0, 5.0)), oracle, 1e-14);
}

TEST(SwapValue, ParSwapIsWorthNothingOnFrozenCurves) {
    const auto ps = flat_paths(10.0, 0.5, 0.025, 0.0, 3);
    SwapSpec s;
    s.start = 5.0;
    s.end = 10.0;
    s.fixed_rate = swap_rate(ps, 0, 0.0, s);
    for (double t : {0.0, 1.0, 2.5, 5.0}) {
        EXPECT_NEAR(swap_rate(ps, 1, t, s), s.fixed_rate, 1e-15);
        EXPECT_NEAR(swap_value(ps, 2, t, s), 0.0, 1e-15);
    }
}

TEST(SwapRate, FlatSimpleForwards) {
    const auto ps = flat_annual(0.031);
    EXPECT_NEAR(swap_rate(ps, 0, 0.0, annual_swap(0.0, 2.0, 9.0)), 0.031, 1e-15);
}

TEST(SwapValue, PayerReceiverAntisymmetry) {
    const auto ps = flat_paths(10.0, 0.5, 0.025, 0.2, 32, 4, 0.3);
    SwapSpec p;
    p.fixed_rate = 0.021;
    p.start = 2.0;
    p.end = 9.0;
    auto r = p;
    r.direction = SwapDirection::Receiver;
    for (std::size_t path = 0; path < 32; ++path)
        for (double t : {0.0, 2.0, 3.25, 8.5}) {
            const double vp = swap_value(ps, path, t, p);
            EXPECT_EQ(vp, -swap_value(ps, path, t, r));
        }
}

TEST(SwapValue, ZeroAfterEndAndOffGridThrows) {
    const auto ps = flat_annual(0.02);
    const auto s = annual_swap(0.01, 0.0, 3.0);
    EXPECT_EQ(swap_value(ps, 0, 3.0, s), 0.0);
    EXPECT_EQ(swap_value(ps, 0, 7.0, s), 0.0);
    EXPECT_THROW(swap_value(ps, 0, 1.01, s), std::invalid_argument);
}

TEST(SwapValue, AdditivityOverCashflows) {
    const auto ps = flat_paths(10.0, 0.5, 0.025, 0.2, 16, 8, 0.3);
    SwapSpec s;
    s.notional = 1e6;
    s.fixed_rate = 0.023;
    s.start = 1.0;
    s.end = 8.0;
    for (std::size_t path = 0; path < 16; ++path)
        for (double t : {0.0, 1.0, 1.0 + 1.0 / 12.0, 4.5, 7.75}) {
            const std::size_t d = ps.date_index(t);
            const CurveAt curve(ps, path, d);
            double sum = 0.0;
            for (const auto& f : remaining_cashflows(ps, path, d, s)) sum += f.amount * curve.discount(f.time);
            const double v = swap_value(ps, path, t, s);
            EXPECT_NEAR(v, sum, 1e-12 * std::max(1.0, std::abs(v)));
        }
}

TEST(SwapDelta, OnePeriodHandBump) {
    const auto ps = flat_annual(0.02);
    const auto s = annual_swap(0.02, 0.0, 1.0);
    const double hand = 1.0 * (1.0 / 1.02) * 1.0 * kBasisPoint;
    EXPECT_NEAR(swap_delta(ps, 0.0, s), hand, 0.01 * hand);
}

TEST(SwapDelta, ZeroNotionalAndAntisymmetry) {
    const auto ps = flat_paths(10.0, 0.5, 0.025, 0.2, 32, 6);
    SwapSpec p;
    p.fixed_rate = 0.02;
    p.start = 5.0;
    p.end = 10.0;
    auto r = p;
    r.direction = SwapDirection::Receiver;
    EXPECT_NEAR(swap_delta(ps, 5.0, p), -swap_delta(ps, 5.0, r), 1e-18);
    p.notional = 0.0;
    EXPECT_EQ(swap_delta(ps, 5.0, p), 0.0);
}

TEST(Swaption, PutCallParityAtExpiry) {
    const auto ps = flat_paths(10.0, 0.5, 0.025, 0.2, 64, 12, 0.3);
    SwaptionSpec payer;
    payer.expiry = 5.0;
    payer.underlying.fixed_rate = 0.025;
    payer.underlying.start = 5.0;
    payer.underlying.end = 10.0;
    auto receiver = payer;
    receiver.underlying.direction = SwapDirection::Receiver;
    for (std::size_t path = 0; path < 64; ++path)
        EXPECT_EQ(swaption_exercise_value(ps, path, payer) - swaption_exercise_value(ps, path, receiver),
                  swap_value(ps, path, 5.0, payer.underlying));
}

TEST(Swaption, ExpiryMustMatchStart) {
    SwaptionSpec o;
    o.expiry = 4.0;
    o.underlying.start = 5.0;
    o.underlying.end = 10.0;
    EXPECT_THROW(o.validate(), std::invalid_argument);
}
