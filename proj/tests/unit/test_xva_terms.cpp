#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "xvab/ratesim.hpp"
#include "xvab/xva_terms.hpp"

using namespace xvab;

namespace {

XvaTermSpec constant_term(double alpha, double beta, Exponent delta = Exponent::Identity) {
    XvaTermSpec t;
    t.name = "T";
    t.alpha = RateCurve(alpha);
    t.beta = RateCurve(beta);
    t.delta = delta;
    return t;
}

ExposureProfile constant_profile(double horizon, double step, double c) {
    ExposureProfile p;
    p.dates = regular_grid(horizon, step);
    p.values.assign(p.dates.size(), c);
    return p;
}

CreditFundingParams::Inputs sample_inputs() {
    CreditFundingParams::Inputs in;
    in.lambda_B = 0.01;
    in.lambda_C = 0.03;
    in.R_B = 0.4;
    in.R_C = 0.35;
    in.s_X = 0.002;
    in.r_IC = 0.004;
    in.s_IB = 0.001;
    in.gamma_K = 0.1;
    in.phi = 0.5;
    in.r = 0.02;
    return in;
}

}  // namespace

TEST(Closeout, CounterpartyDefault) {
    EXPECT_DOUBLE_EQ(closeout_gC(10.0, 4.0, 1.0), 10.0);
    EXPECT_DOUBLE_EQ(closeout_gC(-7.0, 3.0, 1.0), -7.0);
    EXPECT_DOUBLE_EQ(closeout_gC(5.0, 5.0, 0.3), 5.0);
    EXPECT_DOUBLE_EQ(closeout_gC(10.0, 4.0, 0.4), 6.4);
    EXPECT_THROW(closeout_gC(1.0, 0.0, 1.2), std::invalid_argument);
}

TEST(Closeout, IssuerDefault) {
    EXPECT_DOUBLE_EQ(closeout_gB(-10.0, 2.0, 1.0), -10.0);
    EXPECT_DOUBLE_EQ(closeout_gB(-3.0, -3.0, 0.2), -3.0);
    EXPECT_DOUBLE_EQ(closeout_gB(-10.0, -4.0, 0.4), -6.4);
    EXPECT_THROW(closeout_gB(1.0, 0.0, -0.1), std::invalid_argument);
}

TEST(CreditFunding, FundingSpreadIdentity) {
    const CreditFundingParams p(sample_inputs());
    EXPECT_DOUBLE_EQ(p.s_F(), 0.6 * 0.01);
    EXPECT_DOUBLE_EQ(p.r_B(), 0.02 + 0.006);
    EXPECT_NO_THROW(CreditFundingParams(sample_inputs(), 0.006));
    try {
        CreditFundingParams(sample_inputs(), 0.007);
        FAIL() << "inconsistent s_F accepted";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("s_F = (1 - R_B) lambda_B"), std::string::npos);
    }
}

TEST(CreditFunding, RejectsOutOfRangeInputs) {
    auto in = sample_inputs();
    in.lambda_C = -0.01;
    EXPECT_THROW(CreditFundingParams{in}, std::invalid_argument);
    in = sample_inputs();
    in.R_B = 1.5;
    EXPECT_THROW(CreditFundingParams{in}, std::invalid_argument);
    in = sample_inputs();
    in.phi = -0.5;
    EXPECT_THROW(CreditFundingParams{in}, std::invalid_argument);
}

TEST(TermTable, SixRowsWithTabulatedParameters) {
    const CreditFundingParams p(sample_inputs());
    const auto terms = standard_terms(p);
    ASSERT_EQ(terms.size(), 6u);
    const double beta = 0.02 + 0.03 + 0.01;
    const struct {
        const char* name;
        double alpha;
        Quantity gamma;
        Exponent delta;
    } rows[] = {
        {"CVA", 0.65 * 0.03, Quantity::Value, Exponent::PositivePart},
        {"FVA", 0.006, Quantity::Value, Exponent::Identity},
        {"COLVA_X", 0.002, Quantity::Collateral, Exponent::Identity},
        {"COLVA_IC", 0.004, Quantity::InitialMarginReceived, Exponent::Identity},
        {"KVA", 0.1 - 0.026 * 0.5, Quantity::Capital, Exponent::Identity},
        {"MVA", 0.006 - 0.001, Quantity::InitialMarginPosted, Exponent::Identity},
    };
    for (std::size_t j = 0; j < 6; ++j) {
        EXPECT_EQ(terms[j].name, rows[j].name);
        EXPECT_NEAR(terms[j].alpha(1.0), rows[j].alpha, 1e-16) << rows[j].name;
        EXPECT_NEAR(terms[j].beta(1.0), beta, 1e-16) << rows[j].name;
        EXPECT_EQ(terms[j].gamma, rows[j].gamma) << rows[j].name;
        EXPECT_EQ(terms[j].delta, rows[j].delta) << rows[j].name;
    }
    EXPECT_NEAR(kva_term(p, RateInBeta::Included, KvaAlpha::ShortRate).alpha(0.0), 0.1 - 0.02 * 0.5, 1e-16);
    EXPECT_NEAR(cva_term(p, RateInBeta::Excluded).beta(0.0), 0.04, 1e-16);
}

TEST(TermTable, ZeroSpreadsKillEveryTerm) {
    CreditFundingParams::Inputs in;
    in.r = 0.03;
    in.phi = 0.4;
    in.gamma_K = 0.03 * 0.4;  // gamma_K = r phi
    const CreditFundingParams p(in);
    for (const auto& t : standard_terms(p, RateInBeta::Included, KvaAlpha::ShortRate))
        EXPECT_EQ(xva_term_integral(t, constant_profile(5.0, 1.0 / 12.0, 3.0)), 0.0) << t.name;
}

TEST(RateCurve, PiecewiseLinearAndExactIntegral) {
    const RateCurve c({0.0, 1.0, 3.0}, {0.01, 0.03, 0.02});
    EXPECT_DOUBLE_EQ(c(-1.0), 0.01);
    EXPECT_DOUBLE_EQ(c(0.5), 0.02);
    EXPECT_DOUBLE_EQ(c(5.0), 0.02);
    EXPECT_NEAR(c.integral(0.0, 4.0), 0.02 + 0.05 + 0.02, 1e-16);
    EXPECT_NEAR(c.integral(0.5, 2.0), 0.5 * (0.02 + 0.03) * 0.5 + 0.5 * (0.03 + 0.025) * 1.0, 1e-16);
    EXPECT_THROW(RateCurve({0.0, 0.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST(XvaIntegral, ZeroAlphaAndConstants) {
    EXPECT_EQ(xva_term_integral(constant_term(0.0, 0.05), constant_profile(5.0, 0.25, 7.0)), 0.0);
    EXPECT_NEAR(xva_term_integral(constant_term(1.0, 0.0), constant_profile(5.0, 1.0 / 12.0, 2.5)), -12.5, 1e-12);
}

TEST(XvaIntegral, ClosedFormConstantExposure) {
    const double alpha = 0.6 * 0.02, beta = 0.03 + 0.02 + 0.01, c = 1.7, T = 5.0;
    const double exact = -c * alpha * (1.0 - std::exp(-beta * T)) / beta;
    const double monthly = xva_term_integral(constant_term(alpha, beta), constant_profile(T, 1.0 / 12.0, c));
    EXPECT_LT(std::abs(monthly / exact - 1.0), 1e-4);
}

TEST(XvaIntegral, SecondOrderConvergence) {
    const double alpha = 0.02, beta = 0.4, T = 5.0;
    const double exact = -alpha * (1.0 - std::exp(-beta * T)) / beta;
    const auto term = constant_term(alpha, beta);
    const double e1 = std::abs(xva_term_integral(term, constant_profile(T, 1.0 / 12.0, 1.0)) - exact);
    const double e2 = std::abs(xva_term_integral(term, constant_profile(T, 1.0 / 24.0, 1.0)) - exact);
    EXPECT_GE(e1 / e2, 3.5);
    EXPECT_LE(e1 / e2, 4.5);
}

TEST(XvaIntegral, ProfilesAreExpectationsAndCostsAreNegative) {
    // profile values are already E[gamma^delta]; the exponent acts pathwise
    ExposureProfile p;
    p.dates = {0.0, 1.0, 2.0};
    p.values = {-1.0, 2.0, -3.0};
    EXPECT_DOUBLE_EQ(xva_term_integral(constant_term(1.0, 0.0), p), 0.0);
    const auto pos = constant_term(1.0, 0.0, Exponent::PositivePart);
    EXPECT_EQ(pos.apply_exponent(-1.0), 0.0);
    EXPECT_EQ(pos.apply_exponent(2.0), 2.0);
    EXPECT_EQ(constant_term(1.0, 0.0).apply_exponent(-1.0), -1.0);
    p.values = {0.5, 0.2, 0.9};
    EXPECT_LE(xva_term_integral(constant_term(0.3, 0.1), p), 0.0);
}

TEST(XvaIntegral, LinearInProfile) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n01;
    ExposureProfile a, b, c;
    a.dates = b.dates = c.dates = regular_grid(3.0, 0.25);
    for (std::size_t i = 0; i < a.dates.size(); ++i) {
        a.values.push_back(n01(rng));
        b.values.push_back(n01(rng));
        c.values.push_back(2.0 * a.values.back() - 3.0 * b.values.back());
    }
    const auto t = constant_term(0.05, 0.07);
    EXPECT_NEAR(xva_term_integral(t, c), 2.0 * xva_term_integral(t, a) - 3.0 * xva_term_integral(t, b), 1e-15);
}

TEST(XvaIntegral, Errors) {
    ExposureProfile p;
    EXPECT_THROW(xva_term_integral(constant_term(1.0, 0.0), p), std::invalid_argument);
    p.dates = {0.0, 2.0, 1.0};
    p.values = {1.0, 1.0, 1.0};
    EXPECT_THROW(xva_term_integral(constant_term(1.0, 0.0), p), std::invalid_argument);
}

TEST(Weights, TwoDateTrapezoid) {
    const std::vector<XvaTermSpec> terms{constant_term(1.0, 0.0)};
    const std::vector<double> dates{0.0, 0.5};
    const auto w = build_weights(terms, dates);
    ASSERT_EQ(w.size(), 1u);
    ASSERT_EQ(w[0].size(), 2u);
    EXPECT_DOUBLE_EQ(w[0][0], -0.25);
    EXPECT_DOUBLE_EQ(w[0][1], -0.25);
}

TEST(Weights, ReproduceDirectIntegral) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    CreditFundingParams::Inputs in = sample_inputs();
    const auto terms = standard_terms(CreditFundingParams(in));
    ExposureProfile p;
    p.dates = regular_grid(5.0, 1.0 / 12.0);
    for (std::size_t i = 0; i < p.dates.size(); ++i) p.values.push_back(u(rng));
    const auto w = build_weights(terms, p.dates);
    for (std::size_t j = 0; j < terms.size(); ++j) {
        double via_weights = 0.0;
        for (std::size_t i = 0; i < p.dates.size(); ++i) via_weights += w[j][i] * p.values[i];
        const double direct = xva_term_integral(terms[j], p);
        EXPECT_NEAR(via_weights, direct, 1e-12 * std::abs(direct)) << terms[j].name;
    }
    ExposureProfile flat = constant_profile(5.0, 1.0 / 12.0, 2.0);
    const std::vector<XvaTermSpec> unit{constant_term(1.0, 0.0)};
    const auto wu = build_weights(unit, flat.dates);
    double s = 0.0;
    for (double x : wu[0]) s += 2.0 * x;
    EXPECT_NEAR(s, -10.0, 1e-12);
}

TEST(Aggregate, SumsTerms) {
    const std::vector<double> zero(6, 0.0), some{-1.0, -2.0, -3.0};
    EXPECT_EQ(aggregate_U(zero, 4.0).U, 0.0);
    EXPECT_EQ(aggregate_U(zero, 4.0).economic_value, 4.0);
    EXPECT_EQ(aggregate_U(some).U, -6.0);
    EXPECT_EQ(aggregate_U(some, 10.0).economic_value, 4.0);
}
