#include "xvab/xva_terms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace xvab {

RateCurve::RateCurve(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
    if (times_.empty() || times_.size() != values_.size())
        throw std::invalid_argument("RateCurve needs matching, non-empty knots");
    for (std::size_t i = 1; i < times_.size(); ++i)
        if (!(times_[i] > times_[i - 1])) throw std::invalid_argument("RateCurve knots must increase");
}

double RateCurve::operator()(double t) const {
    if (t <= times_.front()) return values_.front();
    if (t >= times_.back()) return values_.back();
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const auto i = static_cast<std::size_t>(it - times_.begin());
    const double w = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
    return values_[i - 1] + w * (values_[i] - values_[i - 1]);
}

double RateCurve::integral(double a, double b) const {
    if (b < a) return -integral(b, a);
    // breakpoints inside (a, b) make each piece linear
    std::vector<double> pts{a};
    for (double t : times_)
        if (t > a && t < b) pts.push_back(t);
    pts.push_back(b);
    double s = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i)
        s += 0.5 * ((*this)(pts[i - 1]) + (*this)(pts[i])) * (pts[i] - pts[i - 1]);
    return s;
}

bool RateCurve::is_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

namespace {

void check_unit(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
}

RateCurve beta_curve(const CreditFundingParams& p, RateInBeta mode) {
    const double r = mode == RateInBeta::Included ? p.r() : 0.0;
    return RateCurve(r + p.lambda_C() + p.lambda_B());
}

}  // namespace

CreditFundingParams::CreditFundingParams(const Inputs& in) : in_(in) {
    check_unit(in.R_B, "R_B");
    check_unit(in.R_C, "R_C");
    check_unit(in.phi, "phi");
    if (!(in.lambda_B >= 0.0)) throw std::invalid_argument("lambda_B must be >= 0");
    if (!(in.lambda_C >= 0.0)) throw std::invalid_argument("lambda_C must be >= 0");
    for (double v : {in.s_X, in.r_IC, in.s_IB, in.gamma_K, in.r})
        if (!std::isfinite(v)) throw std::invalid_argument("credit/funding rates must be finite");
}

CreditFundingParams::CreditFundingParams(const Inputs& in, double quoted_s_F) : CreditFundingParams(in) {
    if (std::abs(quoted_s_F - s_F()) > 1e-12)
        throw std::invalid_argument("s_F inconsistent with s_F = (1 - R_B) lambda_B");
}

double closeout_gC(double V, double X, double R_C) {
    check_unit(R_C, "R_C");
    const double e = V - X;
    return R_C * std::max(e, 0.0) + std::min(e, 0.0) + X;
}

double closeout_gB(double V, double X, double R_B) {
    check_unit(R_B, "R_B");
    const double e = V - X;
    return std::max(e, 0.0) + R_B * std::min(e, 0.0) + X;
}

XvaTermSpec cva_term(const CreditFundingParams& p, RateInBeta r_mode) {
    return {"CVA", RateCurve((1.0 - p.R_C()) * p.lambda_C()), beta_curve(p, r_mode), Quantity::Value,
            Exponent::PositivePart};
}

XvaTermSpec fva_term(const CreditFundingParams& p, RateInBeta r_mode) {
    return {"FVA", RateCurve(p.s_F()), beta_curve(p, r_mode), Quantity::Value, Exponent::Identity};
}

XvaTermSpec colva_x_term(const CreditFundingParams& p, RateInBeta r_mode) {
    return {"COLVA_X", RateCurve(p.s_X()), beta_curve(p, r_mode), Quantity::Collateral, Exponent::Identity};
}

XvaTermSpec colva_ic_term(const CreditFundingParams& p, RateInBeta r_mode) {
    return {"COLVA_IC", RateCurve(p.r_IC()), beta_curve(p, r_mode), Quantity::InitialMarginReceived,
            Exponent::Identity};
}

XvaTermSpec kva_term(const CreditFundingParams& p, RateInBeta r_mode, KvaAlpha form) {
    const double funding_rate = form == KvaAlpha::Table ? p.r_B() : p.r();
    return {"KVA", RateCurve(p.gamma_K() - funding_rate * p.phi()), beta_curve(p, r_mode), Quantity::Capital,
            Exponent::Identity};
}

XvaTermSpec mva_term(const CreditFundingParams& p, RateInBeta r_mode) {
    return {"MVA", RateCurve(p.s_F() - p.s_IB()), beta_curve(p, r_mode), Quantity::InitialMarginPosted,
            Exponent::Identity};
}

std::vector<XvaTermSpec> standard_terms(const CreditFundingParams& p, RateInBeta r_mode, KvaAlpha form) {
    return {cva_term(p, r_mode),    fva_term(p, r_mode),        colva_x_term(p, r_mode),
            colva_ic_term(p, r_mode), kva_term(p, r_mode, form), mva_term(p, r_mode)};
}

namespace {

void check_dates(std::span<const double> dates) {
    if (dates.empty()) throw std::invalid_argument("empty integration grid");
    for (std::size_t i = 1; i < dates.size(); ++i)
        if (!(dates[i] > dates[i - 1])) throw std::invalid_argument("integration grid must be strictly increasing");
}

std::vector<double> term_weights(const XvaTermSpec& term, std::span<const double> dates) {
    const std::size_t n = dates.size();
    std::vector<double> w(n, 0.0);
    if (n < 2) return w;
    std::vector<double> ad(n);
    double cum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) cum += term.beta.integral(dates[i - 1], dates[i]);
        ad[i] = term.alpha(dates[i]) * std::exp(-cum);
    }
    for (std::size_t i = 1; i < n; ++i) {
        const double half = 0.5 * (dates[i] - dates[i - 1]);
        w[i - 1] -= half * ad[i - 1];
        w[i] -= half * ad[i];
    }
    return w;
}

}  // namespace

double xva_term_integral(const XvaTermSpec& term, const ExposureProfile& profile) {
    check_dates(profile.dates);
    if (profile.values.size() != profile.dates.size())
        throw std::invalid_argument("profile values and dates differ in length");
    double s = 0.0;
    double cum = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < profile.dates.size(); ++i) {
        if (!std::isfinite(profile.values[i])) throw std::invalid_argument("profile values must be finite");
        if (i > 0) cum += term.beta.integral(profile.dates[i - 1], profile.dates[i]);
        const double f = term.alpha(profile.dates[i]) * std::exp(-cum) * profile.values[i];
        if (i > 0) s += 0.5 * (prev + f) * (profile.dates[i] - profile.dates[i - 1]);
        prev = f;
    }
    return -s;
}

std::vector<std::vector<double>> build_weights(std::span<const XvaTermSpec> terms, std::span<const double> dates) {
    check_dates(dates);
    std::vector<std::vector<double>> w;
    w.reserve(terms.size());
    for (const auto& term : terms) w.push_back(term_weights(term, dates));
    return w;
}

Adjustment aggregate_U(std::span<const double> term_values, double V) {
    double U = 0.0;
    for (double v : term_values) U += v;
    return {U, V + U};
}

}  // namespace xvab
