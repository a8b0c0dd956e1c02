#include "xvab/smile.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace xvab {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

double pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }
double cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double intrinsic(double forward, double strike, SwapDirection kind) {
    return std::max(kind == SwapDirection::Payer ? forward - strike : strike - forward, 0.0);
}

// Undiscounted time value of the out-of-the-money side under Bachelier.
double normal_time_value(double forward, double strike, double expiry, double vol) {
    const double s = vol * std::sqrt(expiry);
    if (s <= 0.0) return 0.0;
    const double m = std::abs(forward - strike);
    const double d = m / s;
    return s * pdf(d) - m * cdf(-d);
}

// Same under Black on shifted forward f and strike k (both > 0).
double black_time_value(double f, double k, double expiry, double vol) {
    const double s = vol * std::sqrt(expiry);
    if (s <= 0.0) return 0.0;
    const double d1 = (std::log(f / k) + 0.5 * s * s) / s;
    const double d2 = d1 - s;
    return f < k ? f * cdf(d1) - k * cdf(d2) : k * cdf(-d2) - f * cdf(-d1);
}

void check_inputs(double price, double expiry, double annuity) {
    if (!(annuity > 0.0)) throw std::invalid_argument("annuity must be > 0");
    if (!(expiry > 0.0)) throw std::invalid_argument("expiry must be > 0");
    if (!(price >= 0.0)) throw std::invalid_argument("price must be >= 0");
}

// Solves tv(vol) = target for an increasing tv with tv(0) = 0.
ImpliedVol solve(const std::function<double(double)>& tv, double target, double guess, double vol_cap) {
    double lo = 0.0, hi = guess;
    double flo = -target, fhi = tv(hi) - target;
    while (fhi < 0.0) {
        lo = hi;
        flo = fhi;
        hi *= 2.0;
        if (hi > vol_cap) return {};
        fhi = tv(hi) - target;
    }
    int secant_run = 0;
    for (int it = 0; it < 400; ++it) {
        if (fhi == 0.0) return {VolStatus::Solved, hi};
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
        double x = 0.5 * (lo + hi);
        if (secant_run < 3 && fhi != flo) {
            const double s = lo - flo * (hi - lo) / (fhi - flo);
            const double margin = 0.05 * (hi - lo);
            if (s > lo + margin && s < hi - margin) {
                x = s;
                ++secant_run;
            } else {
                secant_run = 0;
            }
        } else {
            secant_run = 0;
        }
        const double fx = tv(x) - target;
        if (fx == 0.0) return {VolStatus::Solved, x};
        if (fx < 0.0) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
    }
    return {VolStatus::Solved, std::abs(flo) < std::abs(fhi) ? lo : hi};
}

}  // namespace

double bachelier_price(double forward, double strike, double expiry, double annuity, double vol, SwapDirection kind) {
    return annuity * (intrinsic(forward, strike, kind) + normal_time_value(forward, strike, expiry, vol));
}

double black_price(double forward, double strike, double expiry, double annuity, double vol, SwapDirection kind,
                   double shift) {
    const double f = forward + shift, k = strike + shift;
    if (!(f > 0.0) || !(k > 0.0)) throw std::invalid_argument("shifted forward and strike must be > 0");
    return annuity * (intrinsic(f, k, kind) + black_time_value(f, k, expiry, vol));
}

ImpliedVol normal_implied_vol(double price, double forward, double strike, double expiry, double annuity,
                              SwapDirection kind) {
    check_inputs(price, expiry, annuity);
    if (price == 0.0) return {};
    const double intr = intrinsic(forward, strike, kind);
    const double target = price / annuity - intr;
    const double tol = 1e-14 * (intr + price / annuity);
    if (target < -tol) return {};
    if (target <= tol) return {VolStatus::Solved, 0.0};
    return solve([&](double v) { return normal_time_value(forward, strike, expiry, v); }, target, 0.01, 1e4);
}

ImpliedVol lognormal_implied_vol(double price, double forward, double strike, double expiry, double annuity,
                                 SwapDirection kind, double shift) {
    check_inputs(price, expiry, annuity);
    const double f = forward + shift, k = strike + shift;
    if (!(f > 0.0) || !(k > 0.0)) return {};
    if (price == 0.0) return {};
    const double intr = intrinsic(f, k, kind);
    const double target = price / annuity - intr;
    const double tol = 1e-14 * (intr + price / annuity);
    if (target < -tol) return {};
    if (target <= tol) return {VolStatus::Solved, 0.0};
    if (target >= std::min(f, k)) return {};
    return solve([&](double v) { return black_time_value(f, k, expiry, v); }, target, 0.2, 1e3);
}

std::vector<SmilePoint> smile_report(std::span<const ExerciseReport> reports, const std::string& curve, bool with_xva,
                                     SwapDirection kind, double shift) {
    std::vector<SmilePoint> out;
    for (const auto& r : reports) {
        SmilePoint pt;
        pt.curve = curve;
        pt.strike = r.strike;
        pt.forward = r.forward;
        pt.expiry = r.expiry;
        pt.annuity = r.annuity;
        pt.price = with_xva ? r.value : r.value_no_xva;
        pt.exercise_probability = with_xva ? r.exercise_probability : r.exercise_probability_no_xva;
        if (pt.price > 0.0 && pt.annuity > 0.0 && pt.expiry > 0.0) {
            pt.normal = normal_implied_vol(pt.price, pt.forward, pt.strike, pt.expiry, pt.annuity, kind);
            pt.lognormal = lognormal_implied_vol(pt.price, pt.forward, pt.strike, pt.expiry, pt.annuity, kind, shift);
        }
        out.push_back(pt);
    }
    return out;
}

}  // namespace xvab
