#pragma once

#include <span>
#include <string>
#include <vector>

#include "xvab/exercise.hpp"
#include "xvab/instruments.hpp"

namespace xvab {

enum class VolStatus { Solved, NoSolution };

struct ImpliedVol {
    VolStatus status = VolStatus::NoSolution;
    double vol = 0.0;

    bool solved() const { return status == VolStatus::Solved; }
};

/// Bachelier swaption price: annuity x normal-model payoff expectation.
double bachelier_price(double forward, double strike, double expiry, double annuity, double vol,
                       SwapDirection kind = SwapDirection::Payer);
/// Shifted Black swaption price on forward + shift and strike + shift.
double black_price(double forward, double strike, double expiry, double annuity, double vol,
                   SwapDirection kind = SwapDirection::Payer, double shift = 0.0);

/// Inverts bachelier_price by a bracketed secant/bisection search. A zero
/// price, or one below intrinsic, has no solution; price equal to intrinsic
/// gives zero vol. Throws on negative price, non-positive annuity or expiry.
ImpliedVol normal_implied_vol(double price, double forward, double strike, double expiry, double annuity,
                              SwapDirection kind = SwapDirection::Payer);
/// Same for the shifted Black model. Prices at or above the zero-strike
/// bound annuity x (forward + shift) (payer) have no solution either.
ImpliedVol lognormal_implied_vol(double price, double forward, double strike, double expiry, double annuity,
                                 SwapDirection kind = SwapDirection::Payer, double shift = 0.0);

struct SmilePoint {
    std::string curve;
    double strike = 0.0;
    double forward = 0.0;
    double expiry = 0.0;
    double annuity = 0.0;
    double price = 0.0;
    double exercise_probability = 0.0;
    ImpliedVol normal;
    ImpliedVol lognormal;
};

/// One smile curve from a strike sweep: the no-adjustment price when
/// `with_xva` is false, the economic value otherwise.
std::vector<SmilePoint> smile_report(std::span<const ExerciseReport> reports, const std::string& curve, bool with_xva,
                                     SwapDirection kind, double shift = 0.0);

}  // namespace xvab
