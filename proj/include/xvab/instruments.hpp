#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "xvab/ratesim.hpp"

namespace xvab {

enum class SwapDirection { Payer, Receiver };
enum class Settlement { Physical, Cash };

/// Vanilla fixed-float swap. Payer pays fixed. Accruals are plain year
/// fractions between schedule dates.
struct SwapSpec {
    double notional = 1.0;
    double fixed_rate = 0.0;
    double start = 0.0;
    double end = 1.0;
    int fixed_frequency = 1;  // payments per year
    int float_frequency = 2;
    SwapDirection direction = SwapDirection::Payer;

    std::vector<double> fixed_dates() const;  // start, ..., end
    std::vector<double> float_dates() const;
    double sign() const { return direction == SwapDirection::Payer ? 1.0 : -1.0; }
    void validate() const;
};

struct SwaptionSpec {
    double expiry = 0.0;
    SwapSpec underlying;
    Settlement settlement = Settlement::Physical;

    double strike() const { return underlying.fixed_rate; }
    void validate() const;
};

struct Cashflow {
    double time;
    double amount;
};

/// Cashflows still to be paid strictly after grid date `date`, signed for
/// the holder. Float periods that have not fixed are telescoped into
/// notional exchanges; a period already running pays its fixing.
std::vector<Cashflow> remaining_cashflows(const PathSet& ps, std::size_t path, std::size_t date,
                                          const SwapSpec& spec);

double present_value(const CurveAt& curve, std::span<const Cashflow> flows);

/// Every payment of the swap as it is realised along `path`: each float
/// period pays the rate fixed at its reset date, signed for the holder.
std::vector<Cashflow> realized_cashflows(const PathSet& ps, std::size_t path, const SwapSpec& spec);

double swap_value(const PathSet& ps, std::size_t path, double t, const SwapSpec& spec);
double swap_annuity(const PathSet& ps, std::size_t path, double t, const SwapSpec& spec);
double swap_rate(const PathSet& ps, std::size_t path, double t, const SwapSpec& spec);

/// Mean over paths of the value change for a +1bp parallel move in all
/// pathwise forwards (currency per bp).
double swap_delta(const PathSet& ps, double t, const SwapSpec& spec);

/// Physical settlement payoff at expiry: the holder enters the swap when
/// it is worth more than nothing.
double swaption_exercise_value(const PathSet& ps, std::size_t path, const SwaptionSpec& option);

inline constexpr double kBasisPoint = 1e-4;

}  // namespace xvab
