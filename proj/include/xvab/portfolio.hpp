#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "xvab/exercise.hpp"

namespace xvab {

/// Option to enter `underlying` (or its tail) on one of `exercise_dates`.
/// Exercising on date d enters the swap from d to underlying.end. An empty
/// date list means a European exercisable at underlying.start.
struct PortfolioOption {
    SwapSpec underlying;
    std::vector<double> exercise_dates;

    std::vector<double> dates() const;
    SwapSpec swap_from(double date) const;
    void validate() const;
};

/// status[i] = 0 while option i is unexercised, k when it was exercised on
/// its k-th date.
using DecisionState = std::vector<std::size_t>;

inline constexpr std::size_t kDefaultOptionCap = 4;

/// All prod_i (m_i + 1) states for options with m_i exercise dates each,
/// in lexicographic order (first option slowest). Throws past `cap` options.
std::vector<DecisionState> enumerate_decision_states(std::span<const std::size_t> exercise_counts,
                                                     std::size_t cap = kDefaultOptionCap);
std::vector<DecisionState> enumerate_decision_states(std::span<const PortfolioOption> options,
                                                     std::size_t cap = kDefaultOptionCap);

struct PortfolioResult {
    /// V-hat(0) of the option book relative to never exercising anything.
    double value = 0.0;
    double std_error = 0.0;
    std::vector<DecisionState> states;
    /// Fraction of paths ending in each state.
    std::vector<double> state_probability;
    std::vector<std::string> term_names;
    /// Mean over paths of each term of the netted book of each state,
    /// evaluated at the last decision date (currency at that date).
    std::vector<std::vector<double>> state_xva;
    std::vector<double> state_value;  // mean book value V at the last decision date
    /// Final state index per path.
    std::vector<std::size_t> path_state;
    std::vector<double> decision_dates;
};

/// Backward induction over (decision date x state). At the last decision
/// date each candidate is valued as exact book value plus regressed
/// adjustments of the netted book; earlier candidates are valued by
/// regressing realised carry plus the next date's value. Options
/// exercisable on the same date are tried in every combination.
PortfolioResult portfolio_backward_induction(const PathSet& ps, std::span<const PortfolioOption> options,
                                             const XvaContext& ctx, std::size_t cap = kDefaultOptionCap);

}  // namespace xvab
