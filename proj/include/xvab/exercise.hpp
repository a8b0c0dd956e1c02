#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "xvab/exposure.hpp"
#include "xvab/instruments.hpp"
#include "xvab/ratesim.hpp"
#include "xvab/regression.hpp"
#include "xvab/xva_terms.hpp"

namespace xvab {

/// Regression estimates entering the exercise comparison at one date.
struct ExerciseContext {
    double V_ex = 0.0;
    double V_noex = 0.0;
    double U_ex = 0.0;
    double U_noex = 0.0;
};

/// V_ex + U_ex > V_noex + U_noex. Ties do not exercise.
bool decide_exercise(const ExerciseContext& ctx);

/// Everything needed to value adjustments on a netting set. Terms should
/// be built with RateInBeta::Excluded: profiles are deflated by the
/// pathwise numeraire, which already carries the short rate.
struct XvaContext {
    std::vector<XvaTermSpec> terms;
    ExposureConfig exposure;
    LocalRegressionConfig regression;
    /// Trades already in the netting set, present in both branches.
    std::vector<SwapSpec> netting_set;
};

XvaContext make_xva_context(const CreditFundingParams& credit, KvaAlpha kva_form, ExposureConfig exposure,
                            LocalRegressionConfig regression, std::vector<SwapSpec> netting_set = {});

/// Value and adjustments of one book, per path, at an observation date.
struct BranchValues {
    std::vector<double> V;                   // [path]
    std::vector<std::vector<double>> U_term;  // [term][path]
    std::vector<double> U;                   // [path], sum over terms in term order
};

/// Regressed adjustments of `book` seen from grid date `obs`:
///   U_j = w_j0 gamma_j(t_obs) + E[ sum_{i>0} w_ji gamma_j(t_i) B(t_obs)/B(t_i) | x ]
/// where x is the phase-1 regressor held in `basis`. The smoother is linear,
/// so regressing the weighted sum equals summing the per-date regressions.
/// Terms whose weights are all zero contribute exactly zero.
BranchValues branch_values(const PathSet& ps, std::span<const SwapSpec> book, std::size_t obs, const XvaContext& ctx,
                           const RegressionBasis& basis, const BookProfiles* profiles = nullptr);

/// Quantities the context's terms integrate (for book_profiles).
std::vector<Quantity> needed_quantities(const XvaContext& ctx);

struct RollbackResult {
    double value = 0.0;
    double std_error = 0.0;
    /// Same induction carrying fitted instead of realised values: at every
    /// date the values are replaced by their regression on 1/B(t). The gap
    /// to `value` is the bias of the smoother's end windows.
    double regressed_value = 0.0;
};

/// Backward induction of deflated values from grid date `from` to t = 0.
/// No decision is taken before `from`, so carrying the realised values
/// leaves their sample mean, which is unbiased.
RollbackResult phase2_rollback(const PathSet& ps, std::size_t from, std::vector<double> deflated,
                               const LocalRegressionConfig& reg);

/// Phase-1 estimate of the book value at grid date `n` per path: cashflows
/// realised after t_n rolled back from the last payment, replacing the
/// carried value by its regression on the average discount to the book's
/// maturity at every date. Fitted values filter the floating-rate noise
/// that a single regression of the realised sum would keep.
std::vector<double> phase1_book_values(const PathSet& ps, std::span<const SwapSpec> book, std::size_t n,
                                       const LocalRegressionConfig& reg);

/// mean(max(V(T_e), 0) / B(T_e)) with its standard error.
RollbackResult single_step_value(const PathSet& ps, const SwaptionSpec& option);

struct LsmResult {
    double value = 0.0;
    double std_error = 0.0;
    std::vector<char> exercised;
    /// Pathwise value at expiry divided by B(T_e).
    std::vector<double> deflated_payoff;
    double regressed_value = 0.0;
    /// Mean and max |phase-1 estimate - exact| swap value at expiry.
    double phase1_mean_abs_error = 0.0;
    double phase1_max_abs_error = 0.0;
};

/// Plain two-phase Longstaff-Schwartz valuation without adjustments: exercise
/// where the phase-1 estimate is positive, exercised paths receive the exact
/// swap value.
LsmResult two_phase_lsm(const PathSet& ps, const SwaptionSpec& option, const LocalRegressionConfig& reg);

struct ExerciseReport {
    double strike = 0.0;
    Settlement settlement = Settlement::Physical;
    double exercise_probability = 0.0;
    double exercise_probability_no_xva = 0.0;
    double exercise_probability_se = 0.0;
    double exercise_probability_no_xva_se = 0.0;
    double value = 0.0;  // V-hat(0)
    double value_se = 0.0;
    double value_no_xva = 0.0;  // V(0)
    double value_no_xva_se = 0.0;
    /// V-hat(0) from fitted-value phase-2 induction (diagnostic).
    double value_regressed_rollback = 0.0;
    /// Forward swap rate and annuity (currency per unit rate) at t = 0.
    double forward = 0.0;
    double annuity = 0.0;
    double expiry = 0.0;
    /// Mean swap value change per +1bp at expiry (currency).
    double swap_delta = 0.0;

    std::vector<std::string> term_names;
    /// Mean over exercised paths of U_ex,j - U_noex,j at expiry (NaN if none exercise).
    std::vector<double> xva_at_exercise;
    /// Same, each path deflated by B(T_e) to today's money.
    std::vector<double> xva_at_exercise_pv;
    /// -xva_at_exercise / |swap_delta|: cost as a multiple of the swap delta.
    std::vector<double> xva_multiple;
    /// mean(1_ex (U_ex,j - U_noex,j) / B(T_e)): contribution to V-hat(0).
    std::vector<double> xva_in_price;
    double xva_in_price_se_total = 0.0;

    std::vector<char> exercised;
    std::vector<char> exercised_no_xva;
    /// Conditional expectations this valuation stands for: branches (N - n) M,
    /// two branches when a netting set is held and one otherwise.
    std::size_t conditional_expectations = 0;
};

/// Exercise decision with adjustments at expiry, then phase-2 rollback of
/// the decided economic value. Cash settlement carries no adjustments.
ExerciseReport price_with_xva_boundary(const PathSet& ps, const SwaptionSpec& option, const XvaContext& ctx);

}  // namespace xvab
