#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "xvab/instruments.hpp"
#include "xvab/ratesim.hpp"

namespace xvab {

/// Negative mean of the worst ceil((1 - level) n) outcomes of a P&L vector,
/// i.e. a positive number when the tail is made of losses.
double expected_shortfall(std::span<const double> pnl, double level);

/// Absolute zero-yield shocks, one row per historical day, one column per
/// tenor point (time to maturity in years).
struct ShockSeries {
    std::vector<double> tenors;
    Eigen::MatrixXd shocks;  // days x tenors

    std::size_t days() const { return static_cast<std::size_t>(shocks.rows()); }
    void validate() const;
    /// Shock at time-to-maturity tau for row `day`: linear in tau, flat outside.
    double at(std::size_t day, double tau) const;
};

/// Text format: a header line of comma-separated tenors, then one line of
/// comma-separated decimal shocks per day. Blank lines are ignored.
ShockSeries parse_shock_series(std::istream& in);
ShockSeries read_shock_series(const std::string& path);

struct SyntheticShockConfig {
    std::vector<double> tenors{0.25, 0.5, 1, 2, 3, 5, 7, 10, 15, 20};
    /// Daily standard deviation per tenor (decimal).
    std::vector<double> daily_vol{0.0005, 0.0005, 0.0006, 0.0006, 0.0006, 0.0006, 0.0006, 0.0006, 0.0005, 0.0005};
    /// Correlation exp(-|tau_i - tau_j| / length) between tenor points.
    double correlation_length = 8.0;
    std::size_t days = 2500;
    std::uint64_t seed = 7;
};
ShockSeries synthetic_shock_series(const SyntheticShockConfig& cfg);

struct ImConfig {
    double es_level = 0.975;
    double horizon_scale = 1.4142135623730951;
    std::size_t overlap_days = 5;

    void validate() const;
};

struct MarginPair {
    double posted = 0.0;    // I_B: covers the counterparty's loss if we default
    double received = 0.0;  // I_C: covers our loss if the counterparty defaults
};

/// Historical-simulation ES margin. Daily shocks are summed over
/// `overlap_days`-day overlapping windows; each window is applied to the
/// pathwise zero curve as P(t,T) exp(-dz(T-t) (T-t)).
class InitialMarginModel {
public:
    InitialMarginModel(const ShockSeries& daily, ImConfig cfg);

    std::size_t scenario_count() const { return static_cast<std::size_t>(scenarios_.rows()); }
    const ImConfig& config() const { return cfg_; }

    MarginPair margin(const CurveAt& curve, std::span<const Cashflow> flows) const;
    /// Both margins for every path at grid date `date`, batched over paths.
    std::vector<MarginPair> margin_all_paths(const PathSet& ps, std::size_t date,
                                             std::span<const SwapSpec> book) const;

private:
    Eigen::MatrixXd factors(double t, std::span<const double> times) const;

    ImConfig cfg_;
    std::vector<double> tenors_;
    Eigen::MatrixXd scenarios_;  // windows x tenors
};

/// I_B for one path, building the margin model from scratch.
double compute_im(const PathSet& ps, std::size_t path, double t, std::span<const SwapSpec> portfolio,
                  const ShockSeries& shocks, const ImConfig& cfg);

struct YieldShiftRow {
    double max_maturity;       // years to maturity, upper bucket edge
    double shift_high_coupon;  // decimal
    double shift_low_coupon;
};

struct CapitalConfig {
    std::string counterparty_rating = "BB";
    double risk_weight = 1.0;
    double capital_ratio = 0.08;
    /// (upper maturity edge in years, add-on as a fraction of notional).
    std::vector<std::pair<double, double>> ccr_addons{
        {1.0, 0.0}, {5.0, 0.005}, {std::numeric_limits<double>::infinity(), 0.015}};
    std::array<double, 3> vol_scenarios{0.75, 1.0, 1.25};
    std::vector<YieldShiftRow> yield_shifts{
        {1.0, 0.0100, 0.0100}, {2.0, 0.0090, 0.0090}, {3.0, 0.0080, 0.0075},
        {5.0, 0.0075, 0.0070}, {7.0, 0.0070, 0.0065}, {10.0, 0.0065, 0.0060},
        {std::numeric_limits<double>::infinity(), 0.0060, 0.0060}};
    /// Coupons at or above this use the high-coupon column.
    double coupon_threshold = 0.03;
    bool market_risk = true;

    void validate() const;
    double addon(double maturity) const;
    double yield_shift(double maturity, double coupon) const;
};

/// Worst loss over the 3 x 3 grid of (vol multiplier, yield direction in
/// {-1, 0, +1}), floored at 0. `value` returns the scenario value change.
using ScenarioValuer = std::function<double(double vol_multiplier, double yield_direction)>;
double scenario_grid_capital(const ScenarioValuer& value_change, const CapitalConfig& cfg);

/// Swaps are linear, so the vol axis leaves their value unchanged; each
/// swap takes the yield shift of its own (remaining maturity, coupon) row.
double market_risk_capital(const PathSet& ps, std::size_t path, double t, std::span<const SwapSpec> portfolio,
                           const CapitalConfig& cfg);

double ccr_capital(double V, double notional, double maturity, const CapitalConfig& cfg);

/// K(t) = K_CCR + K_MR per date and path ([date][path]) over `dates`
/// (grid indices). The CCR leg uses the book value, the gross notional of
/// live swaps and the longest remaining maturity.
std::vector<std::vector<double>> total_capital_profile(const PathSet& ps, std::span<const SwapSpec> portfolio,
                                                       const CapitalConfig& cfg, std::span<const std::size_t> dates);

/// Capital for a book on one path and date with precomputed flows per swap.
double book_capital(const CurveAt& curve, std::span<const SwapSpec> book,
                    std::span<const std::vector<Cashflow>> flows, const CapitalConfig& cfg);

}  // namespace xvab
