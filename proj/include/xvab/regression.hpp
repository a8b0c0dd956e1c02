#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "xvab/ratesim.hpp"

namespace xvab {

enum class RegressionMethod { Local, Quadratic };

struct LocalRegressionConfig {
    std::size_t bandwidth = 15;
    /// Quadratic least squares instead of the averaging filter.
    RegressionMethod method = RegressionMethod::Local;
};

/// Fitted estimator of E[y | x]. Local fits are piecewise linear through
/// smoothed knots; quadratic fits evaluate a polynomial. Both clamp x to
/// the fitted range.
class RegressionSurface {
public:
    double predict(double x) const;

    RegressionMethod method() const { return method_; }
    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& ordinates() const { return ordinates_; }
    std::size_t sample_count() const { return samples_; }
    double r_squared() const { return r_squared_; }

    double observation_date = 0.0;
    std::string quantity_id;

private:
    friend class RegressionBasis;

    RegressionMethod method_ = RegressionMethod::Local;
    std::vector<double> knots_;
    std::vector<double> ordinates_;
    double coeffs_[3] = {0.0, 0.0, 0.0};
    double x_mean_ = 0.0, x_scale_ = 1.0;
    double x_min_ = 0.0, x_max_ = 0.0;
    std::size_t samples_ = 0;
    double r_squared_ = 0.0;
};

/// Sorted, tie-merged regressor values shared by every target regressed at
/// one observation date.
///
/// Local smoothing: knot k averages the samples of a window of knots grown
/// outward from k, alternating sides, until it holds at least `bandwidth`
/// samples. Windows are shifted (not reflected) at the ends, so every
/// window of an untied sample holds exactly min(bandwidth, n) points.
class RegressionBasis {
public:
    RegressionBasis(std::span<const double> xs, LocalRegressionConfig cfg);

    RegressionSurface fit(std::span<const double> ys) const;
    /// fit(ys) evaluated back at each sample's own regressor value.
    std::vector<double> fit_predict(std::span<const double> ys) const;

    std::size_t size() const { return sample_knot_.size(); }
    std::size_t knot_count() const { return knots_.size(); }
    const LocalRegressionConfig& config() const { return cfg_; }

private:
    void check(std::span<const double> ys) const;
    std::vector<double> smoothed(std::span<const double> ys) const;

    LocalRegressionConfig cfg_;
    std::vector<double> xs_;
    std::vector<double> knots_;
    std::vector<std::size_t> counts_;
    std::vector<std::size_t> sample_knot_;
    std::vector<std::size_t> window_lo_, window_hi_;
};

RegressionSurface fit_local_regression(std::span<const double> xs, std::span<const double> ys,
                                       const LocalRegressionConfig& cfg);

/// Regressor definitions. Phase 1 (maturity back to expiry): mean of the
/// pathwise discount factors P(t, T_k) over the tenor dates T_k in
/// (t, maturity]. Phase 2 (expiry back to today): the deflator 1 / B(t).
struct RegressorSpec {
    int phase = 1;
    double maturity = 0.0;
};

std::vector<double> regressor_values(const PathSet& ps, std::size_t date, const RegressorSpec& spec);

/// Which exercise branch a regression target belongs to.
enum class Branch { Exercise = 0, NoExercise = 1 };

/// Pathwise realisations of gamma_j(t_i)^delta_j for every branch, term j
/// and date t_i >= the observation date. targets[branch][term][i][path]
/// with i counted from the observation date.
struct TargetCube {
    std::vector<std::string> term_names;
    std::vector<double> dates;  // t_n, ..., t_N
    std::vector<std::vector<std::vector<std::vector<double>>>> targets;
};

struct ConditionalExpectations {
    struct Key {
        Branch branch;
        std::size_t term;
        std::size_t date;  // index into TargetCube::dates, >= 1
    };
    std::vector<Key> keys;
    std::vector<RegressionSurface> surfaces;

    std::size_t size() const { return surfaces.size(); }
};

/// One surface per (branch, term, date strictly after the observation
/// date): 2 x (N - n) x M surfaces when both branches are present.
ConditionalExpectations fit_conditional_expectations(const RegressionBasis& basis, const TargetCube& cube,
                                                     double observation_date);

}  // namespace xvab
