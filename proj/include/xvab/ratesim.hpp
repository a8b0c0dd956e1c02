#pragma once

// Shifted two-factor LIBOR market model with a common CIR stochastic
// variance, simulated under the spot-LIBOR measure.
//
//   dL_k = (L_k + s_k) sqrt(x) lambda_k . [ mu_k dt + dW ]
//   mu_k = sqrt(x) sum_{j=q(t)}^{k} tau_j (L_j + s_j) lambda_j / (1 + tau_j L_j)
//   dx   = theta (1 - x) dt + eta(t) sqrt(x) dZ,   dZ dW = 0,   x(0) = 1
//
// q(t) is the index of the first tenor date strictly after t. The forwards
// are stepped in log(L + s) with a predictor-corrector drift; the variance
// uses full-truncation Euler. The numeraire is the discretely rolled
// money-market account
//
//   B(t) = P(t, T_q) prod_{j<q} (1 + tau_j L_j(T_j)),
//
// where the front stub P(t, T_q) accrues the already fixed L_{q-1} simply.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace xvab {

using Loading = std::array<double, 2>;

struct CirParams {
    double theta = 1.0;
    /// Vol-of-vol per tenor bucket [T_m, T_{m+1}).
    std::vector<double> eta;
    double x0 = 1.0;

    void validate(std::size_t buckets) const;
};

struct LmmParams {
    /// T_0 = 0 < T_1 < ... < T_K.
    std::vector<double> tenor_grid;
    /// L_k on [T_k, T_{k+1}], k = 0..K-1.
    std::vector<double> initial_forwards;
    std::vector<double> shifts;
    /// vol_loadings[m] holds the loadings of the forwards still alive on
    /// [T_m, T_{m+1}), i.e. L_{m+1} .. L_{K-1}, in that order.
    std::vector<std::vector<Loading>> vol_loadings;
    CirParams cir;
    /// P(0, T_k), k = 0..K. Filled by make_lmm_params().
    std::vector<double> initial_discounts;

    std::size_t num_forwards() const { return initial_forwards.size(); }
    double accrual(std::size_t k) const { return tenor_grid[k + 1] - tenor_grid[k]; }
    /// Loading of forward k while t lies in bucket m (requires k > m).
    const Loading& loading(std::size_t bucket, std::size_t k) const {
        return vol_loadings[bucket][k - bucket - 1];
    }
    void validate() const;
};

LmmParams make_lmm_params(std::vector<double> tenor_grid,
                          std::vector<double> initial_forwards,
                          std::vector<double> shifts,
                          std::vector<std::vector<Loading>> vol_loadings,
                          CirParams cir);

/// Time-homogeneous loadings: forward k in bucket m gets by_reset[k - m - 1],
/// i.e. the loading depends only on how many resets away the forward is.
std::vector<std::vector<Loading>> stationary_loadings(std::size_t num_forwards,
                                                      const std::vector<Loading>& by_reset);

/// 0, step, 2 step, ... horizon (inclusive).
std::vector<double> regular_grid(double horizon, double step);

/// Full-truncation Euler step of dx = theta(1-x)dt + eta sqrt(x) dZ.
double evolve_cir(double x, double theta, double eta, double dt, double z);

/// Tolerance used when matching dates against grids.
inline constexpr double kDateTolerance = 1e-9;

class PathSet {
public:
    std::size_t n_paths() const { return n_paths_; }
    std::size_t n_dates() const { return grid_.size(); }
    const std::vector<double>& date_grid() const { return grid_; }
    const LmmParams& params() const { return params_; }
    std::uint64_t seed() const { return seed_; }

    /// Index of t on the simulation grid; throws std::invalid_argument when off grid.
    std::size_t date_index(double t) const;
    bool on_grid(double t) const;
    /// Index of the first tenor date strictly after grid date d (K+1 past the end).
    std::size_t next_reset(std::size_t date) const { return next_reset_[date]; }

    /// Forward curve on (path, date). Forwards are frozen at their fixing
    /// once their reset date has passed.
    std::span<const double> forwards(std::size_t path, std::size_t date) const {
        const std::size_t k = params_.num_forwards();
        return {forwards_.data() + (path * grid_.size() + date) * k, k};
    }
    double variance(std::size_t path, std::size_t date) const {
        return variance_[path * grid_.size() + date];
    }
    double numeraire(std::size_t path, std::size_t date) const {
        return numeraire_[path * grid_.size() + date];
    }

private:
    friend PathSet simulate_paths(const LmmParams&, std::vector<double>, std::size_t, std::uint64_t);

    LmmParams params_;
    std::vector<double> grid_;
    std::vector<std::size_t> next_reset_;
    std::size_t n_paths_ = 0;
    std::uint64_t seed_ = 0;
    std::vector<double> forwards_;
    std::vector<double> variance_;
    std::vector<double> numeraire_;
};

/// Simulates n_paths paths on grid (must start at 0 and contain every tenor
/// date up to its end). Path i draws from its own substream, so results do
/// not depend on n_paths or on the degree of parallelism.
PathSet simulate_paths(const LmmParams& params, std::vector<double> grid, std::size_t n_paths,
                       std::uint64_t seed);

/// Discount curve implied by one path at one grid date, optionally with all
/// forwards shifted in parallel by `bump`.
class CurveAt {
public:
    CurveAt(const PathSet& ps, std::size_t path, std::size_t date, double bump = 0.0);

    double time() const { return t_; }
    /// P(t, T) for t <= T <= T_K.
    double discount(double maturity) const;
    /// Rolled money-market account B(t) implied by the same curve.
    double numeraire() const;

private:
    const LmmParams* params_;
    std::span<const double> fwd_;
    double t_;
    double bump_;
    std::size_t q_;
    double stub_rate_;
    /// P(t, T_k) for k = q..K, stored at index k - q.
    std::vector<double> tenor_discounts_;
};

/// P(t, T) on `path`; t must be a grid date.
double discount_factor(const PathSet& ps, std::size_t path, double t, double maturity);

}  // namespace xvab
