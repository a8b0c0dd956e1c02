#pragma once

#include <cmath>
#include <numeric>
#include <vector>

#include "xvab/ratesim.hpp"

namespace xvab::testing {

/// Flat simple forwards on a regular tenor grid with identical two-factor
/// loadings (vol, 0.3 vol) for every forward.
inline LmmParams flat_model(double horizon, double step, double forward, double vol, double eta = 0.0,
                            double shift = 0.0) {
    const auto tenors = regular_grid(horizon, step);
    const std::size_t K = tenors.size() - 1;
    std::vector<Loading> by_reset(K > 1 ? K - 1 : 1, Loading{vol, 0.3 * vol});
    CirParams cir;
    cir.theta = 1.0;
    cir.eta.assign(K, eta);
    return make_lmm_params(tenors, std::vector<double>(K, forward), std::vector<double>(K, shift),
                           stationary_loadings(K, by_reset), cir);
}

inline PathSet flat_paths(double horizon, double step, double forward, double vol, std::size_t n_paths,
                          std::uint64_t seed = 11, double eta = 0.0, double steps_per_year = 12.0) {
    return simulate_paths(flat_model(horizon, step, forward, vol, eta), regular_grid(horizon, 1.0 / steps_per_year),
                          n_paths, seed);
}

inline double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double std_error(const std::vector<double>& v) {
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace xvab::testing
