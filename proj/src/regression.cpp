#include "xvab/regression.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace xvab {

double RegressionSurface::predict(double x) const {
    if (method_ == RegressionMethod::Quadratic) {
        const double z = (std::clamp(x, x_min_, x_max_) - x_mean_) / x_scale_;
        return coeffs_[0] + z * (coeffs_[1] + z * coeffs_[2]);
    }
    if (knots_.empty()) return 0.0;
    if (x <= knots_.front()) return ordinates_.front();
    if (x >= knots_.back()) return ordinates_.back();
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    const auto hi = static_cast<std::size_t>(it - knots_.begin());
    const std::size_t lo = hi - 1;
    if (x == knots_[lo]) return ordinates_[lo];
    const double w = (x - knots_[lo]) / (knots_[hi] - knots_[lo]);
    return ordinates_[lo] + w * (ordinates_[hi] - ordinates_[lo]);
}

RegressionBasis::RegressionBasis(std::span<const double> xs, LocalRegressionConfig cfg)
    : cfg_(cfg), xs_(xs.begin(), xs.end()) {
    const std::size_t n = xs.size();
    if (n == 0) throw std::invalid_argument("regression needs at least one sample");
    if (cfg_.bandwidth < 1) throw std::invalid_argument("bandwidth must be >= 1");
    if (cfg_.bandwidth > n) throw std::invalid_argument("bandwidth exceeds sample size");
    for (double x : xs)
        if (!std::isfinite(x)) throw std::invalid_argument("regressor values must be finite");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });

    sample_knot_.resize(n);
    for (std::size_t idx : order) {
        if (knots_.empty() || xs[idx] != knots_.back()) {
            knots_.push_back(xs[idx]);
            counts_.push_back(0);
        }
        ++counts_.back();
        sample_knot_[idx] = knots_.size() - 1;
    }

    const std::size_t K = knots_.size();
    window_lo_.resize(K);
    window_hi_.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        std::size_t lo = k, hi = k, left = 0, right = 0, held = counts_[k];
        while (held < cfg_.bandwidth) {
            const bool can_left = lo > 0, can_right = hi + 1 < K;
            if (can_left && (left <= right || !can_right)) {
                --lo;
                left += counts_[lo];
                held += counts_[lo];
            } else if (can_right) {
                ++hi;
                right += counts_[hi];
                held += counts_[hi];
            } else {
                break;
            }
        }
        window_lo_[k] = lo;
        window_hi_[k] = hi;
    }
}

void RegressionBasis::check(std::span<const double> ys) const {
    if (ys.size() != xs_.size()) throw std::invalid_argument("regressor and target lengths differ");
}

std::vector<double> RegressionBasis::smoothed(std::span<const double> ys) const {
    const std::size_t K = knots_.size();
    std::vector<double> knot_sum(K, 0.0);
    for (std::size_t i = 0; i < ys.size(); ++i) knot_sum[sample_knot_[i]] += ys[i];
    std::vector<double> out(K);
    for (std::size_t k = 0; k < K; ++k) {
        double s = 0.0;
        std::size_t c = 0;
        for (std::size_t j = window_lo_[k]; j <= window_hi_[k]; ++j) {
            s += knot_sum[j];
            c += counts_[j];
        }
        out[k] = s / static_cast<double>(c);
    }
    return out;
}

RegressionSurface RegressionBasis::fit(std::span<const double> ys) const {
    check(ys);
    RegressionSurface surface;
    surface.method_ = cfg_.method;
    surface.samples_ = ys.size();
    surface.x_min_ = knots_.front();
    surface.x_max_ = knots_.back();

    if (cfg_.method == RegressionMethod::Local) {
        surface.knots_ = knots_;
        surface.ordinates_ = smoothed(ys);
    } else {
        const std::size_t n = ys.size();
        const double mean = std::accumulate(xs_.begin(), xs_.end(), 0.0) / static_cast<double>(n);
        double var = 0.0;
        for (double x : xs_) var += (x - mean) * (x - mean);
        const double sd = std::sqrt(var / static_cast<double>(n));
        surface.x_mean_ = mean;
        surface.x_scale_ = sd > 0.0 ? sd : 1.0;
        const int cols = sd > 0.0 ? (knots_.size() > 2 ? 3 : 2) : 1;
        Eigen::MatrixXd A(static_cast<Eigen::Index>(n), cols);
        Eigen::VectorXd b(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            const double z = (xs_[i] - mean) / surface.x_scale_;
            const auto r = static_cast<Eigen::Index>(i);
            A(r, 0) = 1.0;
            if (cols > 1) A(r, 1) = z;
            if (cols > 2) A(r, 2) = z * z;
            b(r) = ys[i];
        }
        const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
        for (int j = 0; j < cols; ++j) surface.coeffs_[j] = c(j);
    }

    double mean_y = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
    double ss_tot = 0.0, ss_res = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        const double fitted = cfg_.method == RegressionMethod::Local ? surface.ordinates_[sample_knot_[i]]
                                                                     : surface.predict(xs_[i]);
        ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
        ss_res += (ys[i] - fitted) * (ys[i] - fitted);
    }
    surface.r_squared_ = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return surface;
}

std::vector<double> RegressionBasis::fit_predict(std::span<const double> ys) const {
    check(ys);
    std::vector<double> out(ys.size());
    if (cfg_.method == RegressionMethod::Local) {
        const auto ord = smoothed(ys);
        for (std::size_t i = 0; i < ys.size(); ++i) out[i] = ord[sample_knot_[i]];
    } else {
        const auto surface = fit(ys);
        for (std::size_t i = 0; i < ys.size(); ++i) out[i] = surface.predict(xs_[i]);
    }
    return out;
}

RegressionSurface fit_local_regression(std::span<const double> xs, std::span<const double> ys,
                                       const LocalRegressionConfig& cfg) {
    if (xs.size() != ys.size()) throw std::invalid_argument("regressor and target lengths differ");
    return RegressionBasis(xs, cfg).fit(ys);
}

std::vector<double> regressor_values(const PathSet& ps, std::size_t date, const RegressorSpec& spec) {
    std::vector<double> out(ps.n_paths());
    if (spec.phase == 2) {
        for (std::size_t p = 0; p < ps.n_paths(); ++p) out[p] = 1.0 / ps.numeraire(p, date);
        return out;
    }
    if (spec.phase != 1) throw std::invalid_argument("regressor phase must be 1 or 2");
    const double t = ps.date_grid().at(date);
    std::vector<double> tenors;
    for (double T : ps.params().tenor_grid)
        if (T > t + kDateTolerance && T <= spec.maturity + kDateTolerance) tenors.push_back(T);
    for (std::size_t p = 0; p < ps.n_paths(); ++p) {
        if (tenors.empty()) {
            out[p] = 1.0;
            continue;
        }
        const CurveAt curve(ps, p, date);
        double s = 0.0;
        for (double T : tenors) s += curve.discount(T);
        out[p] = s / static_cast<double>(tenors.size());
    }
    return out;
}

ConditionalExpectations fit_conditional_expectations(const RegressionBasis& basis, const TargetCube& cube,
                                                     double observation_date) {
    if (cube.targets.empty() || cube.dates.empty()) throw std::invalid_argument("no regression targets");
    ConditionalExpectations out;
    for (std::size_t b = 0; b < cube.targets.size(); ++b) {
        const auto& by_term = cube.targets[b];
        for (std::size_t j = 0; j < by_term.size(); ++j) {
            if (by_term[j].size() != cube.dates.size())
                throw std::invalid_argument("target cube dates and realisations disagree");
            for (std::size_t i = 0; i < cube.dates.size(); ++i) {
                if (cube.dates[i] <= observation_date + kDateTolerance) continue;
                auto surface = basis.fit(by_term[j][i]);
                surface.observation_date = observation_date;
                surface.quantity_id = (j < cube.term_names.size() ? cube.term_names[j] : std::to_string(j)) + "@" +
                                      std::to_string(cube.dates[i]);
                out.keys.push_back({static_cast<Branch>(b), j, i});
                out.surfaces.push_back(std::move(surface));
            }
        }
    }
    return out;
}

}  // namespace xvab
