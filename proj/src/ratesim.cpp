#include "xvab/ratesim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "xvab/parallel.hpp"
#include "xvab/rng.hpp"

namespace xvab {

namespace {

bool strictly_increasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) return false;
    return true;
}

std::size_t first_tenor_after(const std::vector<double>& tenors, double t) {
    std::size_t k = 0;
    while (k < tenors.size() && tenors[k] <= t + kDateTolerance) ++k;
    return k;
}

double rolled_numeraire(const LmmParams& p, std::span<const double> fwd, double t, std::size_t q) {
    const std::size_t K = p.num_forwards();
    double b = 1.0;
    for (std::size_t j = 0; j < std::min(q, K); ++j) b *= 1.0 + p.accrual(j) * fwd[j];
    if (q <= K) b /= 1.0 + (p.tenor_grid[q] - t) * fwd[q - 1];
    return b;
}

}  // namespace

void CirParams::validate(std::size_t buckets) const {
    if (!(theta > 0.0)) throw std::invalid_argument("cir.theta must be > 0");
    if (x0 != 1.0) throw std::invalid_argument("cir.x0 must equal 1");
    if (eta.size() != buckets)
        throw std::invalid_argument("cir.eta needs one entry per tenor bucket (" +
                                    std::to_string(buckets) + ")");
    for (double e : eta)
        if (!(e >= 0.0) || !std::isfinite(e)) throw std::invalid_argument("cir.eta must be finite and >= 0");
}

void LmmParams::validate() const {
    if (tenor_grid.size() < 2) throw std::invalid_argument("tenor_grid needs at least two dates");
    if (std::abs(tenor_grid.front()) > kDateTolerance) throw std::invalid_argument("tenor_grid must start at 0");
    if (!strictly_increasing(tenor_grid)) throw std::invalid_argument("tenor_grid must be strictly increasing");
    const std::size_t K = tenor_grid.size() - 1;
    if (initial_forwards.size() != K) throw std::invalid_argument("initial_forwards needs one rate per tenor period");
    if (shifts.size() != K) throw std::invalid_argument("shifts needs one entry per tenor period");
    for (std::size_t k = 0; k < K; ++k) {
        if (!(shifts[k] >= 0.0)) throw std::invalid_argument("shifts must be >= 0");
        if (!std::isfinite(initial_forwards[k]) || !(initial_forwards[k] + shifts[k] > 0.0))
            throw std::invalid_argument("initial forward " + std::to_string(k) + " must exceed -shift");
    }
    if (vol_loadings.size() != K) throw std::invalid_argument("vol_loadings needs one bucket per tenor period");
    for (std::size_t m = 0; m < K; ++m) {
        if (vol_loadings[m].size() != K - m - 1)
            throw std::invalid_argument("vol_loadings bucket " + std::to_string(m) + " must hold " +
                                        std::to_string(K - m - 1) + " loadings (one per live forward)");
        for (const auto& l : vol_loadings[m])
            if (!std::isfinite(l[0]) || !std::isfinite(l[1])) throw std::invalid_argument("loadings must be finite");
    }
    cir.validate(K);
    if (initial_discounts.size() != K + 1) throw std::invalid_argument("initial_discounts not populated");
}

LmmParams make_lmm_params(std::vector<double> tenor_grid, std::vector<double> initial_forwards,
                          std::vector<double> shifts, std::vector<std::vector<Loading>> vol_loadings,
                          CirParams cir) {
    LmmParams p;
    p.tenor_grid = std::move(tenor_grid);
    p.initial_forwards = std::move(initial_forwards);
    p.shifts = std::move(shifts);
    p.vol_loadings = std::move(vol_loadings);
    p.cir = std::move(cir);
    if (p.tenor_grid.size() == p.initial_forwards.size() + 1) {
        p.initial_discounts.assign(1, 1.0);
        for (std::size_t k = 0; k < p.initial_forwards.size(); ++k)
            p.initial_discounts.push_back(p.initial_discounts.back() /
                                          (1.0 + (p.tenor_grid[k + 1] - p.tenor_grid[k]) * p.initial_forwards[k]));
    }
    p.validate();
    return p;
}

std::vector<std::vector<Loading>> stationary_loadings(std::size_t num_forwards,
                                                      const std::vector<Loading>& by_reset) {
    if (num_forwards == 0) throw std::invalid_argument("num_forwards must be > 0");
    if (by_reset.size() + 1 < num_forwards)
        throw std::invalid_argument("stationary loadings need num_forwards - 1 entries");
    std::vector<std::vector<Loading>> out(num_forwards);
    for (std::size_t m = 0; m < num_forwards; ++m)
        out[m].assign(by_reset.begin(), by_reset.begin() + static_cast<std::ptrdiff_t>(num_forwards - m - 1));
    return out;
}

std::vector<double> regular_grid(double horizon, double step) {
    if (!(step > 0.0) || !(horizon > 0.0)) throw std::invalid_argument("regular_grid: horizon and step must be > 0");
    const auto n = static_cast<std::size_t>(std::llround(horizon / step));
    if (std::abs(static_cast<double>(n) * step - horizon) > 1e-9)
        throw std::invalid_argument("regular_grid: horizon must be a multiple of step");
    std::vector<double> g(n + 1);
    for (std::size_t i = 0; i <= n; ++i) g[i] = static_cast<double>(i) * horizon / static_cast<double>(n);
    return g;
}

double evolve_cir(double x, double theta, double eta, double dt, double z) {
    if (!(dt > 0.0)) throw std::invalid_argument("evolve_cir: dt must be > 0");
    const double xp = std::max(x, 0.0);
    const double next = x + theta * (1.0 - xp) * dt + eta * std::sqrt(xp * dt) * z;
    return std::max(next, 0.0);
}

std::size_t PathSet::date_index(double t) const {
    const auto it = std::lower_bound(grid_.begin(), grid_.end(), t - kDateTolerance);
    if (it == grid_.end() || std::abs(*it - t) > kDateTolerance)
        throw std::invalid_argument("date " + std::to_string(t) + " is not on the simulation grid");
    return static_cast<std::size_t>(it - grid_.begin());
}

bool PathSet::on_grid(double t) const {
    const auto it = std::lower_bound(grid_.begin(), grid_.end(), t - kDateTolerance);
    return it != grid_.end() && std::abs(*it - t) <= kDateTolerance;
}

PathSet simulate_paths(const LmmParams& params, std::vector<double> grid, std::size_t n_paths,
                       std::uint64_t seed) {
    params.validate();
    if (n_paths < 1) throw std::invalid_argument("n_paths must be >= 1");
    if (grid.size() < 2 || std::abs(grid.front()) > kDateTolerance)
        throw std::invalid_argument("simulation grid must start at 0 and have at least two dates");
    if (!strictly_increasing(grid)) throw std::invalid_argument("simulation grid must be strictly increasing");
    const auto& tenors = params.tenor_grid;
    if (grid.back() > tenors.back() + kDateTolerance)
        throw std::invalid_argument("simulation grid extends past the last tenor date");
    for (double T : tenors) {
        if (T > grid.back() + kDateTolerance) break;
        const bool found = std::any_of(grid.begin(), grid.end(),
                                       [T](double g) { return std::abs(g - T) <= kDateTolerance; });
        if (!found) throw std::invalid_argument("simulation grid must contain tenor date " + std::to_string(T));
    }

    PathSet ps;
    ps.params_ = params;
    ps.grid_ = std::move(grid);
    ps.n_paths_ = n_paths;
    ps.seed_ = seed;
    const std::size_t K = params.num_forwards();
    const std::size_t D = ps.grid_.size();
    ps.next_reset_.resize(D);
    for (std::size_t d = 0; d < D; ++d) ps.next_reset_[d] = first_tenor_after(tenors, ps.grid_[d]);
    ps.forwards_.assign(n_paths * D * K, 0.0);
    ps.variance_.assign(n_paths * D, 0.0);
    ps.numeraire_.assign(n_paths * D, 0.0);

    const auto& shifts = params.shifts;
    parallel_for(n_paths, [&](std::size_t begin, std::size_t end) {
        std::vector<double> L(K), Lpred(K), y(K), drift(K), corrected(K), diffusion(K);
        for (std::size_t path = begin; path < end; ++path) {
            NormalStream normal(seed, path);
            L = params.initial_forwards;
            double x = params.cir.x0;
            auto store = [&](std::size_t d) {
                std::copy(L.begin(), L.end(), ps.forwards_.begin() + static_cast<std::ptrdiff_t>((path * D + d) * K));
                ps.variance_[path * D + d] = x;
                ps.numeraire_[path * D + d] = rolled_numeraire(params, L, ps.grid_[d], ps.next_reset_[d]);
            };
            store(0);
            for (std::size_t d = 0; d + 1 < D; ++d) {
                const double dt = ps.grid_[d + 1] - ps.grid_[d];
                const std::size_t q = ps.next_reset_[d];
                const std::size_t bucket = q - 1;
                const double z1 = normal(), z2 = normal(), zv = normal();
                const double sx = std::sqrt(std::max(x, 0.0));
                const double sdt = std::sqrt(dt);

                // drift of log(L_k + s_k), per unit time
                auto log_drift = [&](const std::vector<double>& fw, std::vector<double>& out) {
                    double a0 = 0.0, a1 = 0.0;
                    for (std::size_t k = q; k < K; ++k) {
                        const Loading& lam = params.loading(bucket, k);
                        const double tau = params.accrual(k);
                        const double w = tau * (fw[k] + shifts[k]) / (1.0 + tau * fw[k]);
                        a0 += w * lam[0];
                        a1 += w * lam[1];
                        const double norm2 = lam[0] * lam[0] + lam[1] * lam[1];
                        out[k] = x * (lam[0] * a0 + lam[1] * a1) - 0.5 * x * norm2;
                    }
                };

                for (std::size_t k = q; k < K; ++k) {
                    const Loading& lam = params.loading(bucket, k);
                    y[k] = std::log(L[k] + shifts[k]);
                    diffusion[k] = sx * (lam[0] * z1 + lam[1] * z2) * sdt;
                }
                log_drift(L, drift);
                Lpred = L;
                // a zero increment leaves the forward untouched (exp(log f) != f in floating point)
                for (std::size_t k = q; k < K; ++k) {
                    const double inc = drift[k] * dt + diffusion[k];
                    if (inc != 0.0) Lpred[k] = std::exp(y[k] + inc) - shifts[k];
                }
                log_drift(Lpred, corrected);
                for (std::size_t k = q; k < K; ++k) {
                    const double inc = 0.5 * (drift[k] + corrected[k]) * dt + diffusion[k];
                    if (inc != 0.0) L[k] = std::exp(y[k] + inc) - shifts[k];
                }

                x = evolve_cir(x, params.cir.theta, params.cir.eta[bucket], dt, zv);
                store(d + 1);
            }
        }
    });
    return ps;
}

CurveAt::CurveAt(const PathSet& ps, std::size_t path, std::size_t date, double bump)
    : params_(&ps.params()),
      fwd_(ps.forwards(path, date)),
      t_(ps.date_grid()[date]),
      bump_(bump),
      q_(ps.next_reset(date)) {
    const std::size_t K = params_->num_forwards();
    if (q_ > K) {
        stub_rate_ = 0.0;
        return;
    }
    stub_rate_ = fwd_[q_ - 1] + bump_;
    tenor_discounts_.resize(K - q_ + 1);
    double p = 1.0 / (1.0 + (params_->tenor_grid[q_] - t_) * stub_rate_);
    tenor_discounts_[0] = p;
    for (std::size_t k = q_; k < K; ++k) {
        p /= 1.0 + params_->accrual(k) * (fwd_[k] + bump_);
        tenor_discounts_[k - q_ + 1] = p;
    }
}

double CurveAt::discount(double maturity) const {
    if (maturity < t_ - kDateTolerance) throw std::invalid_argument("discount: maturity before curve date");
    const auto& tenors = params_->tenor_grid;
    const std::size_t K = params_->num_forwards();
    if (maturity > tenors.back() + kDateTolerance) throw std::invalid_argument("discount: maturity beyond tenor grid");
    if (maturity <= t_ + kDateTolerance || q_ > K) return 1.0;
    const double Tq = tenors[q_];
    if (maturity <= Tq + kDateTolerance)
        return (1.0 + (Tq - maturity) * stub_rate_) / (1.0 + (Tq - t_) * stub_rate_);
    // maturity in (T_k, T_{k+1}]
    const auto it = std::lower_bound(tenors.begin(), tenors.end(), maturity - kDateTolerance);
    const auto k1 = static_cast<std::size_t>(it - tenors.begin());
    if (std::abs(tenors[k1] - maturity) <= kDateTolerance) return tenor_discounts_[k1 - q_];
    const std::size_t k = k1 - 1;
    return tenor_discounts_[k - q_] / (1.0 + (maturity - tenors[k]) * (fwd_[k] + bump_));
}

double CurveAt::numeraire() const {
    return rolled_numeraire(*params_, fwd_, t_, q_);
}

double discount_factor(const PathSet& ps, std::size_t path, double t, double maturity) {
    if (t > maturity + kDateTolerance) throw std::invalid_argument("discount_factor: t > T");
    if (path >= ps.n_paths()) throw std::out_of_range("discount_factor: path index");
    return CurveAt(ps, path, ps.date_index(t)).discount(maturity);
}

}  // namespace xvab
