#include "xvab/margin_capital.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "xvab/rng.hpp"

namespace xvab {

namespace {

std::size_t tail_count(std::size_t n, double level) {
    const double raw = (1.0 - level) * static_cast<double>(n);
    const auto k = static_cast<std::size_t>(std::ceil(raw - 1e-9));
    return std::clamp<std::size_t>(k, 1, n);
}

// Sum of the k smallest entries, in ascending order (same order as a full sort).
double low_tail_sum(std::vector<double>& buf, std::size_t k) {
    std::partial_sort(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(k), buf.end());
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += buf[i];
    return s;
}

double interp_flat(std::span<const double> xs, const double* ys, std::ptrdiff_t stride, double x) {
    if (x <= xs.front()) return ys[0];
    if (x >= xs.back()) return ys[(xs.size() - 1) * stride];
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const auto i = static_cast<std::size_t>(it - xs.begin());
    const double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return ys[(i - 1) * stride] + w * (ys[i * stride] - ys[(i - 1) * stride]);
}

std::vector<double> split_csv(const std::string& line, std::size_t line_no) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(cell, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("shock file line " + std::to_string(line_no) + ": not a number: '" + cell + "'");
        }
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
        if (used != cell.size())
            throw std::invalid_argument("shock file line " + std::to_string(line_no) + ": trailing text in '" + cell + "'");
        out.push_back(v);
    }
    return out;
}

}  // namespace

double expected_shortfall(std::span<const double> pnl, double level) {
    if (pnl.empty()) throw std::invalid_argument("expected_shortfall needs at least one sample");
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("ES level must lie in (0, 1)");
    std::vector<double> buf(pnl.begin(), pnl.end());
    const std::size_t k = tail_count(buf.size(), level);
    return -low_tail_sum(buf, k) / static_cast<double>(k);
}

void ShockSeries::validate() const {
    if (tenors.empty()) throw std::invalid_argument("shock series has no tenors");
    for (std::size_t i = 0; i < tenors.size(); ++i) {
        if (!(tenors[i] > 0.0)) throw std::invalid_argument("shock tenors must be > 0");
        if (i > 0 && !(tenors[i] > tenors[i - 1])) throw std::invalid_argument("shock tenors must increase");
    }
    if (static_cast<std::size_t>(shocks.cols()) != tenors.size())
        throw std::invalid_argument("shock matrix width differs from tenor count");
    if (shocks.rows() == 0) throw std::invalid_argument("shock series has no days");
    if (!shocks.allFinite()) throw std::invalid_argument("shock series has non-finite entries");
}

double ShockSeries::at(std::size_t day, double tau) const {
    const Eigen::Index r = static_cast<Eigen::Index>(day);
    return interp_flat(tenors, &shocks(r, 0), shocks.rows(), tau);
}

ShockSeries parse_shock_series(std::istream& in) {
    ShockSeries s;
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        auto values = split_csv(line, line_no);
        if (s.tenors.empty()) {
            s.tenors = std::move(values);
            continue;
        }
        if (values.size() != s.tenors.size())
            throw std::invalid_argument("shock file line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(s.tenors.size()) + " values, got " +
                                        std::to_string(values.size()));
        rows.push_back(std::move(values));
    }
    s.shocks.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(s.tenors.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < s.tenors.size(); ++c)
            s.shocks(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    s.validate();
    return s;
}

ShockSeries read_shock_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open shock file: " + path);
    return parse_shock_series(in);
}

ShockSeries synthetic_shock_series(const SyntheticShockConfig& cfg) {
    const std::size_t n = cfg.tenors.size();
    if (n == 0 || cfg.daily_vol.size() != n) throw std::invalid_argument("synthetic shocks need one vol per tenor");
    if (!(cfg.correlation_length > 0.0)) throw std::invalid_argument("correlation_length must be > 0");
    if (cfg.days == 0) throw std::invalid_argument("synthetic shocks need at least one day");
    const auto N = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd cov(N, N);
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < N; ++j) {
            const double rho = std::exp(-std::abs(cfg.tenors[i] - cfg.tenors[j]) / cfg.correlation_length);
            cov(i, j) = rho * cfg.daily_vol[i] * cfg.daily_vol[j];
        }
    const Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) throw std::invalid_argument("shock covariance is not positive definite");
    const Eigen::MatrixXd L = llt.matrixL();

    ShockSeries s;
    s.tenors = cfg.tenors;
    s.shocks.resize(static_cast<Eigen::Index>(cfg.days), N);
    NormalStream z(cfg.seed, 0);
    Eigen::VectorXd draw(N);
    for (std::size_t d = 0; d < cfg.days; ++d) {
        for (Eigen::Index i = 0; i < N; ++i) draw(i) = z();
        s.shocks.row(static_cast<Eigen::Index>(d)) = (L * draw).transpose();
    }
    s.validate();
    return s;
}

void ImConfig::validate() const {
    if (!(es_level > 0.5 && es_level < 1.0)) throw std::invalid_argument("es_level must lie in (0.5, 1)");
    if (!(horizon_scale > 0.0)) throw std::invalid_argument("horizon_scale must be > 0");
    if (overlap_days < 1) throw std::invalid_argument("overlap_days must be >= 1");
}

InitialMarginModel::InitialMarginModel(const ShockSeries& daily, ImConfig cfg) : cfg_(cfg), tenors_(daily.tenors) {
    cfg_.validate();
    daily.validate();
    const auto days = static_cast<Eigen::Index>(daily.days());
    const auto w = static_cast<Eigen::Index>(cfg_.overlap_days);
    if (days < w) throw std::invalid_argument("shock series shorter than the overlap window");
    scenarios_.resize(days - w + 1, daily.shocks.cols());
    for (Eigen::Index s = 0; s < scenarios_.rows(); ++s) scenarios_.row(s) = daily.shocks.middleRows(s, w).colwise().sum();
}

Eigen::MatrixXd InitialMarginModel::factors(double t, std::span<const double> times) const {
    const Eigen::Index S = scenarios_.rows();
    Eigen::MatrixXd F(S, static_cast<Eigen::Index>(times.size()));
    for (std::size_t m = 0; m < times.size(); ++m) {
        const double tau = times[m] - t;
        const auto c = static_cast<Eigen::Index>(m);
        for (Eigen::Index s = 0; s < S; ++s) {
            const double dz = interp_flat(tenors_, &scenarios_(s, 0), scenarios_.rows(), tau);
            F(s, c) = std::expm1(-dz * tau);
        }
    }
    return F;
}

namespace {

MarginPair margins_from_pnl(std::vector<double>& buf, const ImConfig& cfg) {
    const std::size_t k = tail_count(buf.size(), cfg.es_level);
    const double own_loss = -low_tail_sum(buf, k) / static_cast<double>(k);
    for (double& v : buf) v = -v;
    const double their_loss = -low_tail_sum(buf, k) / static_cast<double>(k);
    return {cfg.horizon_scale * std::max(their_loss, 0.0), cfg.horizon_scale * std::max(own_loss, 0.0)};
}

}  // namespace

MarginPair InitialMarginModel::margin(const CurveAt& curve, std::span<const Cashflow> flows) const {
    if (flows.empty()) return {};
    std::vector<double> times;
    Eigen::VectorXd g(static_cast<Eigen::Index>(flows.size()));
    for (std::size_t m = 0; m < flows.size(); ++m) {
        times.push_back(flows[m].time);
        g(static_cast<Eigen::Index>(m)) = flows[m].amount * curve.discount(flows[m].time);
    }
    const Eigen::VectorXd pnl = factors(curve.time(), times) * g;
    std::vector<double> buf(pnl.data(), pnl.data() + pnl.size());
    return margins_from_pnl(buf, cfg_);
}

std::vector<MarginPair> InitialMarginModel::margin_all_paths(const PathSet& ps, std::size_t date,
                                                             std::span<const SwapSpec> book) const {
    const std::size_t P = ps.n_paths();
    std::vector<MarginPair> out(P);
    if (book.empty()) return out;
    const double t = ps.date_grid().at(date);

    // Flow dates do not depend on the path, only the amounts do.
    std::vector<double> times;
    for (const auto& swap : book)
        for (const auto& cf : remaining_cashflows(ps, 0, date, swap)) times.push_back(cf.time);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end(),
                            [](double a, double b) { return std::abs(a - b) <= kDateTolerance; }),
                times.end());
    if (times.empty()) return out;
    const Eigen::MatrixXd F = factors(t, times);
    const auto M = static_cast<Eigen::Index>(times.size());

    constexpr std::size_t kBlock = 512;
    std::vector<double> buf(static_cast<std::size_t>(F.rows()));
    for (std::size_t p0 = 0; p0 < P; p0 += kBlock) {
        const std::size_t np = std::min(kBlock, P - p0);
        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(M, static_cast<Eigen::Index>(np));
        for (std::size_t j = 0; j < np; ++j) {
            const CurveAt curve(ps, p0 + j, date);
            for (const auto& swap : book)
                for (const auto& cf : remaining_cashflows(ps, p0 + j, date, swap)) {
                    const auto it = std::lower_bound(times.begin(), times.end(), cf.time - kDateTolerance);
                    G(it - times.begin(), static_cast<Eigen::Index>(j)) += cf.amount * curve.discount(cf.time);
                }
        }
        const Eigen::MatrixXd pnl = F * G;
        for (std::size_t j = 0; j < np; ++j) {
            const auto col = pnl.col(static_cast<Eigen::Index>(j));
            std::copy(col.data(), col.data() + col.size(), buf.begin());
            out[p0 + j] = margins_from_pnl(buf, cfg_);
        }
    }
    return out;
}

double compute_im(const PathSet& ps, std::size_t path, double t, std::span<const SwapSpec> portfolio,
                  const ShockSeries& shocks, const ImConfig& cfg) {
    const std::size_t d = ps.date_index(t);
    const InitialMarginModel model(shocks, cfg);
    std::vector<Cashflow> flows;
    for (const auto& swap : portfolio) {
        const auto f = remaining_cashflows(ps, path, d, swap);
        flows.insert(flows.end(), f.begin(), f.end());
    }
    return model.margin(CurveAt(ps, path, d), flows).posted;
}

void CapitalConfig::validate() const {
    if (!(risk_weight >= 0.0)) throw std::invalid_argument("risk_weight must be >= 0");
    if (!(capital_ratio >= 0.0)) throw std::invalid_argument("capital_ratio must be >= 0");
    if (ccr_addons.empty()) throw std::invalid_argument("ccr add-on table is empty");
    for (std::size_t i = 0; i < ccr_addons.size(); ++i) {
        if (!(ccr_addons[i].second >= 0.0)) throw std::invalid_argument("ccr add-ons must be >= 0");
        if (i > 0 && !(ccr_addons[i].first > ccr_addons[i - 1].first))
            throw std::invalid_argument("ccr add-on maturities must increase");
    }
    for (double v : vol_scenarios)
        if (!(v >= 0.0)) throw std::invalid_argument("vol scenarios must be >= 0");
    if (yield_shifts.empty()) throw std::invalid_argument("yield shift table is empty");
    for (std::size_t i = 0; i < yield_shifts.size(); ++i) {
        if (!(yield_shifts[i].shift_high_coupon >= 0.0) || !(yield_shifts[i].shift_low_coupon >= 0.0))
            throw std::invalid_argument("yield shifts must be >= 0");
        if (i > 0 && !(yield_shifts[i].max_maturity > yield_shifts[i - 1].max_maturity))
            throw std::invalid_argument("yield shift maturities must increase");
    }
}

double CapitalConfig::addon(double maturity) const {
    for (const auto& [edge, a] : ccr_addons)
        if (maturity <= edge + kDateTolerance) return a;
    return ccr_addons.back().second;
}

double CapitalConfig::yield_shift(double maturity, double coupon) const {
    const bool high = coupon >= coupon_threshold;
    for (const auto& row : yield_shifts)
        if (maturity <= row.max_maturity + kDateTolerance) return high ? row.shift_high_coupon : row.shift_low_coupon;
    const auto& last = yield_shifts.back();
    return high ? last.shift_high_coupon : last.shift_low_coupon;
}

double scenario_grid_capital(const ScenarioValuer& value_change, const CapitalConfig& cfg) {
    double worst = 0.0;
    for (double vol : cfg.vol_scenarios)
        for (double dir : {-1.0, 0.0, 1.0}) worst = std::max(worst, -value_change(vol, dir));
    return worst;
}

namespace {

double swap_shift_change(const CurveAt& curve, const SwapSpec& swap, std::span<const Cashflow> flows,
                         const CapitalConfig& cfg, double dir) {
    if (dir == 0.0 || flows.empty()) return 0.0;
    const double t = curve.time();
    const double shift = dir * cfg.yield_shift(swap.end - t, swap.fixed_rate);
    double dv = 0.0;
    for (const auto& cf : flows) dv += cf.amount * curve.discount(cf.time) * std::expm1(-shift * (cf.time - t));
    return dv;
}

}  // namespace

double book_capital(const CurveAt& curve, std::span<const SwapSpec> book, std::span<const std::vector<Cashflow>> flows,
                    const CapitalConfig& cfg) {
    const double t = curve.time();
    double V = 0.0, notional = 0.0, maturity = 0.0;
    for (std::size_t i = 0; i < book.size(); ++i) {
        if (flows[i].empty()) continue;
        V += present_value(curve, flows[i]);
        notional += std::abs(book[i].notional);
        maturity = std::max(maturity, book[i].end - t);
    }
    double k = ccr_capital(V, notional, maturity, cfg);
    if (cfg.market_risk) {
        k += scenario_grid_capital(
            [&](double, double dir) {
                double dv = 0.0;
                for (std::size_t i = 0; i < book.size(); ++i) dv += swap_shift_change(curve, book[i], flows[i], cfg, dir);
                return dv;
            },
            cfg);
    }
    return k;
}

double market_risk_capital(const PathSet& ps, std::size_t path, double t, std::span<const SwapSpec> portfolio,
                           const CapitalConfig& cfg) {
    const std::size_t d = ps.date_index(t);
    const CurveAt curve(ps, path, d);
    std::vector<std::vector<Cashflow>> flows;
    for (const auto& swap : portfolio) flows.push_back(remaining_cashflows(ps, path, d, swap));
    return scenario_grid_capital(
        [&](double, double dir) {
            double dv = 0.0;
            for (std::size_t i = 0; i < portfolio.size(); ++i)
                dv += swap_shift_change(curve, portfolio[i], flows[i], cfg, dir);
            return dv;
        },
        cfg);
}

double ccr_capital(double V, double notional, double maturity, const CapitalConfig& cfg) {
    return cfg.capital_ratio * cfg.risk_weight * (std::max(V, 0.0) + cfg.addon(maturity) * std::abs(notional));
}

std::vector<std::vector<double>> total_capital_profile(const PathSet& ps, std::span<const SwapSpec> portfolio,
                                                       const CapitalConfig& cfg, std::span<const std::size_t> dates) {
    std::vector<std::vector<double>> out(dates.size(), std::vector<double>(ps.n_paths(), 0.0));
    std::vector<std::vector<Cashflow>> flows(portfolio.size());
    for (std::size_t i = 0; i < dates.size(); ++i)
        for (std::size_t p = 0; p < ps.n_paths(); ++p) {
            for (std::size_t s = 0; s < portfolio.size(); ++s) flows[s] = remaining_cashflows(ps, p, dates[i], portfolio[s]);
            out[i][p] = book_capital(CurveAt(ps, p, dates[i]), portfolio, flows, cfg);
        }
    return out;
}

}  // namespace xvab
