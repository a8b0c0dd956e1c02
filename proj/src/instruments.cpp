#include "xvab/instruments.hpp"

#include <cmath>
#include <stdexcept>

namespace xvab {

namespace {

std::vector<double> schedule(double start, double end, int frequency) {
    const double n_real = (end - start) * frequency;
    const auto n = static_cast<long>(std::llround(n_real));
    if (n < 1 || std::abs(n_real - static_cast<double>(n)) > 1e-8)
        throw std::invalid_argument("swap length must be a whole number of periods");
    std::vector<double> dates(static_cast<std::size_t>(n) + 1);
    for (long i = 0; i <= n; ++i) dates[static_cast<std::size_t>(i)] = start + (end - start) * static_cast<double>(i) / static_cast<double>(n);
    return dates;
}

}  // namespace

std::vector<double> SwapSpec::fixed_dates() const { return schedule(start, end, fixed_frequency); }
std::vector<double> SwapSpec::float_dates() const { return schedule(start, end, float_frequency); }

void SwapSpec::validate() const {
    if (!(end > start)) throw std::invalid_argument("swap end must be after start");
    if (start < 0.0) throw std::invalid_argument("swap start must be >= 0");
    if (fixed_frequency < 1 || float_frequency < 1) throw std::invalid_argument("swap frequencies must be >= 1");
    if (!std::isfinite(notional) || !std::isfinite(fixed_rate)) throw std::invalid_argument("swap terms must be finite");
    (void)fixed_dates();
    (void)float_dates();
}

void SwaptionSpec::validate() const {
    underlying.validate();
    if (std::abs(expiry - underlying.start) > kDateTolerance)
        throw std::invalid_argument("swaption expiry must equal the underlying start date");
}

std::vector<Cashflow> remaining_cashflows(const PathSet& ps, std::size_t path, std::size_t date,
                                          const SwapSpec& spec) {
    const double t = ps.date_grid().at(date);
    std::vector<Cashflow> flows;
    if (t >= spec.end - kDateTolerance) return flows;
    const double n = spec.notional * spec.sign();

    const auto fl = spec.float_dates();
    bool telescoped = false;
    for (std::size_t i = 0; i + 1 < fl.size(); ++i) {
        const double a = fl[i], b = fl[i + 1];
        if (b <= t + kDateTolerance) continue;
        if (a < t - kDateTolerance) {
            // running period: fixing observed at its start
            const CurveAt at_reset(ps, path, ps.date_index(a));
            const double fixing = (1.0 / at_reset.discount(b) - 1.0) / (b - a);
            flows.push_back({b, n * (b - a) * fixing});
        } else if (!telescoped) {
            flows.push_back({a, n});
            flows.push_back({spec.end, -n});
            telescoped = true;
        }
    }
    const auto fx = spec.fixed_dates();
    for (std::size_t i = 1; i < fx.size(); ++i) {
        if (fx[i] <= t + kDateTolerance) continue;
        flows.push_back({fx[i], -n * spec.fixed_rate * (fx[i] - fx[i - 1])});
    }
    return flows;
}

double present_value(const CurveAt& curve, std::span<const Cashflow> flows) {
    double pv = 0.0;
    for (const auto& cf : flows) pv += cf.amount * curve.discount(cf.time);
    return pv;
}

std::vector<Cashflow> realized_cashflows(const PathSet& ps, std::size_t path, const SwapSpec& spec) {
    const double n = spec.notional * spec.sign();
    std::vector<Cashflow> flows;
    const auto fl = spec.float_dates();
    for (std::size_t i = 0; i + 1 < fl.size(); ++i) {
        const double a = fl[i], b = fl[i + 1];
        const CurveAt at_reset(ps, path, ps.date_index(a));
        flows.push_back({b, n * (1.0 / at_reset.discount(b) - 1.0)});
    }
    const auto fx = spec.fixed_dates();
    for (std::size_t i = 1; i < fx.size(); ++i) flows.push_back({fx[i], -n * spec.fixed_rate * (fx[i] - fx[i - 1])});
    return flows;
}

double swap_value(const PathSet& ps, std::size_t path, double t, const SwapSpec& spec) {
    const std::size_t d = ps.date_index(t);
    const auto flows = remaining_cashflows(ps, path, d, spec);
    return present_value(CurveAt(ps, path, d), flows);
}

double swap_annuity(const PathSet& ps, std::size_t path, double t, const SwapSpec& spec) {
    const std::size_t d = ps.date_index(t);
    const CurveAt curve(ps, path, d);
    const auto fx = spec.fixed_dates();
    double a = 0.0;
    for (std::size_t i = 1; i < fx.size(); ++i)
        if (fx[i] > t + kDateTolerance) a += (fx[i] - fx[i - 1]) * curve.discount(fx[i]);
    return a * spec.notional;
}

double swap_rate(const PathSet& ps, std::size_t path, double t, const SwapSpec& spec) {
    SwapSpec floating_only = spec;
    floating_only.fixed_rate = 0.0;
    floating_only.direction = SwapDirection::Payer;
    const double annuity = swap_annuity(ps, path, t, spec);
    if (!(annuity > 0.0)) throw std::invalid_argument("swap_rate: no fixed payments remain");
    return swap_value(ps, path, t, floating_only) / annuity;
}

double swap_delta(const PathSet& ps, double t, const SwapSpec& spec) {
    const std::size_t d = ps.date_index(t);
    double sum = 0.0;
    for (std::size_t p = 0; p < ps.n_paths(); ++p) {
        const auto flows = remaining_cashflows(ps, p, d, spec);
        sum += present_value(CurveAt(ps, p, d, kBasisPoint), flows) - present_value(CurveAt(ps, p, d), flows);
    }
    return sum / static_cast<double>(ps.n_paths());
}

double swaption_exercise_value(const PathSet& ps, std::size_t path, const SwaptionSpec& option) {
    return std::max(swap_value(ps, path, option.expiry, option.underlying), 0.0);
}

}  // namespace xvab
