#include "xvab/exercise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace xvab {

bool decide_exercise(const ExerciseContext& ctx) { return ctx.V_ex + ctx.U_ex > ctx.V_noex + ctx.U_noex; }

XvaContext make_xva_context(const CreditFundingParams& credit, KvaAlpha kva_form, ExposureConfig exposure,
                            LocalRegressionConfig regression, std::vector<SwapSpec> netting_set) {
    XvaContext ctx;
    ctx.terms = standard_terms(credit, RateInBeta::Excluded, kva_form);
    ctx.exposure = exposure;
    ctx.regression = regression;
    ctx.netting_set = std::move(netting_set);
    return ctx;
}

std::vector<Quantity> needed_quantities(const XvaContext& ctx) {
    std::vector<Quantity> q;
    for (const auto& term : ctx.terms)
        if (!term.alpha.is_zero() && std::find(q.begin(), q.end(), term.gamma) == q.end()) q.push_back(term.gamma);
    return q;
}

namespace {

LocalRegressionConfig capped(LocalRegressionConfig cfg, std::size_t n) {
    // tiny path sets (tests, smoke runs) cannot hold a full window
    cfg.bandwidth = std::min(cfg.bandwidth, n);
    return cfg;
}

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double std_error_of(std::span<const double> v) {
    const std::size_t n = v.size();
    if (n < 2) return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
}

double proportion_se(double p, std::size_t n) { return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n)); }

}  // namespace

BranchValues branch_values(const PathSet& ps, std::span<const SwapSpec> book, std::size_t obs, const XvaContext& ctx,
                           const RegressionBasis& basis, const BookProfiles* profiles) {
    const std::size_t P = ps.n_paths();
    BranchValues out;
    out.V.resize(P);
    for (std::size_t p = 0; p < P; ++p) out.V[p] = book_value(ps, p, obs, book);
    out.U_term.assign(ctx.terms.size(), std::vector<double>(P, 0.0));
    out.U.assign(P, 0.0);
    if (book.empty() || ctx.terms.empty()) return out;

    const std::size_t last = book_last_date(ps, book);
    if (last <= obs) return out;
    const auto& grid = ps.date_grid();
    const std::span<const double> dates(grid.data() + obs, last - obs + 1);
    const auto weights = build_weights(ctx.terms, dates);

    bool any = false;
    for (const auto& w : weights)
        any = any || std::any_of(w.begin(), w.end(), [](double x) { return x != 0.0; });
    if (!any) return out;

    BookProfiles local;
    if (!profiles) {
        const auto needed = needed_quantities(ctx);
        local = book_profiles(ps, book, obs, last, ctx.exposure, needed);
        profiles = &local;
    } else if (profiles->first_date() > obs || profiles->last_date() < last) {
        throw std::invalid_argument("book profiles do not cover the valuation window");
    }

    std::vector<double> target(P);
    for (std::size_t j = 0; j < ctx.terms.size(); ++j) {
        const auto& w = weights[j];
        if (std::none_of(w.begin(), w.end(), [](double x) { return x != 0.0; })) continue;
        const auto& term = ctx.terms[j];
        for (std::size_t p = 0; p < P; ++p) {
            const double b0 = ps.numeraire(p, obs);
            double y = 0.0;
            for (std::size_t i = 1; i < w.size(); ++i)
                if (w[i] != 0.0) y += w[i] * profiles->gamma(term, obs + i, p) * b0 / ps.numeraire(p, obs + i);
            target[p] = y;
        }
        const auto smoothed = basis.fit_predict(target);
        for (std::size_t p = 0; p < P; ++p) out.U_term[j][p] = w[0] * profiles->gamma(term, obs, p) + smoothed[p];
    }
    for (std::size_t j = 0; j < ctx.terms.size(); ++j)
        for (std::size_t p = 0; p < P; ++p) out.U[p] += out.U_term[j][p];
    return out;
}

RollbackResult phase2_rollback(const PathSet& ps, std::size_t from, std::vector<double> deflated,
                               const LocalRegressionConfig& reg) {
    if (deflated.size() != ps.n_paths()) throw std::invalid_argument("one deflated value per path required");
    if (from >= ps.n_dates()) throw std::invalid_argument("rollback start off grid");
    RollbackResult r;
    r.value = mean_of(deflated);
    r.std_error = std_error_of(deflated);
    const auto cfg = capped(reg, ps.n_paths());
    std::vector<double> x(ps.n_paths());
    for (std::size_t k = from; k-- > 1;) {
        for (std::size_t p = 0; p < ps.n_paths(); ++p) x[p] = 1.0 / ps.numeraire(p, k);
        deflated = RegressionBasis(x, cfg).fit_predict(deflated);
    }
    r.regressed_value = mean_of(deflated);
    return r;
}

std::vector<double> phase1_book_values(const PathSet& ps, std::span<const SwapSpec> book, std::size_t n,
                                       const LocalRegressionConfig& reg) {
    const std::size_t P = ps.n_paths();
    std::vector<double> c(P, 0.0);
    const std::size_t last = book_last_date(ps, book);
    if (book.empty() || last <= n) return c;
    const double t_n = ps.date_grid().at(n);
    double maturity = 0.0;
    for (const auto& s : book) maturity = std::max(maturity, s.end);

    std::vector<std::vector<double>> paid(last - n + 1, std::vector<double>(P, 0.0));
    for (std::size_t p = 0; p < P; ++p)
        for (const auto& swap : book)
            for (const auto& cf : realized_cashflows(ps, p, swap))
                if (cf.time > t_n + kDateTolerance) paid[ps.date_index(cf.time) - n][p] += cf.amount;

    const auto cfg = capped(reg, P);
    std::vector<double> y(P);
    for (std::size_t k = last; k-- > n;) {
        for (std::size_t p = 0; p < P; ++p)
            y[p] = (c[p] + paid[k + 1 - n][p]) * ps.numeraire(p, k) / ps.numeraire(p, k + 1);
        c = RegressionBasis(regressor_values(ps, k, {1, maturity}), cfg).fit_predict(y);
    }
    return c;
}

RollbackResult single_step_value(const PathSet& ps, const SwaptionSpec& option) {
    option.validate();
    const std::size_t n = ps.date_index(option.expiry);
    std::vector<double> y(ps.n_paths());
    for (std::size_t p = 0; p < ps.n_paths(); ++p)
        y[p] = std::max(swap_value(ps, p, option.expiry, option.underlying), 0.0) / ps.numeraire(p, n);
    return {mean_of(y), std_error_of(y)};
}

LsmResult two_phase_lsm(const PathSet& ps, const SwaptionSpec& option, const LocalRegressionConfig& reg) {
    option.validate();
    const std::size_t n = ps.date_index(option.expiry);
    const std::size_t P = ps.n_paths();
    const std::vector<SwapSpec> ex_book{option.underlying};
    LsmResult r;
    r.exercised.resize(P);
    r.deflated_payoff.resize(P);
    const auto estimate = phase1_book_values(ps, ex_book, n, reg);
    for (std::size_t p = 0; p < P; ++p) {
        const double exact = book_value(ps, p, n, ex_book);
        const bool ex = decide_exercise({estimate[p], 0.0, 0.0, 0.0});
        r.exercised[p] = ex;
        r.deflated_payoff[p] = (ex ? exact : 0.0) / ps.numeraire(p, n);
        const double e = std::abs(estimate[p] - exact);
        r.phase1_mean_abs_error += e / static_cast<double>(P);
        r.phase1_max_abs_error = std::max(r.phase1_max_abs_error, e);
    }
    const auto rolled = phase2_rollback(ps, n, r.deflated_payoff, reg);
    r.value = rolled.value;
    r.std_error = rolled.std_error;
    r.regressed_value = rolled.regressed_value;
    return r;
}

ExerciseReport price_with_xva_boundary(const PathSet& ps, const SwaptionSpec& option, const XvaContext& ctx) {
    option.validate();
    const std::size_t n = ps.date_index(option.expiry);
    const std::size_t P = ps.n_paths();
    const std::size_t M = ctx.terms.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();

    ExerciseReport rep;
    rep.strike = option.strike();
    rep.settlement = option.settlement;
    rep.expiry = option.expiry;
    rep.forward = swap_rate(ps, 0, 0.0, option.underlying);
    rep.annuity = swap_annuity(ps, 0, 0.0, option.underlying);
    rep.swap_delta = swap_delta(ps, option.expiry, option.underlying);
    for (const auto& t : ctx.terms) rep.term_names.push_back(t.name);
    rep.xva_at_exercise.assign(M, nan);
    rep.xva_at_exercise_pv.assign(M, nan);
    rep.xva_multiple.assign(M, nan);
    rep.xva_in_price.assign(M, 0.0);

    const auto plain = two_phase_lsm(ps, option, ctx.regression);
    rep.value_no_xva = plain.value;
    rep.value_no_xva_se = plain.std_error;
    rep.exercised_no_xva = plain.exercised;
    const auto n_ex_plain = static_cast<double>(std::count(plain.exercised.begin(), plain.exercised.end(), 1));
    rep.exercise_probability_no_xva = n_ex_plain / static_cast<double>(P);
    rep.exercise_probability_no_xva_se = proportion_se(rep.exercise_probability_no_xva, P);

    if (option.settlement == Settlement::Cash) {
        // paid out at expiry: nothing left to adjust
        rep.value = plain.value;
        rep.value_se = plain.std_error;
        rep.exercised = plain.exercised;
        rep.exercise_probability = rep.exercise_probability_no_xva;
        rep.exercise_probability_se = rep.exercise_probability_no_xva_se;
        if (n_ex_plain > 0) {
            rep.xva_at_exercise.assign(M, 0.0);
            rep.xva_at_exercise_pv.assign(M, 0.0);
            rep.xva_multiple.assign(M, 0.0);
        }
        return rep;
    }

    std::vector<SwapSpec> ex_book = ctx.netting_set;
    ex_book.push_back(option.underlying);
    const std::vector<SwapSpec>& noex_book = ctx.netting_set;
    double maturity = 0.0;
    for (const auto& s : ex_book) maturity = std::max(maturity, s.end);
    const auto x = regressor_values(ps, n, {1, maturity});
    const RegressionBasis basis(x, capped(ctx.regression, P));

    const auto ex = branch_values(ps, ex_book, n, ctx, basis);
    const auto noex = branch_values(ps, noex_book, n, ctx, basis);
    const auto V_ex = phase1_book_values(ps, ex_book, n, ctx.regression);
    const auto V_noex = phase1_book_values(ps, noex_book, n, ctx.regression);

    rep.exercised.resize(P);
    std::vector<double> deflated(P), in_price_total(P, 0.0);
    std::vector<double> sum_ex(M, 0.0), sum_ex_pv(M, 0.0), sum_price(M, 0.0);
    std::size_t n_ex = 0;
    for (std::size_t p = 0; p < P; ++p) {
        const bool go = decide_exercise({V_ex[p], V_noex[p], ex.U[p], noex.U[p]});
        rep.exercised[p] = go;
        const double b = ps.numeraire(p, n);
        deflated[p] = (go ? (ex.V[p] + ex.U[p]) - (noex.V[p] + noex.U[p]) : 0.0) / b;
        if (!go) continue;
        ++n_ex;
        for (std::size_t j = 0; j < M; ++j) {
            const double dU = ex.U_term[j][p] - noex.U_term[j][p];
            sum_ex[j] += dU;
            sum_ex_pv[j] += dU / b;
            sum_price[j] += dU / b;
            in_price_total[p] += dU / b;
        }
    }
    rep.exercise_probability = static_cast<double>(n_ex) / static_cast<double>(P);
    rep.exercise_probability_se = proportion_se(rep.exercise_probability, P);
    for (std::size_t j = 0; j < M; ++j) {
        rep.xva_in_price[j] = sum_price[j] / static_cast<double>(P);
        if (n_ex == 0) continue;
        rep.xva_at_exercise[j] = sum_ex[j] / static_cast<double>(n_ex);
        rep.xva_at_exercise_pv[j] = sum_ex_pv[j] / static_cast<double>(n_ex);
        rep.xva_multiple[j] = rep.swap_delta != 0.0 ? -rep.xva_at_exercise[j] / std::abs(rep.swap_delta) : nan;
    }
    rep.xva_in_price_se_total = std_error_of(in_price_total);

    const std::size_t last = book_last_date(ps, ex_book);
    const std::size_t branches = noex_book.empty() ? 1 : 2;
    rep.conditional_expectations = branches * (last > n ? last - n : 0) * M;

    const auto rolled = phase2_rollback(ps, n, std::move(deflated), ctx.regression);
    rep.value = rolled.value;
    rep.value_se = rolled.std_error;
    rep.value_regressed_rollback = rolled.regressed_value;
    return rep;
}

}  // namespace xvab
