#include "xvab/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>

namespace xvab {

std::vector<double> PortfolioOption::dates() const {
    return exercise_dates.empty() ? std::vector<double>{underlying.start} : exercise_dates;
}

SwapSpec PortfolioOption::swap_from(double date) const {
    SwapSpec s = underlying;
    s.start = date;
    return s;
}

void PortfolioOption::validate() const {
    underlying.validate();
    const auto ds = dates();
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (i > 0 && !(ds[i] > ds[i - 1])) throw std::invalid_argument("exercise dates must increase");
        if (ds[i] < underlying.start - kDateTolerance || ds[i] >= underlying.end - kDateTolerance)
            throw std::invalid_argument("exercise dates must lie in [start, end) of the underlying");
        swap_from(ds[i]).validate();
    }
}

std::vector<DecisionState> enumerate_decision_states(std::span<const std::size_t> exercise_counts, std::size_t cap) {
    if (exercise_counts.size() > cap)
        throw std::invalid_argument("decision state space is desk-scale only: " +
                                    std::to_string(exercise_counts.size()) + " options exceed the cap of " +
                                    std::to_string(cap));
    std::vector<DecisionState> out{DecisionState(exercise_counts.size(), 0)};
    for (std::size_t i = 0; i < exercise_counts.size(); ++i) {
        std::vector<DecisionState> next;
        for (const auto& s : out)
            for (std::size_t k = 0; k <= exercise_counts[i]; ++k) {
                auto t = s;
                t[i] = k;
                next.push_back(std::move(t));
            }
        out = std::move(next);
    }
    return out;
}

std::vector<DecisionState> enumerate_decision_states(std::span<const PortfolioOption> options, std::size_t cap) {
    std::vector<std::size_t> counts;
    for (const auto& o : options) counts.push_back(o.dates().size());
    return enumerate_decision_states(counts, cap);
}

namespace {

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

LocalRegressionConfig capped(LocalRegressionConfig cfg, std::size_t n) {
    cfg.bandwidth = std::min(cfg.bandwidth, n);
    return cfg;
}

}  // namespace

PortfolioResult portfolio_backward_induction(const PathSet& ps, std::span<const PortfolioOption> options,
                                             const XvaContext& ctx, std::size_t cap) {
    for (const auto& o : options) o.validate();
    const std::size_t P = ps.n_paths();
    const std::size_t n_opt = options.size();
    const std::size_t M = ctx.terms.size();

    PortfolioResult res;
    res.states = enumerate_decision_states(options, cap);
    for (const auto& t : ctx.terms) res.term_names.push_back(t.name);
    const std::size_t S = res.states.size();
    res.state_probability.assign(S, 0.0);
    res.state_xva.assign(S, std::vector<double>(M, 0.0));
    res.state_value.assign(S, 0.0);
    res.path_state.assign(P, 0);
    if (n_opt == 0) {
        res.state_probability[0] = 1.0;
        return res;
    }

    // mixed-radix index of a state, first option slowest
    std::vector<std::size_t> stride(n_opt, 1);
    for (std::size_t i = n_opt - 1; i-- > 0;) stride[i] = stride[i + 1] * (options[i + 1].dates().size() + 1);
    auto index_of = [&](const DecisionState& s) {
        std::size_t k = 0;
        for (std::size_t i = 0; i < n_opt; ++i) k += s[i] * stride[i];
        return k;
    };

    std::vector<std::vector<std::size_t>> opt_dates(n_opt);
    std::vector<std::size_t> decision;
    for (std::size_t i = 0; i < n_opt; ++i)
        for (double d : options[i].dates()) {
            opt_dates[i].push_back(ps.date_index(d));
            decision.push_back(opt_dates[i].back());
        }
    std::sort(decision.begin(), decision.end());
    decision.erase(std::unique(decision.begin(), decision.end()), decision.end());
    const std::size_t L = decision.size();
    for (std::size_t d : decision) res.decision_dates.push_back(ps.date_grid()[d]);

    std::vector<std::vector<SwapSpec>> books(S);
    double maturity = 0.0;
    for (const auto& s : ctx.netting_set) maturity = std::max(maturity, s.end);
    for (const auto& o : options) maturity = std::max(maturity, o.underlying.end);
    for (std::size_t k = 0; k < S; ++k) {
        books[k] = ctx.netting_set;
        for (std::size_t i = 0; i < n_opt; ++i)
            if (res.states[k][i] > 0) books[k].push_back(options[i].swap_from(options[i].dates()[res.states[k][i] - 1]));
    }

    const auto needed = needed_quantities(ctx);
    std::vector<std::unique_ptr<BookProfiles>> profiles(S);
    auto profile = [&](std::size_t k) -> const BookProfiles& {
        if (!profiles[k]) {
            const std::size_t last = std::max(book_last_date(ps, books[k]), decision.front());
            profiles[k] = std::make_unique<BookProfiles>(
                book_profiles(ps, books[k], decision.front(), last, ctx.exposure, needed));
        }
        return *profiles[k];
    };
    std::vector<std::vector<std::vector<Cashflow>>> flows(S);
    auto realized = [&](std::size_t k) -> const std::vector<std::vector<Cashflow>>& {
        if (flows[k].empty()) {
            flows[k].resize(P);
            for (std::size_t p = 0; p < P; ++p)
                for (const auto& swap : books[k]) {
                    const auto f = realized_cashflows(ps, p, swap);
                    flows[k][p].insert(flows[k][p].end(), f.begin(), f.end());
                }
        }
        return flows[k];
    };

    auto reachable = [&](std::size_t k, std::size_t l) {
        for (std::size_t i = 0; i < n_opt; ++i)
            if (res.states[k][i] > 0 && opt_dates[i][res.states[k][i] - 1] >= decision[l]) return false;
        return true;
    };
    // candidates from state k at decision l, no-exercise first
    auto candidates = [&](std::size_t k, std::size_t l) {
        std::vector<std::pair<std::size_t, std::size_t>> open;  // (option, 1-based date number)
        for (std::size_t i = 0; i < n_opt; ++i) {
            if (res.states[k][i] != 0) continue;
            const auto it = std::find(opt_dates[i].begin(), opt_dates[i].end(), decision[l]);
            if (it != opt_dates[i].end()) open.push_back({i, static_cast<std::size_t>(it - opt_dates[i].begin()) + 1});
        }
        std::vector<std::size_t> out;
        for (std::size_t mask = 0; mask < (std::size_t{1} << open.size()); ++mask) {
            auto s = res.states[k];
            for (std::size_t b = 0; b < open.size(); ++b)
                if (mask & (std::size_t{1} << b)) s[open[b].first] = open[b].second;
            out.push_back(index_of(s));
        }
        return out;
    };

    std::vector<std::vector<double>> J(S), JU(S);
    std::vector<std::vector<std::vector<std::size_t>>> choice(L, std::vector<std::vector<std::size_t>>(S));
    const RateCurve zero_beta;
    const RateCurve& beta = M > 0 ? ctx.terms.front().beta : zero_beta;

    for (std::size_t l = L; l-- > 0;) {
        const std::size_t d = decision[l];
        const auto x = regressor_values(ps, d, {1, maturity});
        const RegressionBasis basis(x, capped(ctx.regression, P));
        std::vector<std::vector<double>> nJ(S), nJU(S);

        if (l + 1 == L) {
            // decisions compare phase-1 estimates, realised values use the exact book values
            std::vector<BranchValues> bv(S);
            std::vector<std::vector<double>> est(S);
            for (std::size_t k = 0; k < S; ++k) {
                bv[k] = branch_values(ps, books[k], d, ctx, basis, &profile(k));
                est[k] = phase1_book_values(ps, books[k], d, ctx.regression);
                res.state_value[k] = mean_of(bv[k].V);
                for (std::size_t j = 0; j < M; ++j) res.state_xva[k][j] = mean_of(bv[k].U_term[j]);
            }
            for (std::size_t k = 0; k < S; ++k) {
                if (!reachable(k, l)) continue;
                const auto cand = candidates(k, l);
                nJ[k].resize(P);
                nJU[k].resize(P);
                choice[l][k].resize(P);
                for (std::size_t p = 0; p < P; ++p) {
                    std::size_t best = cand.front();
                    for (std::size_t c = 1; c < cand.size(); ++c)
                        if (decide_exercise({est[cand[c]][p], est[best][p], bv[cand[c]].U[p], bv[best].U[p]}))
                            best = cand[c];
                    choice[l][k][p] = best;
                    const double gain = best == k ? 0.0 : (bv[best].V[p] + bv[best].U[p]) - (bv[k].V[p] + bv[k].U[p]);
                    const double held = k == 0 ? 0.0 : (bv[k].V[p] + bv[k].U[p]) - (bv[0].V[p] + bv[0].U[p]);
                    nJ[k][p] = gain + held;
                    nJU[k][p] = (best == k ? 0.0 : bv[best].U[p] - bv[k].U[p]) + (k == 0 ? 0.0 : bv[k].U[p] - bv[0].U[p]);
                }
            }
        } else {
            const std::size_t d_next = decision[l + 1];
            const auto& grid = ps.date_grid();
            const std::span<const double> slice(grid.data() + d, d_next - d + 1);
            const auto w = M > 0 ? build_weights(ctx.terms, slice) : std::vector<std::vector<double>>{};
            const double survive = std::exp(-beta.integral(grid[d], grid[d_next]));

            // realised relative carry to the next date plus its value, per candidate state
            std::map<std::size_t, std::pair<std::vector<double>, std::vector<double>>> realised;
            auto carry = [&](std::size_t k, std::size_t p, double& cv, double& cu) {
                const double b0 = ps.numeraire(p, d);
                cv = 0.0;
                for (const auto& cf : realized(k)[p])
                    if (cf.time > grid[d] + kDateTolerance && cf.time <= grid[d_next] + kDateTolerance)
                        cv += cf.amount * b0 / ps.numeraire(p, ps.date_index(cf.time));
                cu = 0.0;
                if (M == 0) return;
                const auto& prof = profile(k);
                for (std::size_t j = 0; j < M; ++j)
                    for (std::size_t i = 0; i < w[j].size(); ++i)
                        if (w[j][i] != 0.0) cu += w[j][i] * prof.gamma(ctx.terms[j], d + i, p) * b0 / ps.numeraire(p, d + i);
            };
            std::map<std::size_t, std::vector<double>> estimate;
            for (std::size_t k = 0; k < S; ++k) {
                if (!reachable(k, l)) continue;
                for (std::size_t c : candidates(k, l)) {
                    if (realised.count(c)) continue;
                    std::vector<double> tot(P), upart(P);
                    for (std::size_t p = 0; p < P; ++p) {
                        double cv, cu, bv0, bu0;
                        carry(c, p, cv, cu);
                        carry(0, p, bv0, bu0);
                        const double r = ps.numeraire(p, d) / ps.numeraire(p, d_next);
                        const double cont_u = JU[c][p] * r * survive;
                        const double cont_v = (J[c][p] - JU[c][p]) * r;
                        upart[p] = (cu - bu0) + cont_u;
                        tot[p] = (cv - bv0) + upart[p] + cont_v;
                    }
                    estimate[c] = basis.fit_predict(tot);
                    realised[c] = {std::move(tot), std::move(upart)};
                }
            }
            for (std::size_t k = 0; k < S; ++k) {
                if (!reachable(k, l)) continue;
                const auto cand = candidates(k, l);
                nJ[k].resize(P);
                nJU[k].resize(P);
                choice[l][k].resize(P);
                for (std::size_t p = 0; p < P; ++p) {
                    std::size_t best = cand.front();
                    for (std::size_t c = 1; c < cand.size(); ++c)
                        if (estimate[cand[c]][p] > estimate[best][p]) best = cand[c];
                    choice[l][k][p] = best;
                    nJ[k][p] = realised[best].first[p];
                    nJU[k][p] = realised[best].second[p];
                }
            }
        }
        J = std::move(nJ);
        JU = std::move(nJU);
    }

    const std::size_t d0 = decision.front();
    std::vector<double> deflated(P);
    for (std::size_t p = 0; p < P; ++p) deflated[p] = J[0][p] / ps.numeraire(p, d0);
    const auto rolled = phase2_rollback(ps, d0, std::move(deflated), ctx.regression);
    res.value = rolled.value;
    res.std_error = rolled.std_error;

    for (std::size_t p = 0; p < P; ++p) {
        std::size_t k = 0;
        for (std::size_t l = 0; l < L; ++l) k = choice[l][k][p];
        res.path_state[p] = k;
        res.state_probability[k] += 1.0 / static_cast<double>(P);
    }
    return res;
}

}  // namespace xvab
