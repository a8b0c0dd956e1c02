#include "xvab/exposure.hpp"

#include <algorithm>
#include <stdexcept>

namespace xvab {

namespace {

std::size_t slot(Quantity q) { return static_cast<std::size_t>(q); }

}  // namespace

double BookProfiles::operator()(Quantity q, std::size_t date, std::size_t path) const {
    const auto& v = data_[slot(q)];
    if (v.empty()) return 0.0;
    if (date < first_ || date > last_) return 0.0;
    return v[(date - first_) * paths_ + path];
}

double book_value(const PathSet& ps, std::size_t path, std::size_t date, std::span<const SwapSpec> book) {
    double v = 0.0;
    if (book.empty()) return v;
    const CurveAt curve(ps, path, date);
    for (const auto& swap : book) v += present_value(curve, remaining_cashflows(ps, path, date, swap));
    return v;
}

std::size_t book_last_date(const PathSet& ps, std::span<const SwapSpec> book) {
    std::size_t last = 0;
    for (const auto& swap : book) last = std::max(last, ps.date_index(swap.end));
    return last;
}

BookProfiles book_profiles(const PathSet& ps, std::span<const SwapSpec> book, std::size_t first, std::size_t last,
                           const ExposureConfig& cfg, std::span<const Quantity> needed) {
    if (first > last || last >= ps.n_dates()) throw std::invalid_argument("book_profiles: bad date range");
    BookProfiles out;
    out.first_ = first;
    out.last_ = last;
    out.paths_ = ps.n_paths();
    if (book.empty()) return out;

    auto want = [&](Quantity q) {
        return needed.empty() || std::find(needed.begin(), needed.end(), q) != needed.end();
    };
    const bool want_x = want(Quantity::Collateral) && cfg.collateral == CollateralMode::VariationMargin;
    const bool want_k = want(Quantity::Capital) && cfg.capital;
    const bool want_ib = want(Quantity::InitialMarginPosted) && cfg.margin;
    const bool want_ic = want(Quantity::InitialMarginReceived) && cfg.margin && cfg.receive_margin;
    const bool want_v = want(Quantity::Value) || want_x;

    const std::size_t n = (last - first + 1) * ps.n_paths();
    if (want_v) out.data_[slot(Quantity::Value)].assign(n, 0.0);
    if (want_x) out.data_[slot(Quantity::Collateral)].assign(n, 0.0);
    if (want_k) out.data_[slot(Quantity::Capital)].assign(n, 0.0);

    std::vector<std::vector<Cashflow>> flows(book.size());
    for (std::size_t d = first; d <= last; ++d) {
        for (std::size_t p = 0; p < ps.n_paths(); ++p) {
            const CurveAt curve(ps, p, d);
            double v = 0.0;
            for (std::size_t s = 0; s < book.size(); ++s) {
                flows[s] = remaining_cashflows(ps, p, d, book[s]);
                v += present_value(curve, flows[s]);
            }
            const std::size_t at = (d - first) * ps.n_paths() + p;
            if (want_v) out.data_[slot(Quantity::Value)][at] = v;
            if (want_x) out.data_[slot(Quantity::Collateral)][at] = v;
            if (want_k) out.data_[slot(Quantity::Capital)][at] = book_capital(curve, book, flows, *cfg.capital);
        }
    }

    if (want_ib || want_ic) {
        const std::size_t stride = std::max<std::size_t>(1, cfg.margin_stride);
        std::vector<std::size_t> knots;
        for (std::size_t d = first; d < last; d += stride) knots.push_back(d);
        knots.push_back(last);
        std::vector<std::vector<MarginPair>> at_knots;
        at_knots.reserve(knots.size());
        for (std::size_t d : knots) at_knots.push_back(cfg.margin->margin_all_paths(ps, d, book));
        if (want_ib) out.data_[slot(Quantity::InitialMarginPosted)].assign(n, 0.0);
        if (want_ic) out.data_[slot(Quantity::InitialMarginReceived)].assign(n, 0.0);
        const auto& grid = ps.date_grid();
        auto fill = [&](std::size_t d, const std::vector<MarginPair>& lo, const std::vector<MarginPair>& hi, double w) {
            for (std::size_t p = 0; p < ps.n_paths(); ++p) {
                const std::size_t at = (d - first) * ps.n_paths() + p;
                if (want_ib)
                    out.data_[slot(Quantity::InitialMarginPosted)][at] = lo[p].posted + w * (hi[p].posted - lo[p].posted);
                if (want_ic)
                    out.data_[slot(Quantity::InitialMarginReceived)][at] =
                        lo[p].received + w * (hi[p].received - lo[p].received);
            }
        };
        fill(knots[0], at_knots[0], at_knots[0], 0.0);
        for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
            const std::size_t a = knots[k], b = knots[k + 1];
            for (std::size_t d = a + 1; d <= b; ++d)
                fill(d, at_knots[k], at_knots[k + 1], (grid[d] - grid[a]) / (grid[b] - grid[a]));
        }
    }
    return out;
}

}  // namespace xvab
