#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "xvab/instruments.hpp"
#include "xvab/margin_capital.hpp"
#include "xvab/ratesim.hpp"
#include "xvab/xva_terms.hpp"

namespace xvab {

enum class CollateralMode { None, VariationMargin };

/// What the netting set posts and holds. Null pointers switch the
/// corresponding quantity off (it is then identically zero).
struct ExposureConfig {
    CollateralMode collateral = CollateralMode::None;
    const InitialMarginModel* margin = nullptr;
    /// Also hold margin from the counterparty (I_C). A CCP posts none.
    bool receive_margin = false;
    /// Grid steps between margin evaluations; dates in between interpolate.
    std::size_t margin_stride = 3;
    const CapitalConfig* capital = nullptr;
};

/// Pathwise V, X, I_C, K, I_B of a book on grid dates [first, last].
class BookProfiles {
public:
    std::size_t first_date() const { return first_; }
    std::size_t last_date() const { return last_; }
    std::size_t n_paths() const { return paths_; }

    double operator()(Quantity q, std::size_t date, std::size_t path) const;
    /// gamma^delta of `term` at (date, path).
    double gamma(const XvaTermSpec& term, std::size_t date, std::size_t path) const {
        return term.apply_exponent((*this)(term.gamma, date, path));
    }

private:
    friend BookProfiles book_profiles(const PathSet&, std::span<const SwapSpec>, std::size_t, std::size_t,
                                      const ExposureConfig&, std::span<const Quantity>);

    std::size_t first_ = 0, last_ = 0, paths_ = 0;
    std::array<std::vector<double>, 5> data_;  // indexed by Quantity, empty when not computed
};

/// Computes the quantities listed in `needed` (everything when empty).
BookProfiles book_profiles(const PathSet& ps, std::span<const SwapSpec> book, std::size_t first, std::size_t last,
                           const ExposureConfig& cfg, std::span<const Quantity> needed = {});

/// Sum of the swap values of a book, in book order.
double book_value(const PathSet& ps, std::size_t path, std::size_t date, std::span<const SwapSpec> book);

/// Grid index of the latest end date in the book (0 when empty).
std::size_t book_last_date(const PathSet& ps, std::span<const SwapSpec> book);

}  // namespace xvab
