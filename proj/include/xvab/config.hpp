#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "xvab/exposure.hpp"
#include "xvab/instruments.hpp"
#include "xvab/margin_capital.hpp"
#include "xvab/portfolio.hpp"
#include "xvab/ratesim.hpp"
#include "xvab/regression.hpp"
#include "xvab/xva_terms.hpp"

namespace xvab {

/// European swaption traded at every strike of the sweep.
struct TradeConfig {
    SwapDirection direction = SwapDirection::Payer;
    double notional = 1.0;
    double expiry = 5.0;
    double tenor = 5.0;
    int fixed_frequency = 1;
    int float_frequency = 2;
    Settlement settlement = Settlement::Physical;

    SwapSpec swap(double strike) const;
};

struct StrikeSweep {
    /// Offsets from the t = 0 forward swap rate in bp, or absolute decimals.
    bool relative = true;
    std::vector<double> values{0.0};
};

struct ShockSource {
    std::string file;  // resolved path; empty means synthetic
    SyntheticShockConfig synthetic;
};

/// A portfolio option whose strike may still be an offset from ATM.
struct PortfolioOptionConfig {
    PortfolioOption option;
    std::optional<double> strike_offset_bp;
};

inline constexpr std::array<const char*, 6> kTermNames{"CVA", "FVA", "COLVA_X", "COLVA_IC", "KVA", "MVA"};

struct RunConfig {
    std::string case_name = "case";
    LmmParams model;
    std::vector<double> grid;
    std::size_t n_paths = 4096;
    std::uint64_t seed = 1;

    std::optional<TradeConfig> trade;
    StrikeSweep strikes;
    std::vector<SwapSpec> netting_set;

    CreditFundingParams credit;
    std::array<bool, 6> terms_enabled{true, true, true, true, true, true};
    KvaAlpha kva_form = KvaAlpha::Table;
    CollateralMode collateral = CollateralMode::None;
    bool receive_margin = false;
    bool market_risk = true;

    bool margin_enabled = false;
    ImConfig im;
    std::size_t margin_stride = 3;
    ShockSource shocks;

    CapitalConfig capital;
    LocalRegressionConfig regression;

    std::vector<PortfolioOptionConfig> portfolio;
    std::size_t portfolio_cap = kDefaultOptionCap;

    std::string output_dir = "out";
};

struct ConfigResult {
    std::optional<RunConfig> config;
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
};

/// Parses and checks a YAML run definition. Every problem found is
/// reported (with its line), not only the first. Relative shock-file paths
/// resolve against `base_dir`.
ConfigResult validate_config(const std::string& text, const std::string& base_dir = ".");

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> errors);
    const std::vector<std::string>& errors() const { return errors_; }

private:
    std::vector<std::string> errors_;
};

/// Reads and validates a config file; throws ConfigError on failure.
ConfigResult load_config(const std::string& path);

/// 64-bit FNV-1a hash of the config text, as 16 hex digits.
std::string config_hash(const std::string& text);

}  // namespace xvab
