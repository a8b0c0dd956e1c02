#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "xvab/config.hpp"
#include "xvab/exercise.hpp"
#include "xvab/portfolio.hpp"
#include "xvab/smile.hpp"

namespace xvab {

/// Simulated paths plus the margin and capital models a run shares. Held
/// behind a pointer so the ExposureConfig pointers stay valid.
struct CaseEnvironment {
    RunConfig config;
    PathSet paths;
    std::unique_ptr<InitialMarginModel> margin;
    CapitalConfig capital;            // market risk as configured
    CapitalConfig capital_no_market;  // market risk switched off
    double simulation_seconds = 0.0;

    XvaContext context(bool market_risk) const;
};

std::unique_ptr<CaseEnvironment> prepare_case(RunConfig cfg);

/// Absolute strikes of the sweep (relative offsets resolve against the
/// t = 0 forward swap rate of the trade). Empty without a trade.
std::vector<double> sweep_strikes(const CaseEnvironment& env);

std::vector<ExerciseReport> strike_sweep(const CaseEnvironment& env, bool market_risk);

/// Options with offset strikes resolved against their own t = 0 forward.
std::vector<PortfolioOption> resolve_portfolio(const CaseEnvironment& env);

/// The three smile curves: no adjustments, adjustments, adjustments
/// without market-risk capital.
std::vector<SmilePoint> smile_curves(const CaseEnvironment& env, const std::vector<ExerciseReport>& with_market,
                                     const std::vector<ExerciseReport>& without_market);

/// Lognormal smile shift: mean model shift over the forwards the trade spans.
double smile_shift(const CaseEnvironment& env);

void write_exercise_csv(std::ostream& os, const std::vector<ExerciseReport>& reports, double notional);
void write_smile_csv(std::ostream& os, const std::vector<SmilePoint>& points);
void write_mva_table_csv(std::ostream& os, const std::vector<ExerciseReport>& reports, double notional);
void write_portfolio_csv(std::ostream& os, const PortfolioResult& result);

enum class Command { Price, Smile, MvaTable, Portfolio };

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    bool no_market_risk = false;
};

struct RunSummary {
    std::vector<std::string> files;  // written, manifest last
};

/// Loads, validates and runs one command, writing CSVs and manifest.json
/// into the output directory. Throws ConfigError on invalid configs.
RunSummary run_command(Command cmd, const std::string& config_path, const RunOverrides& overrides,
                       std::ostream& log);

}  // namespace xvab
