#include "xvab/runner.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace xvab {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Fixed-format number; NaN prints as an empty field.
std::string num(double x) {
    if (std::isnan(x)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

const char* settlement_name(Settlement s) { return s == Settlement::Physical ? "physical" : "cash"; }
const char* status_name(const ImpliedVol& v) { return v.solved() ? "solved" : "no_solution"; }

std::size_t term_index(const std::vector<std::string>& names, const std::string& name) {
    for (std::size_t j = 0; j < names.size(); ++j)
        if (names[j] == name) return j;
    return names.size();
}

std::string state_label(const DecisionState& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "-" : "") + std::to_string(s[i]);
    return out.empty() ? "none" : out;
}

}  // namespace

XvaContext CaseEnvironment::context(bool market_risk) const {
    ExposureConfig ex;
    ex.collateral = config.collateral;
    ex.margin = margin.get();
    ex.receive_margin = config.receive_margin;
    ex.margin_stride = config.margin_stride;
    ex.capital = market_risk ? &capital : &capital_no_market;
    auto ctx = make_xva_context(config.credit, config.kva_form, ex, config.regression, config.netting_set);
    for (std::size_t j = 0; j < ctx.terms.size() && j < config.terms_enabled.size(); ++j)
        if (!config.terms_enabled[j]) ctx.terms[j].alpha = RateCurve(0.0);
    return ctx;
}

std::unique_ptr<CaseEnvironment> prepare_case(RunConfig cfg) {
    const auto t0 = Clock::now();
    auto paths = simulate_paths(cfg.model, cfg.grid, cfg.n_paths, cfg.seed);
    auto env = std::unique_ptr<CaseEnvironment>(new CaseEnvironment{std::move(cfg), std::move(paths), nullptr, {}, {}, 0.0});
    const auto& c = env->config;
    if (c.margin_enabled) {
        const ShockSeries shocks =
            c.shocks.file.empty() ? synthetic_shock_series(c.shocks.synthetic) : read_shock_series(c.shocks.file);
        env->margin = std::make_unique<InitialMarginModel>(shocks, c.im);
    }
    env->capital = c.capital;
    env->capital.market_risk = c.market_risk;
    env->capital_no_market = c.capital;
    env->capital_no_market.market_risk = false;
    env->simulation_seconds = seconds_since(t0);
    return env;
}

std::vector<double> sweep_strikes(const CaseEnvironment& env) {
    const auto& c = env.config;
    if (!c.trade) return {};
    if (!c.strikes.relative) return c.strikes.values;
    const double atm = swap_rate(env.paths, 0, 0.0, c.trade->swap(0.0));
    std::vector<double> out;
    for (double bp : c.strikes.values) out.push_back(atm + bp * kBasisPoint);
    return out;
}

std::vector<ExerciseReport> strike_sweep(const CaseEnvironment& env, bool market_risk) {
    const auto& c = env.config;
    std::vector<ExerciseReport> out;
    if (!c.trade) return out;
    const auto ctx = env.context(market_risk);
    for (double k : sweep_strikes(env)) {
        SwaptionSpec opt;
        opt.underlying = c.trade->swap(k);
        opt.expiry = c.trade->expiry;
        opt.settlement = c.trade->settlement;
        out.push_back(price_with_xva_boundary(env.paths, opt, ctx));
    }
    return out;
}

std::vector<PortfolioOption> resolve_portfolio(const CaseEnvironment& env) {
    std::vector<PortfolioOption> out;
    for (const auto& pc : env.config.portfolio) {
        PortfolioOption o = pc.option;
        if (pc.strike_offset_bp) {
            auto s = o.underlying;
            s.fixed_rate = 0.0;
            o.underlying.fixed_rate = swap_rate(env.paths, 0, 0.0, s) + *pc.strike_offset_bp * kBasisPoint;
        }
        out.push_back(o);
    }
    return out;
}

double smile_shift(const CaseEnvironment& env) {
    const auto& c = env.config;
    if (!c.trade) return 0.0;
    const auto& p = c.model;
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < p.num_forwards(); ++k)
        if (p.tenor_grid[k] >= c.trade->expiry - kDateTolerance &&
            p.tenor_grid[k + 1] <= c.trade->expiry + c.trade->tenor + kDateTolerance) {
            sum += p.shifts[k];
            ++n;
        }
    return n ? sum / static_cast<double>(n) : 0.0;
}

std::vector<SmilePoint> smile_curves(const CaseEnvironment& env, const std::vector<ExerciseReport>& with_market,
                                     const std::vector<ExerciseReport>& without_market) {
    if (!env.config.trade) return {};
    const auto kind = env.config.trade->direction;
    const double shift = smile_shift(env);
    auto out = smile_report(with_market, "no_xva", false, kind, shift);
    for (auto& p : smile_report(with_market, "xva", true, kind, shift)) out.push_back(std::move(p));
    for (auto& p : smile_report(without_market, "xva_no_market_risk", true, kind, shift)) out.push_back(std::move(p));
    return out;
}

void write_exercise_csv(std::ostream& os, const std::vector<ExerciseReport>& reports, double notional) {
    os << "strike_pct,settlement,forward_pct,annuity,expiry,swap_delta,value,value_se,value_no_xva,value_no_xva_se,"
          "value_regressed_rollback,exercise_probability,exercise_probability_se,exercise_probability_no_xva,exercise_probability_no_xva_se";
    for (const char* t : kTermNames)
        os << ',' << t << "_at_exercise_bp," << t << "_at_exercise_pv_bp," << t << "_multiple," << t << "_in_price_bp";
    os << ",xva_in_price_se_bp,conditional_expectations\n";
    const double bp = 1.0 / (notional * kBasisPoint);
    for (const auto& r : reports) {
        os << num(100.0 * r.strike) << ',' << settlement_name(r.settlement) << ',' << num(100.0 * r.forward) << ','
           << num(r.annuity) << ',' << num(r.expiry) << ',' << num(r.swap_delta) << ',' << num(r.value) << ','
           << num(r.value_se) << ',' << num(r.value_no_xva) << ',' << num(r.value_no_xva_se) << ','
           << num(r.value_regressed_rollback) << ','
           << num(r.exercise_probability) << ',' << num(r.exercise_probability_se) << ','
           << num(r.exercise_probability_no_xva) << ',' << num(r.exercise_probability_no_xva_se);
        for (const char* t : kTermNames) {
            const std::size_t j = term_index(r.term_names, t);
            if (j == r.term_names.size()) {
                os << ",,,,";
                continue;
            }
            os << ',' << num(r.xva_at_exercise[j] * bp) << ',' << num(r.xva_at_exercise_pv[j] * bp) << ','
               << num(r.xva_multiple[j]) << ',' << num(r.xva_in_price[j] * bp);
        }
        os << ',' << num(r.xva_in_price_se_total * bp) << ',' << r.conditional_expectations << '\n';
    }
}

void write_smile_csv(std::ostream& os, const std::vector<SmilePoint>& points) {
    os << "curve,strike_pct,forward_pct,expiry,annuity,price,exercise_probability,normal_vol_bp,normal_status,"
          "lognormal_vol_pct,lognormal_status\n";
    for (const auto& p : points) {
        os << p.curve << ',' << num(100.0 * p.strike) << ',' << num(100.0 * p.forward) << ',' << num(p.expiry) << ','
           << num(p.annuity) << ',' << num(p.price) << ',' << num(p.exercise_probability) << ','
           << (p.normal.solved() ? num(p.normal.vol / kBasisPoint) : "") << ',' << status_name(p.normal) << ','
           << (p.lognormal.solved() ? num(100.0 * p.lognormal.vol) : "") << ',' << status_name(p.lognormal) << '\n';
    }
}

void write_mva_table_csv(std::ostream& os, const std::vector<ExerciseReport>& reports, double notional) {
    os << "strike_pct,mva_at_exercise_bp,mva_in_price_bp\n";
    const double bp = 1.0 / (notional * kBasisPoint);
    for (const auto& r : reports) {
        const std::size_t j = term_index(r.term_names, "MVA");
        const bool has = j < r.term_names.size();
        // reported as a positive cost
        os << num(100.0 * r.strike) << ',' << (has ? num(-r.xva_at_exercise_pv[j] * bp) : "") << ','
           << (has ? num(-r.xva_in_price[j] * bp) : "") << '\n';
    }
}

void write_portfolio_csv(std::ostream& os, const PortfolioResult& res) {
    os << "state,probability,book_value";
    for (const auto& t : res.term_names) os << ',' << t;
    os << '\n';
    for (std::size_t s = 0; s < res.states.size(); ++s) {
        os << state_label(res.states[s]) << ',' << num(res.state_probability[s]) << ',' << num(res.state_value[s]);
        for (double x : res.state_xva[s]) os << ',' << num(x);
        os << '\n';
    }
}

RunSummary run_command(Command cmd, const std::string& config_path, const RunOverrides& ov, std::ostream& log) {
    const auto t_start = Clock::now();
    std::string text;
    {
        std::ifstream in(config_path);
        if (!in) throw ConfigError({"cannot open config file: " + config_path});
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    auto base = std::filesystem::path(config_path).parent_path().string();
    auto loaded = validate_config(text, base.empty() ? "." : base);
    for (const auto& w : loaded.warnings) log << "warning: " << w << '\n';
    if (!loaded.config) throw ConfigError(loaded.errors);
    RunConfig cfg = std::move(*loaded.config);
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.out_dir) cfg.output_dir = *ov.out_dir;
    if (ov.no_market_risk) cfg.market_risk = false;

    const std::filesystem::path out_dir(cfg.output_dir);
    std::filesystem::create_directories(out_dir);
    RunSummary summary;
    auto emit = [&](const std::string& name, auto&& writer) {
        const auto path = out_dir / name;
        std::ofstream os(path, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write " + path.string());
        writer(os);
        summary.files.push_back(path.string());
    };

    auto env = prepare_case(cfg);
    const double notional = env->config.trade ? env->config.trade->notional : 1.0;
    nlohmann::json results = nlohmann::json::object();
    const auto t_price = Clock::now();
    const char* command_name = "";
    switch (cmd) {
        case Command::Price: {
            command_name = "price";
            const auto reports = strike_sweep(*env, env->config.market_risk);
            emit("exercise_report.csv", [&](std::ostream& os) { write_exercise_csv(os, reports, notional); });
            results["strikes"] = reports.size();
            break;
        }
        case Command::Smile: {
            command_name = "smile";
            const auto with = strike_sweep(*env, env->config.market_risk);
            const auto without = env->config.market_risk ? strike_sweep(*env, false) : with;
            const auto points = smile_curves(*env, with, without);
            emit("smile.csv", [&](std::ostream& os) { write_smile_csv(os, points); });
            results["lognormal_shift"] = smile_shift(*env);
            break;
        }
        case Command::MvaTable: {
            command_name = "mva-table";
            const auto reports = strike_sweep(*env, env->config.market_risk);
            emit("mva_table.csv", [&](std::ostream& os) { write_mva_table_csv(os, reports, notional); });
            emit("exercise_report.csv", [&](std::ostream& os) { write_exercise_csv(os, reports, notional); });
            break;
        }
        case Command::Portfolio: {
            command_name = "portfolio";
            const auto options = resolve_portfolio(*env);
            const auto res = portfolio_backward_induction(env->paths, options, env->context(env->config.market_risk),
                                                          env->config.portfolio_cap);
            emit("portfolio.csv", [&](std::ostream& os) { write_portfolio_csv(os, res); });
            results["value"] = res.value;
            results["std_error"] = res.std_error;
            break;
        }
    }
    const double pricing_seconds = seconds_since(t_price);

    nlohmann::json manifest;
    manifest["command"] = command_name;
    manifest["case"] = env->config.case_name;
    manifest["config"] = config_path;
    manifest["config_hash"] = config_hash(text);
    manifest["seed"] = env->config.seed;
    manifest["n_paths"] = env->config.n_paths;
    manifest["n_dates"] = env->paths.n_dates();
    manifest["market_risk_capital"] = env->config.market_risk;
    manifest["warnings"] = loaded.warnings;
    manifest["results"] = results;
    manifest["outputs"] = summary.files;
    manifest["timings_seconds"] = {{"simulation", env->simulation_seconds},
                                   {"pricing", pricing_seconds},
                                   {"total", seconds_since(t_start)}};
    emit("manifest.json", [&](std::ostream& os) { os << manifest.dump(2) << '\n'; });
    return summary;
}

}  // namespace xvab
