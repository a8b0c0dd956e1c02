#include "xvab/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string_view>

namespace xvab {

SwapSpec TradeConfig::swap(double strike) const {
    SwapSpec s;
    s.notional = notional;
    s.fixed_rate = strike;
    s.start = expiry;
    s.end = expiry + tenor;
    s.fixed_frequency = fixed_frequency;
    s.float_frequency = float_frequency;
    s.direction = direction;
    return s;
}

namespace {

struct Diag {
    std::vector<std::string> errors, warnings;

    static std::string at(const YAML::Node& n) {
        const auto m = n.Mark();
        return m.is_null() ? std::string() : "line " + std::to_string(m.line + 1) + ": ";
    }
    void error(const YAML::Node& n, const std::string& msg) { errors.push_back(at(n) + msg); }
    void warn(const YAML::Node& n, const std::string& msg) { warnings.push_back(at(n) + msg); }
};

template <class T>
const char* type_name() {
    if constexpr (std::is_same_v<T, bool>) return "true or false";
    else if constexpr (std::is_integral_v<T>) return "an integer";
    else if constexpr (std::is_floating_point_v<T>) return "a number";
    else return "a string";
}

bool present(const YAML::Node& map, const char* key) { return map.IsMap() && map[key] && !map[key].IsNull(); }

template <class T>
std::optional<T> get(const YAML::Node& map, const char* key, const std::string& path, Diag& d) {
    if (!present(map, key)) return std::nullopt;
    const YAML::Node n = map[key];
    if (!n.IsScalar()) {
        d.error(n, path + "." + key + ": expected " + type_name<T>());
        return std::nullopt;
    }
    if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
        if (!n.Scalar().empty() && n.Scalar()[0] == '-') {
            d.error(n, path + "." + key + ": must not be negative");
            return std::nullopt;
        }
    }
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        d.error(n, path + "." + key + ": expected " + type_name<T>() + ", got '" + n.Scalar() + "'");
        return std::nullopt;
    }
}

template <class T>
void read(const YAML::Node& map, const char* key, T& out, const std::string& path, Diag& d) {
    if (auto v = get<T>(map, key, path, d)) out = *v;
}

bool is_map(const YAML::Node& n, const std::string& path, Diag& d) {
    if (n.IsMap()) return true;
    d.error(n, path + ": expected a mapping");
    return false;
}

void check_keys(const YAML::Node& map, std::initializer_list<std::string_view> allowed, const std::string& path,
                Diag& d) {
    for (auto it = map.begin(); it != map.end(); ++it) {
        const auto key = it->first.as<std::string>();
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            d.error(it->first, "unknown key '" + (path.empty() ? key : path + "." + key) + "'");
    }
}

std::optional<double> number(const YAML::Node& n, const std::string& path, Diag& d) {
    if (n.IsScalar()) {
        try {
            return n.as<double>();
        } catch (const YAML::Exception&) {
        }
    }
    d.error(n, path + ": expected a number");
    return std::nullopt;
}

/// A scalar broadcast to `count` entries or a list of exactly `count`.
std::optional<std::vector<double>> numbers(const YAML::Node& n, std::size_t count, const std::string& path, Diag& d) {
    if (n.IsScalar()) {
        if (auto v = number(n, path, d)) return std::vector<double>(count, *v);
        return std::nullopt;
    }
    if (!n.IsSequence()) {
        d.error(n, path + ": expected a number or a list of numbers");
        return std::nullopt;
    }
    if (count != 0 && n.size() != count) {
        d.error(n, path + ": expected " + std::to_string(count) + " entries, got " + std::to_string(n.size()));
        return std::nullopt;
    }
    std::vector<double> out;
    bool ok = true;
    for (std::size_t i = 0; i < n.size(); ++i) {
        auto v = number(n[i], path + "[" + std::to_string(i) + "]", d);
        ok = ok && v.has_value();
        out.push_back(v.value_or(0.0));
    }
    if (!ok) return std::nullopt;
    return out;
}

std::optional<Loading> loading(const YAML::Node& n, const std::string& path, Diag& d) {
    if (!n.IsSequence() || n.size() != 2) {
        d.error(n, path + ": expected a two-factor loading [a, b]");
        return std::nullopt;
    }
    auto a = number(n[0], path + "[0]", d);
    auto b = number(n[1], path + "[1]", d);
    if (!a || !b) return std::nullopt;
    return Loading{*a, *b};
}

template <class E>
std::optional<E> choice(const YAML::Node& map, const char* key, const std::string& path,
                        std::initializer_list<std::pair<const char*, E>> options, Diag& d) {
    auto s = get<std::string>(map, key, path, d);
    if (!s) return std::nullopt;
    for (const auto& [name, value] : options)
        if (*s == name) return value;
    std::string allowed;
    for (const auto& o : options) allowed += (allowed.empty() ? "" : ", ") + std::string(o.first);
    d.error(map[key], path + "." + key + ": '" + *s + "' is not one of " + allowed);
    return std::nullopt;
}

void positive(const YAML::Node& map, const char* key, double v, const std::string& path, Diag& d) {
    if (present(map, key) && !(v > 0.0)) d.error(map[key], path + "." + key + " must be > 0");
}

void non_negative(const YAML::Node& map, const char* key, double v, const std::string& path, Diag& d) {
    if (present(map, key) && !(v >= 0.0)) d.error(map[key], path + "." + key + " must be >= 0");
}

void unit_interval(const YAML::Node& map, const char* key, double v, const std::string& path, Diag& d) {
    if (present(map, key) && !(v >= 0.0 && v <= 1.0)) d.error(map[key], path + "." + key + " must lie in [0, 1]");
}

std::optional<SwapDirection> direction(const YAML::Node& map, const std::string& path, Diag& d) {
    return choice<SwapDirection>(map, "direction", path,
                                 {{"payer", SwapDirection::Payer}, {"receiver", SwapDirection::Receiver}}, d);
}

void parse_model(const YAML::Node& n, RunConfig& cfg, Diag& d, bool& model_ok) {
    const std::string path = "model";
    model_ok = false;
    if (!is_map(n, path, d)) return;
    check_keys(n, {"tenor_step", "horizon", "initial_forwards", "shift", "loadings", "cir"}, path, d);
    double step = 0.5, horizon = 10.0;
    read(n, "tenor_step", step, path, d);
    read(n, "horizon", horizon, path, d);
    positive(n, "tenor_step", step, path, d);
    positive(n, "horizon", horizon, path, d);
    if (!(step > 0.0) || !(horizon > 0.0)) return;
    std::vector<double> tenors;
    try {
        tenors = regular_grid(horizon, step);
    } catch (const std::exception& e) {
        d.error(n, path + ": " + e.what());
        return;
    }
    const std::size_t K = tenors.size() - 1;
    const std::size_t before = d.errors.size();

    std::vector<double> fwd, shifts(K, 0.0);
    if (!present(n, "initial_forwards")) d.error(n, "model.initial_forwards is required");
    else if (auto v = numbers(n["initial_forwards"], K, path + ".initial_forwards", d)) fwd = *v;
    if (present(n, "shift"))
        if (auto v = numbers(n["shift"], K, path + ".shift", d)) shifts = *v;
    for (double s : shifts)
        if (!(s >= 0.0)) {
            d.error(n["shift"], "model.shift must be >= 0");
            break;
        }

    std::vector<std::vector<Loading>> loadings;
    if (!present(n, "loadings")) {
        d.error(n, "model.loadings is required");
    } else if (const auto l = n["loadings"]; is_map(l, path + ".loadings", d)) {
        check_keys(l, {"stationary", "explicit"}, path + ".loadings", d);
        if (present(l, "stationary") == present(l, "explicit")) {
            d.error(l, "model.loadings needs exactly one of 'stationary' or 'explicit'");
        } else if (present(l, "stationary")) {
            const auto s = l["stationary"];
            std::vector<Loading> by_reset;
            if (!s.IsSequence() || s.size() == 0) d.error(s, "model.loadings.stationary: expected a list of [a, b]");
            else
                for (std::size_t i = 0; i < s.size(); ++i)
                    if (auto v = loading(s[i], path + ".loadings.stationary[" + std::to_string(i) + "]", d))
                        by_reset.push_back(*v);
            if (!by_reset.empty()) {
                // the last loading carries on to longer reset distances
                while (by_reset.size() + 1 < K) by_reset.push_back(by_reset.back());
                loadings = stationary_loadings(K, by_reset);
            }
        } else {
            const auto e = l["explicit"];
            if (!e.IsSequence() || e.size() != K) {
                d.error(e, "model.loadings.explicit: expected " + std::to_string(K) + " buckets");
            } else {
                for (std::size_t m = 0; m < K; ++m) {
                    std::vector<Loading> bucket;
                    const auto b = e[m];
                    if (!b.IsSequence()) {
                        d.error(b, "model.loadings.explicit[" + std::to_string(m) + "]: expected a list");
                        continue;
                    }
                    for (std::size_t i = 0; i < b.size(); ++i)
                        if (auto v = loading(b[i], path + ".loadings.explicit[" + std::to_string(m) + "][" +
                                                       std::to_string(i) + "]", d))
                            bucket.push_back(*v);
                    loadings.push_back(std::move(bucket));
                }
            }
        }
    }

    CirParams cir;
    cir.eta.assign(K, 0.0);
    if (present(n, "cir")) {
        const auto c = n["cir"];
        if (is_map(c, path + ".cir", d)) {
            check_keys(c, {"theta", "eta"}, path + ".cir", d);
            read(c, "theta", cir.theta, path + ".cir", d);
            positive(c, "theta", cir.theta, path + ".cir", d);
            if (present(c, "eta"))
                if (auto v = numbers(c["eta"], K, path + ".cir.eta", d)) cir.eta = *v;
            for (double e : cir.eta)
                if (!(e >= 0.0)) {
                    d.error(c["eta"], "model.cir.eta must be >= 0");
                    break;
                }
        }
    }
    if (d.errors.size() != before) return;
    try {
        cfg.model = make_lmm_params(tenors, fwd, shifts, loadings, cir);
        model_ok = true;
    } catch (const std::exception& e) {
        d.error(n, std::string("model: ") + e.what());
    }
}

void parse_simulation(const YAML::Node& root, RunConfig& cfg, Diag& d, bool model_ok) {
    const std::string path = "simulation";
    const YAML::Node n = root["simulation"];
    double steps_per_year = 12.0;
    double horizon = model_ok ? cfg.model.tenor_grid.back() : 10.0;
    if (!n || n.IsNull()) {
        d.warn(root, "simulation.n_paths missing: using the default of 4096");
    } else if (is_map(n, path, d)) {
        check_keys(n, {"n_paths", "steps_per_year", "horizon", "seed"}, path, d);
        if (present(n, "n_paths")) read(n, "n_paths", cfg.n_paths, path, d);
        else d.warn(n, "simulation.n_paths missing: using the default of 4096");
        read(n, "steps_per_year", steps_per_year, path, d);
        read(n, "horizon", horizon, path, d);
        read(n, "seed", cfg.seed, path, d);
        if (present(n, "n_paths") && cfg.n_paths < 1) d.error(n["n_paths"], "simulation.n_paths must be >= 1");
        positive(n, "steps_per_year", steps_per_year, path, d);
        positive(n, "horizon", horizon, path, d);
    }
    if (!(steps_per_year > 0.0) || !(horizon > 0.0)) return;
    try {
        cfg.grid = regular_grid(horizon, 1.0 / steps_per_year);
    } catch (const std::exception& e) {
        d.error(n ? n : root, std::string("simulation: ") + e.what());
        return;
    }
    if (model_ok) {
        if (horizon > cfg.model.tenor_grid.back() + kDateTolerance)
            d.error(n ? n : root, "simulation.horizon extends past the model horizon");
        for (double T : cfg.model.tenor_grid) {
            if (T > horizon + kDateTolerance) break;
            const bool on = std::any_of(cfg.grid.begin(), cfg.grid.end(),
                                        [T](double g) { return std::abs(g - T) <= kDateTolerance; });
            if (!on) {
                d.error(n ? n : root, "simulation grid misses tenor date " + std::to_string(T));
                break;
            }
        }
    }
}

std::optional<SwapSpec> parse_swap(const YAML::Node& n, const std::string& path, Diag& d) {
    if (!is_map(n, path, d)) return std::nullopt;
    check_keys(n, {"direction", "notional", "fixed_rate", "start", "end", "fixed_frequency", "float_frequency"}, path, d);
    SwapSpec s;
    if (auto v = direction(n, path, d)) s.direction = *v;
    read(n, "notional", s.notional, path, d);
    read(n, "fixed_rate", s.fixed_rate, path, d);
    read(n, "fixed_frequency", s.fixed_frequency, path, d);
    read(n, "float_frequency", s.float_frequency, path, d);
    for (const char* key : {"fixed_rate", "start", "end"})
        if (!present(n, key)) d.error(n, path + "." + key + " is required");
    read(n, "start", s.start, path, d);
    read(n, "end", s.end, path, d);
    try {
        s.validate();
    } catch (const std::exception& e) {
        d.error(n, path + ": " + e.what());
        return std::nullopt;
    }
    return s;
}

void parse_trade(const YAML::Node& n, RunConfig& cfg, Diag& d) {
    const std::string path = "trade";
    if (!is_map(n, path, d)) return;
    check_keys(n, {"direction", "notional", "expiry", "tenor", "fixed_frequency", "float_frequency", "settlement"}, path,
               d);
    TradeConfig t;
    if (auto v = direction(n, path, d)) t.direction = *v;
    if (auto v = choice<Settlement>(n, "settlement", path, {{"physical", Settlement::Physical}, {"cash", Settlement::Cash}},
                                    d))
        t.settlement = *v;
    read(n, "notional", t.notional, path, d);
    read(n, "expiry", t.expiry, path, d);
    read(n, "tenor", t.tenor, path, d);
    read(n, "fixed_frequency", t.fixed_frequency, path, d);
    read(n, "float_frequency", t.float_frequency, path, d);
    positive(n, "expiry", t.expiry, path, d);
    positive(n, "tenor", t.tenor, path, d);
    try {
        t.swap(0.0).validate();
    } catch (const std::exception& e) {
        d.error(n, path + ": " + e.what());
    }
    cfg.trade = t;
}

void parse_strikes(const YAML::Node& n, RunConfig& cfg, Diag& d) {
    const std::string path = "strikes";
    if (!is_map(n, path, d)) return;
    check_keys(n, {"atm_offsets_bp", "absolute"}, path, d);
    if (present(n, "atm_offsets_bp") == present(n, "absolute")) {
        d.error(n, "strikes needs exactly one of 'atm_offsets_bp' or 'absolute'");
        return;
    }
    const bool rel = present(n, "atm_offsets_bp");
    const auto list = n[rel ? "atm_offsets_bp" : "absolute"];
    if (!list.IsSequence() || list.size() == 0) {
        d.error(list, path + ": expected a non-empty list");
        return;
    }
    if (auto v = numbers(list, list.size(), path, d)) {
        cfg.strikes.relative = rel;
        cfg.strikes.values = *v;
    }
}

void parse_credit(const YAML::Node& n, RunConfig& cfg, Diag& d) {
    const std::string path = "credit";
    if (!is_map(n, path, d)) return;
    check_keys(n, {"lambda_B", "lambda_C", "R_B", "R_C", "s_F", "s_X", "r_IC", "s_IB", "gamma_K", "phi", "r"}, path, d);
    CreditFundingParams::Inputs in;
    read(n, "lambda_B", in.lambda_B, path, d);
    read(n, "lambda_C", in.lambda_C, path, d);
    read(n, "R_B", in.R_B, path, d);
    read(n, "R_C", in.R_C, path, d);
    read(n, "s_X", in.s_X, path, d);
    read(n, "r_IC", in.r_IC, path, d);
    read(n, "s_IB", in.s_IB, path, d);
    read(n, "gamma_K", in.gamma_K, path, d);
    read(n, "phi", in.phi, path, d);
    read(n, "r", in.r, path, d);
    const std::size_t before = d.errors.size();
    non_negative(n, "lambda_B", in.lambda_B, path, d);
    non_negative(n, "lambda_C", in.lambda_C, path, d);
    unit_interval(n, "R_B", in.R_B, path, d);
    unit_interval(n, "R_C", in.R_C, path, d);
    unit_interval(n, "phi", in.phi, path, d);
    auto s_F = get<double>(n, "s_F", path, d);
    if (s_F && std::abs(*s_F - (1.0 - in.R_B) * in.lambda_B) > 1e-12)
        d.error(n["s_F"], "credit.s_F = " + std::to_string(*s_F) + " is inconsistent with s_F = (1 - R_B) lambda_B = " +
                              std::to_string((1.0 - in.R_B) * in.lambda_B));
    if (d.errors.size() != before) return;
    try {
        cfg.credit = CreditFundingParams(in);
    } catch (const std::exception& e) {
        d.error(n, path + ": " + e.what());
    }
}

void parse_xva(const YAML::Node& n, RunConfig& cfg, Diag& d) {
    const std::string path = "xva";
    if (!is_map(n, path, d)) return;
    check_keys(n, {"terms", "kva_alpha", "collateral", "initial_margin_received", "market_risk_capital"}, path, d);
    if (present(n, "terms")) {
        const auto t = n["terms"];
        if (!t.IsSequence()) {
            d.error(t, "xva.terms: expected a list of term names");
        } else {
            cfg.terms_enabled.fill(false);
            for (std::size_t i = 0; i < t.size(); ++i) {
                const auto name = t[i].IsScalar() ? t[i].Scalar() : std::string();
                const auto it = std::find_if(kTermNames.begin(), kTermNames.end(),
                                             [&](const char* s) { return name == s; });
                if (it == kTermNames.end()) d.error(t[i], "xva.terms: unknown term '" + name + "'");
                else cfg.terms_enabled[static_cast<std::size_t>(it - kTermNames.begin())] = true;
            }
        }
    }
    if (auto v = choice<KvaAlpha>(n, "kva_alpha", path, {{"table", KvaAlpha::Table}, {"short_rate", KvaAlpha::ShortRate}}, d))
        cfg.kva_form = *v;
    if (auto v = choice<CollateralMode>(n, "collateral", path,
                                        {{"none", CollateralMode::None}, {"variation_margin", CollateralMode::VariationMargin}},
                                        d))
        cfg.collateral = *v;
    read(n, "initial_margin_received", cfg.receive_margin, path, d);
    read(n, "market_risk_capital", cfg.market_risk, path, d);
}

void parse_margin(const YAML::Node& n, RunConfig& cfg, Diag& d, const std::string& base_dir) {
    const std::string path = "initial_margin";
    if (!is_map(n, path, d)) return;
    check_keys(n, {"enabled", "es_level", "horizon_scale", "overlap_days", "stride", "shocks"}, path, d);
    cfg.margin_enabled = true;
    read(n, "enabled", cfg.margin_enabled, path, d);
    read(n, "es_level", cfg.im.es_level, path, d);
    read(n, "horizon_scale", cfg.im.horizon_scale, path, d);
    read(n, "overlap_days", cfg.im.overlap_days, path, d);
    read(n, "stride", cfg.margin_stride, path, d);
    try {
        cfg.im.validate();
    } catch (const std::exception& e) {
        d.error(n, path + ": " + e.what());
    }
    if (present(n, "stride") && cfg.margin_stride < 1) d.error(n["stride"], "initial_margin.stride must be >= 1");
    if (!present(n, "shocks")) return;
    const auto s = n["shocks"];
    if (!is_map(s, path + ".shocks", d)) return;
    check_keys(s, {"file", "synthetic"}, path + ".shocks", d);
    if (present(s, "file") == present(s, "synthetic")) {
        d.error(s, "initial_margin.shocks needs exactly one of 'file' or 'synthetic'");
        return;
    }
    if (present(s, "file")) {
        auto f = get<std::string>(s, "file", path + ".shocks", d);
        if (!f) return;
        std::filesystem::path p(*f);
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        cfg.shocks.file = p.string();
        if (!std::filesystem::exists(p)) d.error(s["file"], "initial_margin.shocks.file not found: " + p.string());
        return;
    }
    const auto syn = s["synthetic"];
    const std::string sp = path + ".shocks.synthetic";
    if (!is_map(syn, sp, d)) return;
    check_keys(syn, {"tenors", "daily_vol", "correlation_length", "days", "seed"}, sp, d);
    auto& sc = cfg.shocks.synthetic;
    if (present(syn, "tenors"))
        if (auto v = numbers(syn["tenors"], 0, sp + ".tenors", d)) sc.tenors = *v;
    if (present(syn, "daily_vol")) {
        if (auto v = numbers(syn["daily_vol"], sc.tenors.size(), sp + ".daily_vol", d)) sc.daily_vol = *v;
    } else if (sc.daily_vol.size() != sc.tenors.size()) {
        d.error(syn, sp + ".daily_vol is required when tenors change");
    }
    read(syn, "correlation_length", sc.correlation_length, sp, d);
    read(syn, "days", sc.days, sp, d);
    read(syn, "seed", sc.seed, sp, d);
    positive(syn, "correlation_length", sc.correlation_length, sp, d);
    if (present(syn, "days") && sc.days < cfg.im.overlap_days) d.error(syn["days"], sp + ".days shorter than the overlap window");
    for (double v : sc.daily_vol)
        if (!(v >= 0.0)) {
            d.error(syn, sp + ".daily_vol must be >= 0");
            break;
        }
}

double edge(const YAML::Node& n, const std::string& path, Diag& d) {
    if (n.IsNull() || (n.IsScalar() && (n.Scalar() == "inf" || n.Scalar() == ".inf")))
        return std::numeric_limits<double>::infinity();
    return number(n, path, d).value_or(0.0);
}

void parse_capital(const YAML::Node& n, RunConfig& cfg, Diag& d) {
    const std::string path = "capital";
    if (!is_map(n, path, d)) return;
    check_keys(n, {"rating", "risk_weight", "capital_ratio", "ccr_addons", "vol_scenarios", "yield_shifts", "coupon_threshold"},
               path, d);
    auto& c = cfg.capital;
    read(n, "rating", c.counterparty_rating, path, d);
    read(n, "risk_weight", c.risk_weight, path, d);
    read(n, "capital_ratio", c.capital_ratio, path, d);
    read(n, "coupon_threshold", c.coupon_threshold, path, d);
    if (present(n, "ccr_addons")) {
        const auto a = n["ccr_addons"];
        if (!a.IsSequence() || a.size() == 0) {
            d.error(a, "capital.ccr_addons: expected a list of [max_maturity, addon]");
        } else {
            c.ccr_addons.clear();
            for (std::size_t i = 0; i < a.size(); ++i) {
                const std::string p = path + ".ccr_addons[" + std::to_string(i) + "]";
                if (!a[i].IsSequence() || a[i].size() != 2) {
                    d.error(a[i], p + ": expected [max_maturity, addon]");
                    continue;
                }
                c.ccr_addons.push_back({edge(a[i][0], p, d), number(a[i][1], p, d).value_or(0.0)});
            }
        }
    }
    if (present(n, "vol_scenarios"))
        if (auto v = numbers(n["vol_scenarios"], 3, path + ".vol_scenarios", d)) std::copy(v->begin(), v->end(), c.vol_scenarios.begin());
    if (present(n, "yield_shifts")) {
        const auto y = n["yield_shifts"];
        if (!y.IsSequence() || y.size() == 0) {
            d.error(y, "capital.yield_shifts: expected a list of [max_maturity, high_coupon, low_coupon]");
        } else {
            c.yield_shifts.clear();
            for (std::size_t i = 0; i < y.size(); ++i) {
                const std::string p = path + ".yield_shifts[" + std::to_string(i) + "]";
                if (!y[i].IsSequence() || y[i].size() != 3) {
                    d.error(y[i], p + ": expected [max_maturity, high_coupon, low_coupon]");
                    continue;
                }
                c.yield_shifts.push_back(
                    {edge(y[i][0], p, d), number(y[i][1], p, d).value_or(0.0), number(y[i][2], p, d).value_or(0.0)});
            }
        }
    }
    try {
        c.validate();
    } catch (const std::exception& e) {
        d.error(n, path + ": " + e.what());
    }
}

void parse_regression(const YAML::Node& n, RunConfig& cfg, Diag& d) {
    const std::string path = "regression";
    if (!is_map(n, path, d)) return;
    check_keys(n, {"bandwidth", "method"}, path, d);
    read(n, "bandwidth", cfg.regression.bandwidth, path, d);
    if (present(n, "bandwidth") && cfg.regression.bandwidth < 1) d.error(n["bandwidth"], "regression.bandwidth must be >= 1");
    if (auto v = choice<RegressionMethod>(n, "method", path,
                                          {{"local", RegressionMethod::Local}, {"quadratic", RegressionMethod::Quadratic}}, d))
        cfg.regression.method = *v;
}

void parse_portfolio(const YAML::Node& n, RunConfig& cfg, Diag& d) {
    const std::string path = "portfolio";
    if (!is_map(n, path, d)) return;
    check_keys(n, {"cap", "options"}, path, d);
    read(n, "cap", cfg.portfolio_cap, path, d);
    if (!present(n, "options")) return;
    const auto opts = n["options"];
    if (!opts.IsSequence()) {
        d.error(opts, "portfolio.options: expected a list");
        return;
    }
    if (opts.size() > cfg.portfolio_cap)
        d.error(opts, "portfolio.options: " + std::to_string(opts.size()) +
                          " options exceed the cap of " + std::to_string(cfg.portfolio_cap) + " (desk-scale only)");
    for (std::size_t i = 0; i < opts.size(); ++i) {
        const auto o = opts[i];
        const std::string p = path + ".options[" + std::to_string(i) + "]";
        if (!is_map(o, p, d)) continue;
        check_keys(o, {"direction", "notional", "strike", "strike_offset_bp", "start", "end", "fixed_frequency",
                       "float_frequency", "exercise_dates"},
                   p, d);
        PortfolioOptionConfig pc;
        auto& s = pc.option.underlying;
        if (auto v = direction(o, p, d)) s.direction = *v;
        read(o, "notional", s.notional, p, d);
        read(o, "start", s.start, p, d);
        read(o, "end", s.end, p, d);
        read(o, "fixed_frequency", s.fixed_frequency, p, d);
        read(o, "float_frequency", s.float_frequency, p, d);
        for (const char* key : {"start", "end"})
            if (!present(o, key)) d.error(o, p + "." + key + " is required");
        if (present(o, "strike") == present(o, "strike_offset_bp"))
            d.error(o, p + " needs exactly one of 'strike' or 'strike_offset_bp'");
        read(o, "strike", s.fixed_rate, p, d);
        if (auto v = get<double>(o, "strike_offset_bp", p, d)) pc.strike_offset_bp = *v;
        if (present(o, "exercise_dates"))
            if (auto v = numbers(o["exercise_dates"], 0, p + ".exercise_dates", d)) pc.option.exercise_dates = *v;
        try {
            pc.option.validate();
        } catch (const std::exception& e) {
            d.error(o, p + ": " + e.what());
        }
        cfg.portfolio.push_back(std::move(pc));
    }
}

void check_dates_on_grid(RunConfig& cfg, const YAML::Node& root, Diag& d) {
    if (cfg.grid.empty()) return;
    auto on = [&](double t) {
        return std::any_of(cfg.grid.begin(), cfg.grid.end(), [t](double g) { return std::abs(g - t) <= kDateTolerance; });
    };
    auto check_swap = [&](const SwapSpec& s, const YAML::Node& n, const std::string& what) {
        for (double t : s.float_dates())
            if (!on(t)) {
                d.error(n, what + ": date " + std::to_string(t) + " is not on the simulation grid");
                return;
            }
        for (double t : s.fixed_dates())
            if (!on(t)) {
                d.error(n, what + ": date " + std::to_string(t) + " is not on the simulation grid");
                return;
            }
    };
    if (cfg.trade) {
        try {
            check_swap(cfg.trade->swap(0.0), root["trade"], "trade");
        } catch (const std::exception&) {
        }
    }
    for (std::size_t i = 0; i < cfg.netting_set.size(); ++i)
        check_swap(cfg.netting_set[i], root["netting_set"][i], "netting_set[" + std::to_string(i) + "]");
    for (std::size_t i = 0; i < cfg.portfolio.size(); ++i) {
        const auto& o = cfg.portfolio[i].option;
        try {
            for (double t : o.dates()) check_swap(o.swap_from(t), root["portfolio"]["options"][i], "portfolio.options[" + std::to_string(i) + "]");
        } catch (const std::exception&) {
        }
    }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error([&] {
          std::string msg = "invalid configuration:";
          for (const auto& e : errors) msg += "\n  " + e;
          return msg;
      }()),
      errors_(std::move(errors)) {}

ConfigResult validate_config(const std::string& text, const std::string& base_dir) {
    ConfigResult out;
    Diag d;
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        out.errors.push_back("line " + std::to_string(e.mark.line + 1) + ": YAML syntax error: " + e.msg);
        return out;
    }
    if (!root.IsMap()) {
        out.errors.push_back("config must be a YAML mapping of sections");
        return out;
    }
    check_keys(root,
               {"case", "model", "simulation", "trade", "strikes", "netting_set", "credit", "xva", "initial_margin",
                "capital", "regression", "portfolio", "output"},
               "", d);

    RunConfig cfg;
    read(root, "case", cfg.case_name, "case", d);
    bool model_ok = false;
    if (!present(root, "model")) d.error(root, "section 'model' is required");
    else parse_model(root["model"], cfg, d, model_ok);
    parse_simulation(root, cfg, d, model_ok);
    if (present(root, "trade")) parse_trade(root["trade"], cfg, d);
    if (present(root, "strikes")) parse_strikes(root["strikes"], cfg, d);
    if (present(root, "netting_set")) {
        const auto ns = root["netting_set"];
        if (!ns.IsSequence()) d.error(ns, "netting_set: expected a list of swaps");
        else
            for (std::size_t i = 0; i < ns.size(); ++i)
                if (auto s = parse_swap(ns[i], "netting_set[" + std::to_string(i) + "]", d)) cfg.netting_set.push_back(*s);
    }
    if (present(root, "credit")) parse_credit(root["credit"], cfg, d);
    if (present(root, "xva")) parse_xva(root["xva"], cfg, d);
    if (present(root, "initial_margin")) parse_margin(root["initial_margin"], cfg, d, base_dir);
    if (present(root, "capital")) parse_capital(root["capital"], cfg, d);
    if (present(root, "regression")) parse_regression(root["regression"], cfg, d);
    if (present(root, "portfolio")) parse_portfolio(root["portfolio"], cfg, d);
    if (present(root, "output")) {
        const auto o = root["output"];
        if (is_map(o, "output", d)) {
            check_keys(o, {"dir"}, "output", d);
            read(o, "dir", cfg.output_dir, "output", d);
        }
    }
    if (cfg.regression.bandwidth > cfg.n_paths)
        d.error(present(root, "regression") ? root["regression"] : root, "regression.bandwidth exceeds simulation.n_paths");
    if (model_ok) {
        const double horizon = cfg.grid.empty() ? 0.0 : cfg.grid.back();
        auto beyond = [&](double end, const std::string& what) {
            if (end > horizon + kDateTolerance) d.error(root, what + " ends after the simulation horizon");
        };
        if (cfg.trade) beyond(cfg.trade->expiry + cfg.trade->tenor, "trade");
        for (const auto& s : cfg.netting_set) beyond(s.end, "a netting_set swap");
        for (const auto& o : cfg.portfolio) beyond(o.option.underlying.end, "a portfolio option");
        check_dates_on_grid(cfg, root, d);
    }
    cfg.capital.market_risk = cfg.market_risk;

    out.errors = std::move(d.errors);
    out.warnings = std::move(d.warnings);
    if (out.errors.empty()) out.config = std::move(cfg);
    return out;
}

ConfigResult load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot open config file: " + path});
    std::stringstream ss;
    ss << in.rdbuf();
    auto base = std::filesystem::path(path).parent_path().string();
    if (base.empty()) base = ".";
    auto result = validate_config(ss.str(), base);
    if (!result.config) throw ConfigError(result.errors);
    return result;
}

std::string config_hash(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace xvab
