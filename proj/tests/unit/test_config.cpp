#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "xvab/config.hpp"

using namespace xvab;

namespace {

const std::string kBase = R"(case: tiny
model:
  tenor_step: 1
  horizon: 4
  initial_forwards: [0.02, 0.021, 0.022, 0.023]
  shift: 0.01
  loadings:
    stationary: [[0.15, 0.0], [0.14, 0.02], [0.13, 0.03]]
  cir:
    theta: 1.0
    eta: 0.2
simulation:
  n_paths: 64
  steps_per_year: 4
  horizon: 4
  seed: 3
credit:
  lambda_B: 0.01
  lambda_C: 0.02
  R_B: 0.4
  R_C: 0.4
)";

bool mentions(const std::vector<std::string>& msgs, const std::string& needle) {
    for (const auto& m : msgs)
        if (m.find(needle) != std::string::npos) return true;
    return false;
}

std::string replaced(std::string text, const std::string& from, const std::string& to) {
    const auto at = text.find(from);
    EXPECT_NE(at, std::string::npos) << from;
    return text.replace(at, from.size(), to);
}

}  // namespace

TEST(Config, MinimalDefinitionValidates) {
    const auto r = validate_config(kBase);
    ASSERT_TRUE(r.config.has_value()) << (r.errors.empty() ? "" : r.errors.front());
    EXPECT_TRUE(r.errors.empty());
    EXPECT_TRUE(r.warnings.empty());
    EXPECT_EQ(r.config->n_paths, 64u);
    EXPECT_FALSE(r.config->trade.has_value());
}

TEST(Config, MissingPathCountWarnsAndDefaults) {
    const auto r = validate_config(replaced(kBase, "  n_paths: 64\n", ""));
    ASSERT_TRUE(r.config.has_value());
    EXPECT_EQ(r.config->n_paths, 4096u);
    EXPECT_TRUE(mentions(r.warnings, "simulation.n_paths missing"));
}

TEST(Config, NegativeHazardNamesTheFieldAndLine) {
    const auto r = validate_config(replaced(kBase, "lambda_C: 0.02", "lambda_C: -0.02"));
    EXPECT_FALSE(r.config.has_value());
    EXPECT_TRUE(mentions(r.errors, "credit.lambda_C must be >= 0"));
    EXPECT_TRUE(mentions(r.errors, "line 19:"));
}

TEST(Config, InconsistentFundingSpreadCitesTheIdentity) {
    const auto r = validate_config(kBase + "  s_F: 0.01\n");
    EXPECT_FALSE(r.config.has_value());
    EXPECT_TRUE(mentions(r.errors, "s_F = (1 - R_B) lambda_B"));
    EXPECT_TRUE(validate_config(kBase + "  s_F: 0.006\n").config.has_value());
}

TEST(Config, UnknownKeyIsRejectedWithItsLine) {
    const auto r = validate_config(replaced(kBase, "  seed: 3\n", "  seed: 3\n  sead: 4\n"));
    EXPECT_FALSE(r.config.has_value());
    EXPECT_TRUE(mentions(r.errors, "line 17: unknown key 'simulation.sead'"));
}

TEST(Config, ErrorsAccumulate) {
    auto text = replaced(kBase, "lambda_C: 0.02", "lambda_C: -0.02");
    text = replaced(text, "R_C: 0.4", "R_C: 1.4");
    text = replaced(text, "theta: 1.0", "theta: 0.0");
    const auto r = validate_config(text);
    EXPECT_GE(r.errors.size(), 3u);
    EXPECT_TRUE(mentions(r.errors, "credit.R_C"));
    EXPECT_TRUE(mentions(r.errors, "theta"));
}

TEST(Config, TradeAndSweepChecks) {
    const std::string trade = "trade:\n  direction: payer\n  expiry: 1\n  tenor: 2\n  fixed_frequency: 1\n"
                              "  float_frequency: 1\nstrikes:\n  atm_offsets_bp: [-50, 0, 50]\n";
    const auto ok = validate_config(kBase + trade);
    ASSERT_TRUE(ok.config.has_value()) << (ok.errors.empty() ? "" : ok.errors.front());
    EXPECT_EQ(ok.config->strikes.values.size(), 3u);
    const auto late = validate_config(kBase + replaced(trade, "tenor: 2", "tenor: 5"));
    EXPECT_FALSE(late.config.has_value());
    const auto bad_dir = validate_config(kBase + replaced(trade, "payer", "sideways"));
    EXPECT_FALSE(bad_dir.config.has_value());
}

TEST(Config, MalformedYamlIsAnError) {
    const auto r = validate_config("model: [1, 2\n");
    EXPECT_FALSE(r.config.has_value());
    EXPECT_FALSE(r.errors.empty());
}

TEST(Config, HashIsStableHex) {
    const auto h = config_hash(kBase);
    EXPECT_EQ(h.size(), 16u);
    EXPECT_EQ(h.find_first_not_of("0123456789abcdef"), std::string::npos);
    EXPECT_EQ(h, config_hash(kBase));
    EXPECT_NE(h, config_hash(kBase + "\n"));
}

TEST(Config, LoadThrowsOnInvalidFile) {
    const auto path = std::filesystem::temp_directory_path() / "xvab_bad_config.yaml";
    {
        std::ofstream out(path);
        out << replaced(kBase, "lambda_C: 0.02", "lambda_C: -0.02");
    }
    EXPECT_THROW(load_config(path.string()), ConfigError);
    std::filesystem::remove(path);
    EXPECT_THROW(load_config("/nonexistent/xvab.yaml"), std::exception);
}

TEST(Config, ShippedConfigsValidate) {
    const std::filesystem::path dir = std::filesystem::path(XVAB_SOURCE_DIR) / "configs";
    std::size_t seen = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".yaml") continue;
        ++seen;
        const auto r = load_config(entry.path().string());
        EXPECT_TRUE(r.config.has_value()) << entry.path();
        EXPECT_TRUE(r.warnings.empty()) << entry.path();
    }
    EXPECT_GE(seen, 3u);
}
