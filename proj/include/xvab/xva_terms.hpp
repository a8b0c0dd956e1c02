#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace xvab {

/// Deterministic rate as a function of time: piecewise linear through
/// (time, value) knots, flat outside them.
class RateCurve {
public:
    RateCurve() = default;
    explicit RateCurve(double constant) : times_{0.0}, values_{constant} {}
    RateCurve(std::vector<double> times, std::vector<double> values);

    double operator()(double t) const;
    /// Exact integral of the curve over [a, b].
    double integral(double a, double b) const;
    bool is_zero() const;

private:
    std::vector<double> times_{0.0};
    std::vector<double> values_{0.0};
};

/// Credit, funding and capital inputs (all rates per year). s_F is derived
/// as (1 - R_B) lambda_B; r_B = r + s_F.
class CreditFundingParams {
public:
    struct Inputs {
        double lambda_B = 0.0;
        double lambda_C = 0.0;
        double R_B = 0.0;
        double R_C = 0.0;
        double s_X = 0.0;
        double r_IC = 0.0;
        double s_IB = 0.0;
        double gamma_K = 0.0;
        double phi = 0.0;
        double r = 0.0;
    };

    CreditFundingParams() = default;
    explicit CreditFundingParams(const Inputs& in);
    /// Same, but checks a separately quoted funding spread against (1 - R_B) lambda_B.
    CreditFundingParams(const Inputs& in, double quoted_s_F);

    const Inputs& inputs() const { return in_; }
    double lambda_B() const { return in_.lambda_B; }
    double lambda_C() const { return in_.lambda_C; }
    double R_B() const { return in_.R_B; }
    double R_C() const { return in_.R_C; }
    double s_F() const { return (1.0 - in_.R_B) * in_.lambda_B; }
    double s_X() const { return in_.s_X; }
    double r_IC() const { return in_.r_IC; }
    double s_IB() const { return in_.s_IB; }
    double gamma_K() const { return in_.gamma_K; }
    double phi() const { return in_.phi; }
    double r() const { return in_.r; }
    double r_B() const { return in_.r + s_F(); }

private:
    Inputs in_{};
};

double closeout_gC(double V, double X, double R_C);
double closeout_gB(double V, double X, double R_B);

/// Simulated quantity an adjustment integrates.
enum class Quantity { Value, Collateral, InitialMarginReceived, Capital, InitialMarginPosted };
/// Exponent applied to the quantity inside the expectation.
enum class Exponent { PositivePart, Identity };

/// XVA(alpha, beta, gamma, delta) = -int alpha(u) exp(-int beta) E[gamma(u)^delta] du.
struct XvaTermSpec {
    std::string name;
    RateCurve alpha;
    RateCurve beta;
    Quantity gamma = Quantity::Value;
    Exponent delta = Exponent::Identity;

    double apply_exponent(double x) const { return delta == Exponent::PositivePart ? (x > 0.0 ? x : 0.0) : x; }
};

/// Whether beta carries the short rate. Engines that deflate profiles by
/// the pathwise numeraire use Excluded so rates are not discounted twice.
enum class RateInBeta { Included, Excluded };
/// KVA alpha: gamma_K - r_B phi (tabulated form) or gamma_K - r phi.
enum class KvaAlpha { Table, ShortRate };

XvaTermSpec cva_term(const CreditFundingParams& p, RateInBeta r_mode = RateInBeta::Included);
XvaTermSpec fva_term(const CreditFundingParams& p, RateInBeta r_mode = RateInBeta::Included);
XvaTermSpec colva_x_term(const CreditFundingParams& p, RateInBeta r_mode = RateInBeta::Included);
XvaTermSpec colva_ic_term(const CreditFundingParams& p, RateInBeta r_mode = RateInBeta::Included);
XvaTermSpec kva_term(const CreditFundingParams& p, RateInBeta r_mode = RateInBeta::Included,
                     KvaAlpha form = KvaAlpha::Table);
XvaTermSpec mva_term(const CreditFundingParams& p, RateInBeta r_mode = RateInBeta::Included);

/// All six tabulated terms, in order CVA, FVA, COLVA_X, COLVA_IC, KVA, MVA.
std::vector<XvaTermSpec> standard_terms(const CreditFundingParams& p, RateInBeta r_mode = RateInBeta::Included,
                                        KvaAlpha form = KvaAlpha::Table);

/// E_t[gamma(t_i)^delta] on t_0 = t < t_1 < ... < t_N.
struct ExposureProfile {
    enum class Provenance { PathwiseAverage, RegressionAtDate };
    std::vector<double> dates;
    std::vector<double> values;
    Provenance provenance = Provenance::PathwiseAverage;
};

/// Trapezoid rule; the integration starts at profile.dates.front().
double xva_term_integral(const XvaTermSpec& term, const ExposureProfile& profile);

/// weights[j][i] with U = sum_j sum_i weights[j][i] E[gamma_j(t_i)^delta_j].
std::vector<std::vector<double>> build_weights(std::span<const XvaTermSpec> terms, std::span<const double> dates);

struct Adjustment {
    double U = 0.0;
    double economic_value = 0.0;  // V + U
};
Adjustment aggregate_U(std::span<const double> term_values, double V = 0.0);

}  // namespace xvab
