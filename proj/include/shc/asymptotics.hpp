#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shc/heat_brownian.hpp"
#include "shc/subordinator.hpp"

namespace shc {

class fit_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class CurveQuantity { q2, q_tilde, q_alpha_mc };

struct CurvePoint {
    double t;
    double value;
    double std_error = 0.0; // 0 for quadrature curves
};

// Sampled map t -> value on a decreasing geometric t-grid.
struct HeatCurve {
    CurveQuantity quantity = CurveQuantity::q_tilde;
    Domain domain = Domain::interval(0.0, 1.0);
    std::optional<double> alpha; // not set for q2 curves
    std::vector<CurvePoint> points;
    std::string meta;
};

struct FitDiagnostics {
    double exponent = 0.0;      // correction exponent used (0: 1/ln(1/t) model)
    double residual_norm = 0.0; // RMS residual / |estimate|
};

struct AsymptoticsReport {
    double predicted = 0.0;
    double estimated = 0.0;
    double rel_err = 0.0;
    FitDiagnostics fit;
    bool verdict = false;
};

// correction model for the extrapolation fit
enum class CorrectionModel { power, inverse_log };

// The scaling function of the two-term law: t^{1/alpha} (alpha > 1),
// t ln(1/t) (alpha = 1, requires t < 1), t (alpha < 1).
double f_alpha(const Alpha& alpha, double t);

// Closed-form second-term constant of the two-term expansion.
// alpha > 1: (2/pi) Gamma(1 - 1/alpha) |dD|  (checked against the
// E[sqrt(S_1)] form); alpha = 1: (2/pi)|dD|; alpha < 1: the subordination
// integral of the Brownian deficit, by quadrature. `strategy` switches the
// quadrature layout so the two routes can be compared.
double second_term_constant(const Domain& domain, const Alpha& alpha,
                            int strategy = 0);

// Third-term constant of the alpha in (1,2) expansion (stated for d >= 2;
// interval evaluation carries a warning flag in interval_warning).
double third_term_constant(const Domain& domain, const Alpha& alpha,
                           bool* interval_warning = nullptr);

// Remark-style bracket for the third-term constant on a 3-ball.
struct ThirdTermBracket {
    double lower;
    double upper;
};
ThirdTermBracket third_term_bracket_ball(double radius, const Alpha& alpha);

// Extrapolates the t -> 0 limit of (|D| - value_i) / f(t_i), where f is
// sqrt(t) for q2 curves and f_alpha otherwise. Fits c + a t^gamma with the
// supplied exponent, a log-regression estimate of it, or the a = 1/ln(1/t)
// regressor. predicted/verdict fields are left for the caller; throws
// fit_error when residuals exceed 10% of |c|.
AsymptoticsReport extract_limit(const HeatCurve& curve,
                                std::optional<double> next_order_exponent = {},
                                CorrectionModel model = CorrectionModel::power);

// Fit on caller-supplied ratios r_i (already scaled); same model choices.
AsymptoticsReport extract_limit_ratios(std::span<const double> ts,
                                       std::span<const double> rs,
                                       std::optional<double> next_order_exponent = {},
                                       CorrectionModel model = CorrectionModel::power);

// Completes a report against a closed-form prediction at tolerance rel_tol.
AsymptoticsReport& finalize_report(AsymptoticsReport& rep, double predicted,
                                   double rel_tol);

struct CheckRow {
    std::string name;
    double predicted = 0.0;
    double estimated = 0.0;
    double rel_err = 0.0;
    bool pass = false;
};

// Numerical verification of the moment-ratio limits (the L'Hopital lemmas):
// alpha = 1 runs the log-moment ratio; alpha in (1,2) runs the truncated
// second moment, the heat-content tail term (on the unit interval), and the
// half-moment tail. Each ratio is extrapolated and compared at rel_tol.
std::vector<CheckRow> verify_lemma_limits(const Alpha& alpha, double rel_tol = 0.01);

// limsup-style bound check of a killed-stable Monte Carlo curve against the
// closed-form constant: max over the small-t half of the scaled deficits
// must stay below constant * (1 + 3 relative SE).
struct UpperBoundReport {
    std::vector<double> scaled;  // (|D| - value_i)/f_alpha(t_i), small-t half
    double max_scaled = 0.0;
    double bound = 0.0;
    bool pass = false;
};
UpperBoundReport upper_bound_check(const Domain& domain, const Alpha& alpha,
                                   const HeatCurve& curve);

} // namespace shc
