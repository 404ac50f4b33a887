#pragma once

#include <cstdint>
#include <stdexcept>

#include "shc/rng.hpp"

namespace shc {

class nonconvergence_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class StabilityCase { subcritical, critical, supercritical }; // alpha <1, =1, >1

// Stability index alpha in (0,2), with the subordinator index rho = alpha/2
// cached. Endpoints are rejected.
class Alpha {
public:
    explicit Alpha(double alpha);

    double value() const { return alpha_; }
    double rho() const { return rho_; }
    StabilityCase stability_case() const;

private:
    double alpha_;
    double rho_;
};

enum class DensityMethod { series, fourier };

struct DensityEval {
    double value = 0.0;     // density, units 1/time
    DensityMethod method = DensityMethod::series;
    double est_error = 0.0; // relative error estimate
};

// Explicit Stirling majorant of the density-series terms summed from
// n_start; decreasing in n_start.
struct TruncationBound {
    int n_start = 0;
    double bound = 0.0;
};

// Majorant of the tail sum_{n >= n_start} |term_n(x)| of the density series
// at time 1, from the Stirling bound on Gamma(1 + rho n)/n!.
TruncationBound series_tail_majorant(const Alpha& alpha, double x, int n_start);

// Crossover abscissa: smallest x at which the alternating series meets the
// reference tolerance with cancellation amplification within budget.
// Determined once per alpha by scanning and cached.
double series_crossover(const Alpha& alpha);

// Density g(1, x) of the (alpha/2)-stable subordinator at time 1.
// x >= series_crossover: alternating power series, stopped when the
// Stirling majorant tail is below tol (relative) with bounded cancellation.
// x below the crossover: inversion integral on the deformed (real,
// positive-integrand) contour, evaluated by adaptive quadrature; reported
// as the `fourier` method. tol is relative.
DensityEval density_at_one(const Alpha& alpha, double x, double tol = 1e-10);

// g(t, x) = t^{-2/alpha} g(1, x t^{-2/alpha}); t = 1 falls through to
// density_at_one unchanged.
DensityEval density(const Alpha& alpha, double t, double x, double tol = 1e-10);

// Forces one evaluation branch regardless of the crossover; the series
// branch then reports its cancellation in est_error instead of enforcing
// the amplification budget. Diagnostic surface for overlap checks.
DensityEval density_branch(const Alpha& alpha, double x, double tol,
                           DensityMethod force);

// Certified envelope C_env(alpha) * min(t^{-2/alpha}, t x^{-1-alpha/2}).
double density_upper_envelope(const Alpha& alpha, double t, double x);
double envelope_constant(const Alpha& alpha);

// E[(S_1)^gamma] = Gamma(1 - 2 gamma / alpha) / Gamma(1 - gamma),
// for gamma < alpha/2.
double fractional_moment(const Alpha& alpha, double gamma_exponent);

// E[(S_1)^{k/2}; S_1 < cutoff], k >= 1, by adaptive quadrature (relative
// tolerance ~1e-9).
double truncated_moment(const Alpha& alpha, int k, double cutoff);

// integral_cutoff^infinity s^{1/2} g(1,s) ds for alpha in (1,2).
double tail_half_moment(const Alpha& alpha, double cutoff);

// P(S_1 > x): termwise-integrated series for x past the crossover, the
// deformed-contour CDF integral below it. max_terms caps the series order
// used for the termwise tail.
double tail_probability(const Alpha& alpha, double x, int max_terms = 400);

// One draw of S_t via Kanter's representation, scaled by t^{2/alpha}.
double sample(const Alpha& alpha, double t, RngStream& rng);

// Zolotarev/Kanter kernel A(u)^{1/(1-rho)} on (0, pi); exposed for tests.
double kanter_kernel(double rho, double u);

} // namespace shc
