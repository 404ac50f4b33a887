#include "shc/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace shc {

namespace {

constexpr double pi = std::numbers::pi;

// Lanczos coefficients, g = 607/128, n = 15 (Godfrey). Good to ~1e-15
// relative over the positive axis in double precision.
constexpr double lanczos_g = 607.0 / 128.0;
constexpr double lanczos_coeff[15] = {
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
};

bool is_nonpositive_integer(double x)
{
    return x <= 0.0 && x == std::floor(x);
}

// Lanczos series for x >= 0.5.
double lanczos_sum(double x)
{
    double s = lanczos_coeff[0];
    for (int k = 1; k < 15; ++k)
        s += lanczos_coeff[k] / (x + k - 1.0);
    return s;
}

double log_gamma_positive(double x);

double gamma_positive(double x)
{
    // x >= 0.5 here
    const double base = x + lanczos_g - 0.5;
    if (x > 140.0) // pow(base, x-0.5) would overflow before exp(-base) rescales
        return std::exp(log_gamma_positive(x));
    return std::sqrt(2.0 * pi) * std::pow(base, x - 0.5) * std::exp(-base) * lanczos_sum(x);
}

double log_gamma_positive(double x)
{
    const double base = x + lanczos_g - 0.5;
    return 0.5 * std::log(2.0 * pi) + (x - 0.5) * std::log(base) - base
        + std::log(lanczos_sum(x));
}

} // namespace

double gamma(double x)
{
    if (std::isnan(x))
        throw pole_error("gamma: NaN argument");
    if (is_nonpositive_integer(x))
        throw pole_error("gamma: pole at non-positive integer");
    if (x < 0.5) {
        // Reflection: Gamma(x) = pi / (sin(pi x) Gamma(1 - x)).
        // sin(pi x) via the reduced argument keeps accuracy near integers.
        const double n = std::floor(x);
        const double f = x - n; // in (0,1)
        double sinpix = std::sin(pi * f);
        if (static_cast<long long>(n) % 2 != 0)
            sinpix = -sinpix;
        return pi / (sinpix * gamma_positive(1.0 - x));
    }
    if (x > 171.7)
        throw pole_error("gamma: overflow for x > 171.7");
    return gamma_positive(x);
}

double log_gamma(double x)
{
    if (!(x > 0.0))
        throw pole_error("log_gamma: requires x > 0");
    if (x < 0.5)
        return std::log(pi / std::sin(pi * x)) - log_gamma_positive(1.0 - x);
    return log_gamma_positive(x);
}

double tail_density_constant(double alpha)
{
    return alpha / (2.0 * gamma(1.0 - alpha / 2.0));
}

double tail_density_constant_reflected(double alpha)
{
    return gamma(1.0 + alpha / 2.0) * std::sin(pi * alpha / 2.0) / pi;
}

} // namespace shc
