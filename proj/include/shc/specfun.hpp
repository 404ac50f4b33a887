#pragma once

#include <stdexcept>

namespace shc {

// Thrown when an evaluation hits a pole or leaves the representable range.
class pole_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Gamma function for real arguments. Lanczos rational approximation with
// Euler reflection for x < 0.5. Relative error below 1e-13 on [-20, 170].
// Throws pole_error at non-positive integers and on overflow (x > ~171.6).
double gamma(double x);

// log |Gamma(x)| for x > 0. Valid for arguments far beyond the overflow
// range of gamma() itself (used by series coefficients Gamma(1+rho n)/n!).
double log_gamma(double x);

// The constant alpha / (2 Gamma(1 - alpha/2)) governing the x -> infinity
// behaviour of the subordinator density tail, evaluated in its direct form.
double tail_density_constant(double alpha);

// Same constant through the reflection identity,
// Gamma(1 + alpha/2) sin(pi alpha / 2) / pi.
// Kept separate so the two routes can be checked against each other.
double tail_density_constant_reflected(double alpha);

} // namespace shc
