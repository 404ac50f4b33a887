#pragma once

#include <stdexcept>
#include <vector>

#include "shc/rng.hpp"

namespace shc {

enum class DomainKind { interval, ball3 };

// Interval (a,b) in dimension 1 or centered ball of radius r in dimension 3.
// Eigenvalues follow the generator-Delta convention: lambda_n = (n pi / L)^2
// on intervals of length L and (n pi / r)^2 on 3-balls.
class Domain {
public:
    static Domain interval(double a, double b);
    static Domain ball3(double radius);

    DomainKind kind() const { return kind_; }
    int dimension() const { return kind_ == DomainKind::interval ? 1 : 3; }
    double volume() const { return volume_; }
    double perimeter() const { return perimeter_; }

    double a() const { return a_; }
    double b() const { return b_; }
    double radius() const { return radius_; }

    // L for intervals, r for balls; sets the spectral time scale
    double length_scale() const;
    double first_eigenvalue() const;

    // true if the 1-d coordinate (position for intervals, radius for balls)
    // lies inside the open domain
    bool contains(double x) const;

private:
    Domain() = default;
    DomainKind kind_ = DomainKind::interval;
    double a_ = 0.0, b_ = 1.0;
    double radius_ = 1.0;
    double volume_ = 1.0;
    double perimeter_ = 2.0;
};

struct SpectralMode {
    double eigenvalue; // lambda_n
    double mass;       // m_n, contribution of mode n to Q at t = 0
};

struct SpectralSeries {
    std::vector<SpectralMode> modes;
    int truncation = 0;
    double mass_tail_lower = 0.0; // integral bracket of the dropped mass
    double mass_tail_upper = 0.0;
};

// Dirichlet expansion of the spectral heat content: interval modes
// ((n pi / L)^2, 8 L / (n^2 pi^2)) over odd n; ball modes
// ((n pi / r)^2, 8 r^3 / (pi n^2)) over all n.
SpectralSeries spectral_series(const Domain& domain, int truncation = 512);

// Q_D^{(2)}(t): exponential mode sum for moderate and large t, the exact
// Poisson-dual (erfc) form for small t. Q(0) = |D|; strictly decreasing.
double q2(const Domain& domain, double t);

// Q(t) - (|D| - 2 |dD| sqrt(t) / sqrt(pi)), evaluated in a form that does
// not lose the remainder to cancellation at small t.
double q2_remainder(const Domain& domain, double t);

// P_x(tau_D > t) for the 1-d coordinate x (position in the interval, radius
// in the ball). Values clamped to [0,1].
double survival(const Domain& domain, double x, double t);

// Draws tau by inverting survival(x, .) at a uniform variate
// (bracketing plus Illinois iteration, 1e-10 relative in t).
double exit_time_sample(const Domain& domain, double x, RngStream& rng);

// Uniform draw of the 1-d coordinate under the volume measure
// (position for intervals, radius ~ r U^{1/3} for balls).
double uniform_point(const Domain& domain, RngStream& rng);

} // namespace shc
