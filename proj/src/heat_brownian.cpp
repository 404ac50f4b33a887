#include "shc/heat_brownian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace shc {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double sqrt_pi = 1.7724538509055160273;

// below this value of z = lambda_1 t the Poisson-dual (erfc) forms are used
constexpr double kDualSwitch = 0.25;

// erf(hi) - erf(lo) without loss when both arguments sit in the same tail
double diff_erf(double hi, double lo)
{
    if (hi >= 0.0 && lo >= 0.0)
        return std::erfc(lo) - std::erfc(hi);
    if (hi <= 0.0 && lo <= 0.0)
        return std::erfc(-hi) - std::erfc(-lo);
    return std::erf(hi) - std::erf(lo);
}

// Poisson correction sum_k I_k(z), I_k = 2 sqrt(z) e^{-pi^2 k^2 / z}
//                                       - 2 pi k sqrt(pi) erfc(pi k / sqrt(z))
double poisson_corr_full(double z)
{
    const double sz = std::sqrt(z);
    double sum = 0.0;
    for (int k = 1;; ++k) {
        const double e = pi * pi * k * k / z;
        if (e > 740.0)
            break;
        sum += 2.0 * sz * std::exp(-e) - 2.0 * pi * k * sqrt_pi * std::erfc(pi * k / sz);
    }
    return sum;
}

// sum_k [I_k(z) - I'_k(z)/2] with I'_k the quarter-frequency analogue;
// appears in the interval dual form
double poisson_corr_interval(double z)
{
    const double sz = std::sqrt(z);
    double sum = 0.0;
    for (int k = 1;; ++k) {
        const double e4 = pi * pi * k * k / (4.0 * z);
        if (e4 > 740.0)
            break;
        const double ik = 2.0 * sz * std::exp(-4.0 * e4)
            - 2.0 * pi * k * sqrt_pi * std::erfc(pi * k / sz);
        const double ipk =
            2.0 * sz * std::exp(-e4) - pi * k * sqrt_pi * std::erfc(pi * k / (2.0 * sz));
        sum += ik - 0.5 * ipk;
    }
    return sum;
}

// |D| - Q(t) for the unit-scale problem, through the dual form.
// interval length L:  L (8/pi^2) [ sqrt(pi z)/2 + sqrt(pi) C_int(z) ]
// ball radius r:      (8 r^3/pi) [ sqrt(pi z) - z/2 + sqrt(pi) C_full(z) ]
double heat_loss_dual(const Domain& d, double z)
{
    if (d.kind() == DomainKind::interval) {
        const double L = d.b() - d.a();
        return L * (8.0 / (pi * pi))
            * (sqrt_pi * std::sqrt(z) / 2.0 + sqrt_pi * poisson_corr_interval(z));
    }
    const double r = d.radius();
    return (8.0 * r * r * r / pi)
        * (sqrt_pi * std::sqrt(z) - z / 2.0 + sqrt_pi * poisson_corr_full(z));
}

double q2_spectral(const Domain& d, double z)
{
    double q = 0.0;
    if (d.kind() == DomainKind::interval) {
        const double L = d.b() - d.a();
        for (int n = 1; n * n * z < 745.0; n += 2)
            q += 8.0 * L / (n * n * pi * pi) * std::exp(-n * n * z);
    } else {
        const double r = d.radius();
        for (int n = 1; n * n * z < 745.0; ++n)
            q += 8.0 * r * r * r / (pi * n * n) * std::exp(-n * n * z);
    }
    return q;
}

double survival_interval_spectral(const Domain& d, double x, double z)
{
    const double L = d.b() - d.a();
    const double y = (x - d.a()) / L;
    double s = 0.0;
    for (int n = 1; n * n * z < 745.0; n += 2) {
        const double term = 4.0 / (n * pi) * std::sin(n * pi * y) * std::exp(-n * n * z);
        s += term;
        if (n > 2 && 4.0 / (n * pi) * std::exp(-n * n * z) < 1e-17)
            break;
    }
    return s;
}

double survival_interval_images(const Domain& d, double x, double t)
{
    const double L = d.b() - d.a();
    const double xr = x - d.a();
    const double s = 2.0 * std::sqrt(t);
    double p = 0.0;
    for (int k = -8; k <= 8; ++k) {
        const double y = xr - 2.0 * k * L;
        const double t1 = 0.5 * diff_erf(y / s, (y - L) / s);
        const double t2 = 0.5 * diff_erf((y + L) / s, y / s);
        p += t1 - t2;
    }
    return p;
}

// A(c) = int_0^r y p_t(c - y) dy, with p_t the free Gaussian kernel of the
// generator-Delta Brownian motion
double ball_segment(double c, double r, double t)
{
    const double s = 2.0 * std::sqrt(t);
    const double pc = std::exp(-c * c / (4.0 * t)) / (2.0 * sqrt_pi * std::sqrt(t));
    const double pcr = std::exp(-(c - r) * (c - r) / (4.0 * t))
        / (2.0 * sqrt_pi * std::sqrt(t));
    return c * 0.5 * diff_erf(c / s, (c - r) / s) + 2.0 * t * (pc - pcr);
}

// d/dc of ball_segment: P(c) - P(c-r) - r p(c-r)
double ball_segment_deriv(double c, double r, double t)
{
    const double s = 2.0 * std::sqrt(t);
    const double pcr = std::exp(-(c - r) * (c - r) / (4.0 * t))
        / (2.0 * sqrt_pi * std::sqrt(t));
    return 0.5 * diff_erf(c / s, (c - r) / s) - r * pcr;
}

double survival_ball_images(const Domain& d, double rho, double t)
{
    const double r = d.radius();
    if (rho < 1e-4 * r) {
        // w(rho)/rho -> w'(0) = 2 sum_k A'(2 k r); relative error O((rho/r)^2)
        double u = 0.0;
        for (int k = -8; k <= 8; ++k)
            u += ball_segment_deriv(2.0 * k * r, r, t);
        return 2.0 * u;
    }
    double w = 0.0;
    for (int k = -8; k <= 8; ++k)
        w += ball_segment(rho - 2.0 * k * r, r, t) - ball_segment(2.0 * k * r - rho, r, t);
    return w / rho;
}

double survival_ball_spectral(const Domain& d, double rho, double z)
{
    const double r = d.radius();
    double s = 0.0;
    for (int n = 1; n * n * z < 745.0; ++n) {
        const double radial = rho < 1e-12 * r ? n * pi / r : std::sin(n * pi * rho / r) / rho;
        const double term = 2.0 * r / (n * pi) * ((n % 2 == 0) ? -1.0 : 1.0) * radial
            * std::exp(-n * n * z);
        s += term;
        if (2.0 * std::exp(-n * n * z) < 1e-17)
            break;
    }
    return s;
}

} // namespace

Domain Domain::interval(double a, double b)
{
    if (!(a < b))
        throw std::domain_error("Domain::interval: requires a < b");
    Domain d;
    d.kind_ = DomainKind::interval;
    d.a_ = a;
    d.b_ = b;
    d.volume_ = b - a;
    d.perimeter_ = 2.0;
    return d;
}

Domain Domain::ball3(double radius)
{
    if (!(radius > 0.0))
        throw std::domain_error("Domain::ball3: requires radius > 0");
    Domain d;
    d.kind_ = DomainKind::ball3;
    d.radius_ = radius;
    d.volume_ = 4.0 * pi * radius * radius * radius / 3.0;
    d.perimeter_ = 4.0 * pi * radius * radius;
    return d;
}

double Domain::length_scale() const
{
    return kind_ == DomainKind::interval ? b_ - a_ : radius_;
}

double Domain::first_eigenvalue() const
{
    const double L = length_scale();
    return pi * pi / (L * L);
}

bool Domain::contains(double x) const
{
    if (kind_ == DomainKind::interval)
        return x > a_ && x < b_;
    return x >= 0.0 && x < radius_;
}

SpectralSeries spectral_series(const Domain& domain, int truncation)
{
    if (truncation < 1)
        throw std::domain_error("spectral_series: truncation >= 1");
    SpectralSeries s;
    s.truncation = truncation;
    const double L = domain.length_scale();
    if (domain.kind() == DomainKind::interval) {
        for (int n = 1; n <= truncation; n += 2)
            s.modes.push_back({n * n * pi * pi / (L * L), 8.0 * L / (n * n * pi * pi)});
        // sum over odd n > N of 8L/(pi^2 n^2), bracketed by integrals
        const int n_next = (truncation % 2 == 0) ? truncation + 1 : truncation + 2;
        s.mass_tail_lower = 8.0 * L / (pi * pi) * 0.5 / (n_next + 1.0);
        s.mass_tail_upper = 8.0 * L / (pi * pi) * 0.5 / (n_next - 1.0);
    } else {
        const double r = domain.radius();
        for (int n = 1; n <= truncation; ++n)
            s.modes.push_back({n * n * pi * pi / (r * r), 8.0 * r * r * r / (pi * n * n)});
        s.mass_tail_lower = 8.0 * r * r * r / pi / (truncation + 1.0);
        s.mass_tail_upper = 8.0 * r * r * r / pi / static_cast<double>(truncation);
    }
    return s;
}

double q2(const Domain& domain, double t)
{
    if (t < 0.0)
        throw std::domain_error("q2: t must be nonnegative");
    if (t == 0.0)
        return domain.volume();
    const double z = domain.first_eigenvalue() * t;
    if (z < kDualSwitch)
        return std::max(domain.volume() - heat_loss_dual(domain, z), 0.0);
    return q2_spectral(domain, z); // direct sum keeps tiny values exact
}

double q2_remainder(const Domain& domain, double t)
{
    if (!(t > 0.0))
        throw std::domain_error("q2_remainder: t must be positive");
    const double z = domain.first_eigenvalue() * t;
    const double two_term_loss = 2.0 * domain.perimeter() * std::sqrt(t) / sqrt_pi;
    if (z >= kDualSwitch)
        return q2_spectral(domain, z) - (domain.volume() - two_term_loss);
    // dual form: the sqrt(t) part cancels exactly, leaving the correction terms
    if (domain.kind() == DomainKind::interval) {
        const double L = domain.b() - domain.a();
        return -L * (8.0 / (pi * pi)) * sqrt_pi * poisson_corr_interval(z);
    }
    const double r = domain.radius();
    return (8.0 * r * r * r / pi) * (z / 2.0 - sqrt_pi * poisson_corr_full(z));
}

double survival(const Domain& domain, double x, double t)
{
    if (!domain.contains(x))
        throw std::domain_error("survival: point outside domain");
    if (t < 0.0)
        throw std::domain_error("survival: t must be nonnegative");
    if (t == 0.0)
        return 1.0;
    const double z = domain.first_eigenvalue() * t;
    double p;
    if (domain.kind() == DomainKind::interval)
        p = z < kDualSwitch ? survival_interval_images(domain, x, t)
                            : survival_interval_spectral(domain, x, z);
    else
        p = z < kDualSwitch ? survival_ball_images(domain, std::max(x, 1e-12 * domain.radius()), t)
                            : survival_ball_spectral(domain, x, z);
    return std::clamp(p, 0.0, 1.0);
}

double exit_time_sample(const Domain& domain, double x, RngStream& rng)
{
    const double u = rng.uniform();
    const double t_scale = 1.0 / domain.first_eigenvalue();

    // bracket [lo, hi] with survival(lo) > u > survival(hi)
    double hi = t_scale;
    while (survival(domain, x, hi) > u)
        hi *= 4.0;
    double lo = hi / 4.0;
    while (survival(domain, x, lo) < u) {
        hi = lo;
        lo /= 4.0;
        if (lo < 1e-300)
            return hi;
    }

    // Illinois iteration on f(t) = survival(x,t) - u
    double flo = survival(domain, x, lo) - u;
    double fhi = survival(domain, x, hi) - u;
    for (int it = 0; it < 200 && (hi - lo) > 1e-10 * lo; ++it) {
        double mid = (lo * fhi - hi * flo) / (fhi - flo);
        if (!(mid > lo && mid < hi))
            mid = 0.5 * (lo + hi);
        const double fm = survival(domain, x, mid) - u;
        if (fm > 0.0) { // survival still above u: exit later than mid
            lo = mid;
            flo = fm;
            fhi *= 0.5;
        } else {
            hi = mid;
            fhi = fm;
            flo *= 0.5;
        }
    }
    return 0.5 * (lo + hi);
}

double uniform_point(const Domain& domain, RngStream& rng)
{
    const double u = rng.uniform();
    if (domain.kind() == DomainKind::interval)
        return domain.a() + u * (domain.b() - domain.a());
    return domain.radius() * std::cbrt(u);
}

} // namespace shc
