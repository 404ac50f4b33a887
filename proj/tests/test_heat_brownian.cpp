#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "shc/heat_brownian.hpp"
#include "shc/quadrature.hpp"
#include "oracles.hpp"
#include "pde_oracle.hpp"

using namespace shc;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("domain bookkeeping")
{
    const Domain i01 = Domain::interval(0.0, 1.0);
    CHECK(i01.volume() == 1.0);
    CHECK(i01.perimeter() == 2.0);
    CHECK(i01.dimension() == 1);
    const Domain b1 = Domain::ball3(1.0);
    CHECK(b1.volume() == doctest::Approx(4.0 * pi / 3.0));
    CHECK(b1.perimeter() == doctest::Approx(4.0 * pi));
    CHECK(b1.dimension() == 3);
    CHECK_THROWS_AS(Domain::interval(1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(Domain::ball3(-2.0), std::domain_error);
}

TEST_CASE("spectral series: masses, eigenvalues, and the mass identity")
{
    const SpectralSeries si = spectral_series(Domain::interval(0.0, 1.0), 4001);
    CHECK(si.modes[0].mass == doctest::Approx(oracle::first_mode_mass_interval).epsilon(1e-13));
    CHECK(si.modes[0].eigenvalue == doctest::Approx(pi * pi).epsilon(1e-14));
    // direct Fourier sine coefficient of the indicator: (int phi_n)^2, n = 3
    const double c3 = oracle::simpson(
        [](double x) { return std::sqrt(2.0) * std::sin(3.0 * pi * x); }, 0.0, 1.0, 2000);
    CHECK(si.modes[1].mass == doctest::Approx(c3 * c3).epsilon(1e-9));

    double mass = 0.0;
    double prev_lambda = 0.0;
    for (const auto& m : si.modes) {
        CHECK(m.mass > 0.0);
        CHECK(m.eigenvalue > prev_lambda);
        prev_lambda = m.eigenvalue;
        mass += m.mass;
    }
    CHECK(mass + si.mass_tail_lower <= 1.0 + 1e-12);
    CHECK(mass + si.mass_tail_upper >= 1.0 - 1e-12);
    CHECK(si.mass_tail_upper < 2e-4);

    const SpectralSeries sb = spectral_series(Domain::ball3(1.0), 40000);
    double bmass = 0.0;
    for (const auto& m : sb.modes)
        bmass += m.mass;
    CHECK(bmass + sb.mass_tail_lower <= 4.0 * pi / 3.0 + 1e-10);
    CHECK(bmass + sb.mass_tail_upper >= 4.0 * pi / 3.0 - 1e-10);
}

TEST_CASE("q2 basics: boundary value, monotonicity, complete monotonicity")
{
    const Domain d = Domain::interval(0.0, 1.0);
    CHECK(q2(d, 0.0) == 1.0);
    std::vector<double> ts, qs;
    for (double t = 1e-6; t < 10.0; t *= 1.6) {
        ts.push_back(t);
        qs.push_back(q2(d, t));
    }
    for (std::size_t i = 0; i + 1 < qs.size(); ++i)
        CHECK(qs[i + 1] < qs[i]); // strictly decreasing
    // second differences of a completely monotone function on an increasing
    // grid alternate: Q' < 0, Q'' > 0
    for (std::size_t i = 0; i + 2 < qs.size(); ++i) {
        const double d1 = (qs[i + 1] - qs[i]) / (ts[i + 1] - ts[i]);
        const double d2 = (qs[i + 2] - qs[i + 1]) / (ts[i + 2] - ts[i + 1]);
        CHECK(d1 < 0.0);
        CHECK(d2 > d1);
    }
    CHECK(q2(d, 50.0) < 1e-12);
}

TEST_CASE("q2: dual and spectral branches agree around the switch")
{
    for (const Domain& d : {Domain::interval(0.0, 1.0), Domain::ball3(1.0),
                            Domain::interval(-2.0, 1.5), Domain::ball3(0.6)}) {
        const double lam1 = d.first_eigenvalue();
        for (double z : {0.05, 0.15, 0.24, 0.26, 0.4, 0.8}) {
            const double t = z / lam1;
            // both regimes, forced through scaling: q2 at t and at t(1 +- 0)
            const double q = q2(d, t);
            // reference: raw spectral sum with many terms
            double ref = 0.0;
            if (d.kind() == DomainKind::interval) {
                const double L = d.b() - d.a();
                for (int n = 1; n < 4001; n += 2)
                    ref += 8.0 * L / (n * n * pi * pi) * std::exp(-n * n * z);
            } else {
                const double r = d.radius();
                for (int n = 1; n < 4001; ++n)
                    ref += 8.0 * r * r * r / (pi * n * n) * std::exp(-n * n * z);
            }
            CHECK(q == doctest::Approx(ref).epsilon(1e-12));
        }
    }
}

TEST_CASE("q2 scaling identities")
{
    const Domain unit = Domain::interval(0.0, 1.0);
    const Domain scaled = Domain::interval(0.0, 2.5);
    for (double t : {1e-6, 1e-3, 0.05, 0.4})
        CHECK(q2(scaled, t)
              == doctest::Approx(2.5 * q2(unit, t / 6.25)).epsilon(1e-12));
    const Domain b1 = Domain::ball3(1.0);
    const Domain b2 = Domain::ball3(2.0);
    for (double t : {1e-6, 1e-3, 0.05, 0.4})
        CHECK(q2(b2, t) == doctest::Approx(8.0 * q2(b1, t / 4.0)).epsilon(1e-12));
}

TEST_CASE("two-term law at t = 1e-8")
{
    const Domain d = Domain::interval(0.0, 1.0);
    CHECK((1.0 - q2(d, 1e-8)) / 1e-4
          == doctest::Approx(oracle::two_term_interval).epsilon(1e-3));
    const Domain b = Domain::ball3(1.0);
    CHECK((b.volume() - q2(b, 1e-8)) / 1e-4
          == doctest::Approx(oracle::two_term_ball).epsilon(1e-3));
}

TEST_CASE("ball q2 against the Crank-Nicolson oracle")
{
    const Domain b = Domain::ball3(1.0);
    for (double t : {0.01, 0.1, 1.0}) {
        const double cn = oracle::ball_q2_crank_nicolson(1.0, t, 3000, 3000);
        CHECK(std::abs(q2(b, t) - cn) <= 1e-5);
    }
}

TEST_CASE("q2_remainder: vanishing order, localization bound on the ball, sign study")
{
    const Domain d = Domain::interval(0.0, 1.0);
    CHECK(std::abs(q2_remainder(d, 1e-10)) / std::sqrt(1e-10) < 1e-3);
    const Domain b = Domain::ball3(1.0);
    CHECK(std::abs(q2_remainder(b, 1e-10)) / std::sqrt(1e-10) < 1e-3);

    // ball bound |rem| <= 10^3 |D| t / (r/2)^2 at t = 0.01
    const double bound = 1e3 * b.volume() * 0.01 / 0.25;
    CHECK(std::abs(q2_remainder(b, 0.01)) <= bound);
    // and across a grid
    for (double t = 1e-6; t <= 1.0; t *= 10.0)
        CHECK(std::abs(q2_remainder(b, t)) <= 1e3 * b.volume() * t / 0.25);

    // remainder agrees with its definition where both are well-conditioned
    for (double t : {0.02, 0.1, 0.5}) {
        const double direct = q2(b, t) - (b.volume() - 2.0 * b.perimeter() * std::sqrt(t)
                                          / oracle::sqrt_pi);
        CHECK(q2_remainder(b, t) == doctest::Approx(direct).epsilon(1e-9));
    }

    // interval: record the sign pattern on a log grid (diagnostic only)
    int sign_changes = 0;
    double prev = q2_remainder(d, 1e-6);
    for (double t = 1e-6; t < 0.3; t *= 2.0) {
        const double cur = q2_remainder(d, t);
        if ((cur > 0) != (prev > 0))
            ++sign_changes;
        prev = cur;
    }
    CHECK(sign_changes >= 0); // recorded, no assertion on the sign itself
}

TEST_CASE("survival: endpoints, symmetry, and branch agreement")
{
    const Domain d = Domain::interval(0.0, 1.0);
    CHECK(survival(d, 0.5, 0.0) == 1.0);
    CHECK_THROWS_AS(survival(d, -0.1, 1.0), std::domain_error);
    for (double t : {1e-4, 0.01, 0.1})
        CHECK(survival(d, 0.3, t) == doctest::Approx(survival(d, 0.7, t)).epsilon(1e-13));

    // image and spectral forms agree in the overlap band
    const double lam1 = d.first_eigenvalue();
    for (double z : {0.1, 0.2, 0.3, 0.5}) {
        const double t = z / lam1;
        for (double x : {0.12, 0.5, 0.93}) {
            double spec = 0.0;
            for (int n = 1; n < 301; n += 2)
                spec += 4.0 / (n * pi) * std::sin(n * pi * x) * std::exp(-n * n * z);
            CHECK(survival(d, x, t) == doctest::Approx(spec).epsilon(1e-11));
        }
    }
    const Domain b = Domain::ball3(1.0);
    for (double z : {0.1, 0.2, 0.3, 0.5}) {
        const double t = z / b.first_eigenvalue();
        for (double rho : {1e-9, 0.3, 0.85}) {
            double spec = 0.0;
            for (int n = 1; n < 301; ++n) {
                const double radial = rho < 1e-8 ? n * pi : std::sin(n * pi * rho) / rho;
                spec += 2.0 / (n * pi) * ((n % 2) ? 1.0 : -1.0) * radial * std::exp(-n * n * z);
            }
            CHECK(survival(b, rho, t) == doctest::Approx(spec).epsilon(1e-10));
        }
    }
}

TEST_CASE("survival integrates to q2")
{
    const Domain d = Domain::interval(0.0, 1.0);
    QuadOptions opt;
    opt.rel_tol = 1e-12;
    const double qi =
        integrate_or_throw([&](double x) { return survival(d, x, 0.05); }, 0.0, 1.0, opt)
            .value;
    CHECK(qi == doctest::Approx(q2(d, 0.05)).epsilon(1e-8));

    const Domain b = Domain::ball3(1.0);
    const double qb = integrate_or_throw(
                          [&](double rho) {
                              return 4.0 * pi * rho * rho * survival(b, rho, 0.05);
                          },
                          0.0, 1.0, opt)
                          .value;
    CHECK(qb == doctest::Approx(q2(b, 0.05)).epsilon(1e-8));
}

TEST_CASE("exit time sampling: median, KS, and stochastic monotonicity")
{
    const Domain d = Domain::interval(0.0, 1.0);
    const double x = 0.5;
    const int n = 100000;
    std::vector<double> draws(n);
    RngStream rng = RngStream::from(31337, 0);
    for (int i = 0; i < n; ++i)
        draws[i] = exit_time_sample(d, x, rng);
    std::sort(draws.begin(), draws.end());

    // median vs the survival = 1/2 crossing
    double lo = 1e-4, hi = 1.0;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        (survival(d, x, mid) > 0.5 ? lo : hi) = mid;
    }
    const double med = 0.5 * (draws[n / 2 - 1] + draws[n / 2]);
    const double med_se = 1.0 / (2.0 * std::sqrt(static_cast<double>(n))
                                 * 0.35); // ~1/(2 sqrt(n) f(med)), density ~0.35
    CHECK(std::abs(med - lo) < 4.0 * med_se);

    // KS against the survival curve
    double ks = 0.0;
    for (int i = 0; i < n; i += 23) {
        const double F = 1.0 - survival(d, x, draws[i]);
        ks = std::max(ks, std::max(std::abs(F - static_cast<double>(i) / n),
                                   std::abs(static_cast<double>(i + 1) / n - F)));
    }
    CHECK(ks <= 1.63 / std::sqrt(static_cast<double>(n)));

    // center draws dominate near-boundary draws pointwise (3 sigma)
    RngStream rng2 = RngStream::from(31337, 1);
    std::vector<double> near(n);
    for (int i = 0; i < n; ++i)
        near[i] = exit_time_sample(d, 0.05, rng2);
    std::sort(near.begin(), near.end());
    for (double t : {0.001, 0.01, 0.05, 0.2}) {
        const auto frac_above = [&](const std::vector<double>& v) {
            return static_cast<double>(v.end()
                                       - std::lower_bound(v.begin(), v.end(), t))
                / n;
        };
        const double pc = frac_above(draws), pb = frac_above(near);
        const double se = std::sqrt((pc * (1 - pc) + pb * (1 - pb)) / n);
        CHECK(pc >= pb - 3.0 * se);
    }
}

TEST_CASE("two-term law converges at rate sqrt(t) on the ball")
{
    const Domain b = Domain::ball3(1.0);
    const double c = 2.0 * b.perimeter() / oracle::sqrt_pi;
    double prev_gap = -1.0;
    for (double t : {1e-3, 2.5e-4, 6.25e-5, 1.5625e-5}) {
        const double gap = std::abs((b.volume() - q2(b, t)) / std::sqrt(t) - c);
        if (prev_gap > 0.0) // quartering t must halve the distance
            CHECK(gap / prev_gap == doctest::Approx(0.5).epsilon(0.05));
        prev_gap = gap;
    }
}
