#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "shc/asymptotics.hpp"
#include "shc/heat_content.hpp"
#include "shc/quadrature.hpp"
#include "shc/specfun.hpp"
#include "oracles.hpp"

#include <numbers>

using namespace shc;

TEST_CASE("q_tilde: subordination identity against the Levy closed form (alpha = 1)")
{
    // independent route: |D| - Q~(t) = int (1 - Q2(t^2 u)) g_levy(u) du with
    // plain Simpson in log coordinates and the closed-form erf tail
    const Domain d = Domain::interval(0.0, 1.0);
    const Alpha one(1.0);
    for (double t : {0.05, 0.2, 1.0}) {
        auto f = [&](double v) {
            const double u = std::exp(v);
            return (1.0 - q2(d, t * t * u)) * oracle::levy_density(u) * u;
        };
        const double U = 80.0 / (d.first_eigenvalue() * t * t);
        const double head = oracle::simpson(f, std::log(1e-4), std::log(U), 40000);
        const double tail = oracle::levy_tail(U); // deficit saturates at |D| = 1
        const double loss_oracle = head + tail;
        const double loss_module = 1.0 - q_tilde(d, one, t);
        CHECK(std::abs(loss_module - loss_oracle) < 1e-7);
    }
}

TEST_CASE("q_tilde: limits, monotonicity, and range")
{
    const Domain d = Domain::interval(0.0, 1.0);
    const Alpha a(1.5);
    CHECK(1.0 - q_tilde(d, a, 1e-10) < 1e-3);
    double prev = 1.0;
    for (double t : {1e-6, 1e-4, 1e-2, 0.1, 1.0, 10.0}) {
        const double q = q_tilde(d, a, t);
        CHECK(q > 0.0);
        CHECK(q < 1.0);
        CHECK(q < prev);
        prev = q;
    }
    // alpha-monotonicity at fixed small t (recorded trend on the tested grid)
    double prev_a = 2.0;
    for (double av : {0.8, 1.0, 1.2, 1.5}) {
        const double q = q_tilde(d, Alpha(av), 1e-3);
        CHECK(q < prev_a);
        prev_a = q;
    }
}

TEST_CASE("q_tilde: two-term constant shows up at small t (alpha = 1.5)")
{
    const Domain d = Domain::interval(0.0, 1.0);
    const Alpha a(1.5);
    const double t = 1e-6;
    const double scaled = (1.0 - q_tilde(d, a, t)) / std::pow(t, 1.0 / 1.5);
    CHECK(scaled == doctest::Approx(oracle::thm11_a15_interval).epsilon(0.01));
}

TEST_CASE("q_tilde: interval scaling identity")
{
    const Domain unit = Domain::interval(0.0, 1.0);
    const Domain two = Domain::interval(0.0, 2.0);
    const Alpha a(1.5);
    for (double t : {0.01, 0.1, 1.0}) {
        const double lhs = q_tilde(two, a, t);
        const double rhs = 2.0 * q_tilde(unit, a, t / std::pow(2.0, 1.5));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-7));
    }
}

TEST_CASE("q_tilde_mc agrees with quadrature and is deterministic across workers")
{
    const Domain d = Domain::interval(0.0, 1.0);
    McConfig cfg;
    cfg.n_samples = 200000;
    cfg.master_seed = 11;
    for (double av : {0.8, 1.5}) {
        const Alpha a(av);
        for (double t : {0.01, 0.5}) {
            const McEstimate e = q_tilde_mc(d, a, t, cfg);
            const double q = q_tilde(d, a, t);
            CHECK(std::abs(e.mean - q) <= 3.0 * e.std_error + 1e-12);
        }
    }

    setenv("SHC_THREADS", "1", 1);
    const McEstimate e1 = q_tilde_mc(d, Alpha(1.2), 0.1, cfg);
    setenv("SHC_THREADS", "4", 1);
    const McEstimate e4 = q_tilde_mc(d, Alpha(1.2), 0.1, cfg);
    setenv("SHC_THREADS", "16", 1);
    const McEstimate e16 = q_tilde_mc(d, Alpha(1.2), 0.1, cfg);
    unsetenv("SHC_THREADS");
    CHECK(e1.mean == e4.mean);
    CHECK(e4.mean == e16.mean);
    CHECK(e1.std_error == e16.std_error);
}

TEST_CASE("q_tilde_mc: t -> infinity kills the estimate")
{
    const Domain d = Domain::interval(0.0, 1.0);
    McConfig cfg;
    cfg.n_samples = 50000;
    const McEstimate e = q_tilde_mc(d, Alpha(1.5), 1e3, cfg);
    CHECK(e.mean <= 3.0 * e.std_error + 1e-9);
}

TEST_CASE("q_alpha_mc: refinement trend and ordering against q_tilde")
{
    const Domain d = Domain::interval(0.0, 1.0);
    const Alpha a(1.5);
    McConfig cfg;
    cfg.n_samples = 20000;
    cfg.master_seed = 5;
    const double t = 0.05;
    const QAlphaMcResult r = q_alpha_mc(d, a, t, 100, cfg);
    // finer monitoring catches more exits
    const double se01 = std::hypot(r.by_resolution[0].std_error, r.by_resolution[1].std_error);
    const double se12 = std::hypot(r.by_resolution[1].std_error, r.by_resolution[2].std_error);
    CHECK(r.by_resolution[1].mean <= r.by_resolution[0].mean + 3.0 * se01);
    CHECK(r.by_resolution[2].mean <= r.by_resolution[1].mean + 3.0 * se12);

    // relation: Q~(t) <= Q^(alpha)(t) (+ positive monitoring bias)
    const double qt = q_tilde(d, a, t);
    CHECK(qt <= r.finest().mean + 3.0 * r.finest().std_error);

    CHECK_THROWS_AS(q_alpha_mc(Domain::ball3(1.0), a, t, 10, cfg), std::domain_error);
    CHECK_THROWS_AS(q_alpha_mc(d, Alpha(0.8), t, 10, cfg), std::domain_error);
}

TEST_CASE("sup_stable_mc: sandwich between E[X+] and 2 E[X+]")
{
    const Alpha a(1.5);
    McConfig cfg;
    cfg.n_samples = 20000;
    cfg.master_seed = 17;
    const SupStableResult r = sup_stable_mc(a, cfg, 250);
    const McEstimate& e = r.finest();
    const double lo = oracle::x_plus_mean_a15;
    const double hi = 2.0 * oracle::x_plus_mean_a15;
    CHECK(e.mean >= lo - 3.0 * e.std_error);
    CHECK(e.mean <= hi + 3.0 * e.std_error);
    // grid max only grows with refinement (same-law paths, statistically)
    CHECK(r.by_resolution[2].mean
          >= r.by_resolution[0].mean - 3.0 * std::hypot(r.by_resolution[0].std_error,
                                                        r.by_resolution[2].std_error));
}

TEST_CASE("config structs validate their invariants")
{
    const Domain d = Domain::interval(0.0, 1.0);
    const Alpha a(1.5);
    QuadratureSpec bad;
    bad.rel_tol = -1.0;
    CHECK_THROWS_AS(q_tilde(d, a, 0.1, bad), std::domain_error);
    bad = QuadratureSpec{};
    bad.split_points = {2.0, 1.0};
    CHECK_THROWS_AS(q_tilde(d, a, 0.1, bad), std::domain_error);
    McConfig mc;
    mc.n_samples = 0;
    CHECK_THROWS_AS(q_tilde_mc(d, a, 0.1, mc), std::domain_error);
}

TEST_CASE("strict gap direction at alpha = 1.2 and 1.8 (small-n)")
{
    // 2 * (grid-sup estimate + 3 SE) must sit below (4/pi) Gamma(1 - 1/alpha)
    for (double av : {1.2, 1.8}) {
        const Alpha a(av);
        McConfig cfg;
        cfg.n_samples = 10000;
        cfg.master_seed = 23;
        const auto r = sup_stable_mc(a, cfg, 100);
        const McEstimate& e = r.finest();
        const double bound = second_term_constant(Domain::interval(0.0, 1.0), a);
        CHECK(2.0 * (e.mean + 3.0 * e.std_error) < bound);
        // identity: the bound IS 4 E[X_1^+] = 4 Gamma(1-1/alpha)/pi
        CHECK(bound
              == doctest::Approx(4.0 * shc::gamma(1.0 - 1.0 / av) / std::numbers::pi)
                     .epsilon(1e-13));
    }
}

TEST_CASE("q_tilde reports tolerance failure with diagnostics")
{
    const Domain d = Domain::interval(0.0, 1.0);
    QuadratureSpec impossible;
    impossible.rel_tol = 1e-300; // below the error estimator's own floor
    impossible.abs_tol = 1e-305;
    try {
        (void)q_tilde(d, Alpha(1.5), 0.1, impossible);
        FAIL("expected tolerance_error");
    } catch (const tolerance_error& e) {
        CHECK(e.value > 0.0);
        CHECK(e.value < 1.0);
        CHECK(e.est_error > 0.0); // diagnostics carried in the exception
    }
}

TEST_CASE("q_tilde_mc domain scaling: doubled interval at stable-scaled time")
{
    // Q~ on (0, 2) at time t equals 2 Q~ on (0, 1) at time t / 2^alpha
    const Alpha a(1.5);
    McConfig cfg;
    cfg.n_samples = 60000;
    cfg.master_seed = 99;
    const double t = 0.2;
    const McEstimate big = q_tilde_mc(Domain::interval(0.0, 2.0), a, t, cfg);
    const McEstimate unit =
        q_tilde_mc(Domain::interval(0.0, 1.0), a, t / std::pow(2.0, 1.5), cfg);
    const double se = std::hypot(big.std_error, 2.0 * unit.std_error);
    CHECK(std::abs(big.mean - 2.0 * unit.mean) <= 3.0 * se);
}
