#include "shc/heat_content.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "shc/parallel.hpp"
#include "shc/quadrature.hpp"
#include "shc/specfun.hpp"

namespace shc {

namespace {

// Deterministic chunked Monte Carlo mean of a per-sample functional.
// Chunk partial sums are combined in chunk order, so the result depends on
// (n, batch, master_seed) only.
template <class PerSample>
McEstimate mc_mean(std::int64_t n, std::int64_t batch, PerSample&& per_sample)
{
    const std::int64_t n_chunks = (n + batch - 1) / batch;
    std::vector<double> sums(n_chunks, 0.0), sumsqs(n_chunks, 0.0);
    parallel_chunks(n, batch, [&](std::int64_t c, std::int64_t b, std::int64_t e) {
        double s = 0.0, s2 = 0.0;
        for (std::int64_t i = b; i < e; ++i) {
            const double v = per_sample(static_cast<std::uint64_t>(i));
            s += v;
            s2 += v * v;
        }
        sums[c] = s;
        sumsqs[c] = s2;
    });
    double sum = 0.0, sumsq = 0.0;
    for (std::int64_t c = 0; c < n_chunks; ++c) {
        sum += sums[c];
        sumsq += sumsqs[c];
    }
    McEstimate est;
    est.n = n;
    est.mean = sum / static_cast<double>(n);
    const double var =
        std::max(0.0, (sumsq - sum * sum / static_cast<double>(n)) / (n - 1.0));
    est.std_error = std::sqrt(var / static_cast<double>(n));
    return est;
}

} // namespace

namespace {

void validate(const QuadratureSpec& spec)
{
    if (!(spec.rel_tol > 0.0) || !(spec.abs_tol > 0.0))
        throw std::domain_error("QuadratureSpec: tolerances must be positive");
    for (std::size_t i = 0; i + 1 < spec.split_points.size(); ++i)
        if (!(spec.split_points[i] < spec.split_points[i + 1]))
            throw std::domain_error("QuadratureSpec: split points must increase strictly");
    if (spec.tail_order < 1)
        throw std::domain_error("QuadratureSpec: tail_order >= 1");
}

void validate(const McConfig& cfg)
{
    if (cfg.n_samples < 1)
        throw std::domain_error("McConfig: n_samples >= 1");
    if (cfg.batch < 1)
        throw std::domain_error("McConfig: batch >= 1");
}

} // namespace

double q_tilde(const Domain& domain, const Alpha& alpha, double t,
               const QuadratureSpec& spec)
{
    validate(spec);
    if (!(t > 0.0))
        throw std::domain_error("q_tilde: t must be positive");
    const double vol = domain.volume();
    const double a = alpha.value();
    const double time_scale = std::pow(t, 2.0 / a);
    const double x_star = series_crossover(alpha);

    // beyond U the Brownian factor is |D| up to q2's exponential tail
    const double u_sat = 40.0 / (domain.first_eigenvalue() * time_scale);
    const double U = std::max({2.0 * x_star, u_sat, 1.0});

    auto integrand = [&](double u) {
        if (u <= 0.0)
            return 0.0;
        const double g = density_at_one(alpha, u, 1e-11).value;
        if (g == 0.0)
            return 0.0;
        return (vol - q2(domain, time_scale * u)) * g;
    };

    // panel edges: density crossover, the q2 regime change, caller splits
    std::vector<double> splits{x_star, 0.25 / (domain.first_eigenvalue() * time_scale)};
    for (double s : spec.split_points)
        splits.push_back(s);
    for (double w = U / 4.0; w > std::max(x_star * 4.0, 1e-3); w /= 4.0)
        splits.push_back(w);
    std::erase_if(splits, [&](double s) { return s <= 0.0 || s >= U; });

    QuadOptions opt;
    opt.rel_tol = spec.rel_tol;
    opt.abs_tol = spec.abs_tol * vol * 0.5;
    opt.max_panels = 8000;
    QuadResult head = integrate(integrand, 0.0, U, opt, splits);

    // analytic tail: |D| P(S_1 > U) minus the q2 residue, which is bounded
    // by |D| e^{-40} P(S_1 > U) and folded into the error budget
    const double tail = vol * tail_probability(alpha, U, spec.tail_order);
    const double tail_residue = tail * 4.3e-18;

    const double loss = head.value + tail;
    const double est_err = head.abs_error + tail_residue;
    if (!head.converged)
        throw tolerance_error("q_tilde: subordination quadrature failed", vol - loss,
                              est_err);
    return vol - loss;
}

McEstimate q_tilde_mc(const Domain& domain, const Alpha& alpha, double t,
                      const McConfig& cfg)
{
    validate(cfg);
    if (!(t > 0.0))
        throw std::domain_error("q_tilde_mc: t must be positive");
    const double vol = domain.volume();
    McEstimate est = mc_mean(cfg.n_samples, cfg.batch, [&](std::uint64_t i) {
        RngStream rng = RngStream::from(cfg.master_seed, i);
        const double x = uniform_point(domain, rng);
        const double s = sample(alpha, t, rng);
        const double tau = exit_time_sample(domain, x, rng);
        return tau > s ? 1.0 : 0.0;
    });
    // indicator mean: binomial standard error on the scaled estimate
    const double p = est.mean;
    est.std_error = vol * std::sqrt(std::max(p * (1.0 - p), 0.0)
                                    / static_cast<double>(est.n));
    est.mean = vol * p;
    return est;
}

namespace {

// Chunked mean of a 3-component per-sample functional (one value per grid
// resolution); same reproducibility contract as mc_mean.
template <class PerSample>
std::array<McEstimate, 3> mc_mean3(std::int64_t n, std::int64_t batch,
                                   PerSample&& per_sample)
{
    const std::int64_t n_chunks = (n + batch - 1) / batch;
    std::vector<std::array<double, 3>> sums(n_chunks, {0, 0, 0});
    std::vector<std::array<double, 3>> sumsqs(n_chunks, {0, 0, 0});
    parallel_chunks(n, batch, [&](std::int64_t c, std::int64_t b, std::int64_t e) {
        std::array<double, 3> s{0, 0, 0}, s2{0, 0, 0};
        for (std::int64_t i = b; i < e; ++i) {
            const std::array<double, 3> v = per_sample(static_cast<std::uint64_t>(i));
            for (int j = 0; j < 3; ++j) {
                s[j] += v[j];
                s2[j] += v[j] * v[j];
            }
        }
        sums[c] = s;
        sumsqs[c] = s2;
    });
    std::array<McEstimate, 3> out;
    for (int j = 0; j < 3; ++j) {
        double sum = 0.0, sumsq = 0.0;
        for (std::int64_t c = 0; c < n_chunks; ++c) {
            sum += sums[c][j];
            sumsq += sumsqs[c][j];
        }
        out[j].n = n;
        out[j].mean = sum / static_cast<double>(n);
        const double var =
            std::max(0.0, (sumsq - sum * sum / static_cast<double>(n)) / (n - 1.0));
        out[j].std_error = std::sqrt(var / static_cast<double>(n));
    }
    return out;
}

} // namespace

QAlphaMcResult q_alpha_mc(const Domain& domain, const Alpha& alpha, double t,
                          int n_grid, const McConfig& cfg)
{
    if (domain.kind() != DomainKind::interval)
        throw std::domain_error("q_alpha_mc: interval domains only");
    if (alpha.stability_case() != StabilityCase::supercritical)
        throw std::domain_error("q_alpha_mc: requires alpha in (1,2)");
    if (n_grid < 1)
        throw std::domain_error("q_alpha_mc: n_grid >= 1");
    validate(cfg);
    QAlphaMcResult out;
    out.grids = {n_grid, 2 * n_grid, 4 * n_grid};

    // one fine path per sample; the coarser resolutions monitor every 4th
    // and 2nd fine point, so refinement can only find more exits
    const double a = domain.a(), b = domain.b();
    const double vol = domain.volume();
    const int fine = 4 * n_grid;
    const double dt = t / fine;
    const double step_scale = std::pow(dt, 1.0 / alpha.rho()); // dt^{2/alpha}

    auto ests = mc_mean3(cfg.n_samples, cfg.batch, [&](std::uint64_t i) {
        RngStream rng = RngStream::from(cfg.master_seed, i);
        double x = a + rng.uniform() * vol;
        bool alive1 = true, alive2 = true, alive4 = true;
        for (int k = 1; k <= fine && (alive1 || alive2 || alive4); ++k) {
            const double ds = step_scale * sample(alpha, 1.0, rng);
            x += rng.normal() * std::sqrt(2.0 * ds);
            if (x <= a || x >= b) {
                alive4 = false;
                if (k % 2 == 0)
                    alive2 = false;
                if (k % 4 == 0)
                    alive1 = false;
            }
        }
        return std::array<double, 3>{alive1 ? 1.0 : 0.0, alive2 ? 1.0 : 0.0,
                                     alive4 ? 1.0 : 0.0};
    });
    for (int j = 0; j < 3; ++j) {
        const double p = ests[j].mean;
        ests[j].std_error = vol * std::sqrt(std::max(p * (1.0 - p), 0.0)
                                            / static_cast<double>(ests[j].n));
        ests[j].mean = vol * p;
        out.by_resolution[j] = ests[j];
    }
    out.refinement_drop01 = out.by_resolution[0].mean - out.by_resolution[1].mean;
    out.refinement_drop12 = out.by_resolution[1].mean - out.by_resolution[2].mean;
    return out;
}

SupStableResult sup_stable_mc(const Alpha& alpha, const McConfig& cfg, int n_grid)
{
    if (alpha.stability_case() != StabilityCase::supercritical)
        throw std::domain_error("sup_stable_mc: requires alpha in (1,2)");
    if (n_grid < 1)
        throw std::domain_error("sup_stable_mc: n_grid >= 1");
    validate(cfg);
    SupStableResult out;
    out.grids = {n_grid, 2 * n_grid, 4 * n_grid};

    const int fine = 4 * n_grid;
    const double dt = 1.0 / fine;
    const double step_scale = std::pow(dt, 1.0 / alpha.rho());
    auto ests = mc_mean3(cfg.n_samples, cfg.batch, [&](std::uint64_t i) {
        RngStream rng = RngStream::from(cfg.master_seed, i);
        double x = 0.0, m1 = 0.0, m2 = 0.0, m4 = 0.0;
        for (int k = 1; k <= fine; ++k) {
            const double ds = step_scale * sample(alpha, 1.0, rng);
            x += rng.normal() * std::sqrt(2.0 * ds);
            m4 = std::max(m4, x);
            if (k % 2 == 0)
                m2 = std::max(m2, x);
            if (k % 4 == 0)
                m1 = std::max(m1, x);
        }
        return std::array<double, 3>{m1, m2, m4};
    });
    for (int j = 0; j < 3; ++j)
        out.by_resolution[j] = ests[j];
    return out;
}

} // namespace shc
