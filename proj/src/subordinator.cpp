#include "shc/subordinator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

#include "shc/quadrature.hpp"
#include "shc/specfun.hpp"

namespace shc {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double eps = std::numeric_limits<double>::epsilon();

// cancellation budget for the alternating series (sum |term| / |sum|)
constexpr double kAmplificationBudget = 1e3;
// reference tolerance used when scanning for the series crossover
constexpr double kCrossoverTol = 1e-10;
constexpr int kMaxSeriesTerms = 400;
// Stirling fudge factor in the term majorant; certified in tests
constexpr double kStirlingFudge = 1.25;

double majorant_term(double rho, double x, int n)
{
    // (K/pi) rho^{rho(n+1)} (n/e)^{-(1-rho)n} x^{-rho n - 1}
    const double le = (rho * (n + 1)) * std::log(rho)
        - (1.0 - rho) * n * (std::log(static_cast<double>(n)) - 1.0)
        - (rho * n + 1.0) * std::log(x);
    return kStirlingFudge / pi * std::exp(le);
}

struct SeriesEval {
    double value = 0.0;
    double rel_error = 0.0;
    double amplification = 0.0;
    int terms = 0;
    bool tol_met = false;
};

// Alternating series for g(1, x); stops once the Stirling majorant tail is
// below tol * |partial sum|.
SeriesEval density_series(double rho, double x, double tol)
{
    SeriesEval out;
    const double lx = std::log(x);
    double sum = 0.0;
    double sum_abs = 0.0; // cancellation condition number is sum|t| / |sum|
    int n = 1;
    for (; n <= kMaxSeriesTerms; ++n) {
        const double lcoef =
            log_gamma(1.0 + rho * n) - log_gamma(1.0 + n) - (rho * n + 1.0) * lx;
        const double s = std::sin(pi * std::fmod(rho * n, 2.0));
        const double term = ((n % 2 == 0) ? -1.0 : 1.0) * std::exp(lcoef) * s / pi;
        sum += term;
        sum_abs += std::abs(term);
        if (n >= 2) {
            // the full majorant scan only pays off once its first term is
            // already inside the budget
            double prev = majorant_term(rho, x, n + 1);
            if (!(prev <= 0.25 * tol * std::abs(sum)))
                continue;
            double tail = prev;
            for (int m = n + 2; m < n + 200; ++m) {
                const double cur = majorant_term(rho, x, m);
                tail += cur;
                if (cur < 0.5 * prev && cur < 1e-3 * tail) {
                    tail += cur; // close with a crude geometric bound
                    break;
                }
                prev = cur;
            }
            if (tail <= 0.5 * tol * std::abs(sum) && std::abs(sum) > 0.0) {
                out.value = sum;
                out.terms = n;
                out.amplification = sum_abs / std::abs(sum);
                out.rel_error =
                    tail / std::abs(sum) + 20.0 * eps * out.amplification;
                out.tol_met = true;
                return out;
            }
        }
    }
    out.value = sum;
    out.terms = n - 1;
    out.amplification = std::abs(sum) > 0.0 ? sum_abs / std::abs(sum)
                                            : std::numeric_limits<double>::infinity();
    out.rel_error = std::numeric_limits<double>::infinity();
    out.tol_met = false;
    return out;
}

// log of the Zolotarev kernel a(u) = A(u)^{1/(1-rho)} on (0, pi)
double log_kanter_kernel(double rho, double u)
{
    return (rho * std::log(std::sin(rho * u))
            + (1.0 - rho) * std::log(std::sin((1.0 - rho) * u))
            - std::log(std::sin(u)))
        / (1.0 - rho);
}

double kernel_min(double rho)
{
    // a(0+) = (rho^rho (1-rho)^{1-rho})^{1/(1-rho)}
    return std::exp((rho * std::log(rho) + (1.0 - rho) * std::log(1.0 - rho))
                    / (1.0 - rho));
}

double log_sinc(double y)
{
    if (y < 1e-3) {
        const double y2 = y * y;
        return -y2 / 6.0 * (1.0 + y2 / 30.0 + y2 * y2 / 840.0);
    }
    return std::log(std::sin(y) / y);
}

// log(a(u) / a(0+)); cancellation-free, so (a - a_min) xi stays accurate
// for xi far beyond 1/eps
double log_kernel_ratio(double rho, double u)
{
    return (rho * log_sinc(rho * u) + (1.0 - rho) * log_sinc((1.0 - rho) * u)
            - log_sinc(u))
        / (1.0 - rho);
}

std::vector<double> peak_splits(double xi)
{
    // integrand concentrates near u = 0 on scale ~ xi^{-1/2} for large xi,
    // and develops a slowly-decaying essential singularity at pi when xi is
    // small; panels double away from both endpoints and the adaptive stage
    // refines the rest
    std::vector<double> splits;
    double w = std::min(pi / 16.0, 1.0 / std::sqrt(std::max(xi, 1.0)));
    for (; w < pi; w *= 2.0)
        splits.push_back(w);
    for (int k = 1; k <= 14; ++k)
        splits.push_back(pi * (1.0 - std::pow(2.0, -k)));
    return splits;
}

// Inversion integral on the deformed contour, with the dominant exponential
// factored out so tiny densities keep full relative accuracy:
//   g(1,x) = rho/((1-rho) pi) x^{-1/(1-rho)} e^{-a_min xi}
//            * int_0^pi a(u) exp(-(a(u)-a_min) xi) du,   xi = x^{-rho/(1-rho)}
DensityEval density_contour(double rho, double x, double tol)
{
    const double xi = std::pow(x, -rho / (1.0 - rho));
    const double amin = kernel_min(rho);

    auto integrand = [&](double u) -> double {
        if (u <= 0.0 || u >= pi)
            return 0.0;
        const double d = log_kernel_ratio(rho, u); // log(a/amin) >= 0
        if (d > 600.0)
            return 0.0; // kernel blow-up near pi; exp(-a xi) wins
        const double e = d - amin * std::expm1(d) * xi;
        return e < -745.0 ? 0.0 : amin * std::exp(e);
    };

    QuadOptions opt;
    opt.rel_tol = std::max(tol * 0.1, 1e-13);
    opt.abs_tol = 0.0;
    opt.max_panels = 4000;
    const auto splits = peak_splits(xi);
    QuadResult q = integrate(integrand, 0.0, pi, opt, splits);
    if (!q.converged || !(q.value > 0.0))
        throw tolerance_error("subordinator density: inversion quadrature failed",
                              q.value, q.abs_error);

    const double lg = std::log(rho / ((1.0 - rho) * pi))
        - std::log(x) / (1.0 - rho) - amin * xi + std::log(q.value);

    DensityEval out;
    out.value = lg < -745.0 ? 0.0 : std::exp(lg);
    out.method = DensityMethod::fourier;
    out.est_error = q.abs_error / q.value + 8.0 * eps;
    if (out.est_error > tol)
        throw tolerance_error("subordinator density: tolerance not met", out.value,
                              out.est_error);
    return out;
}

// per-alpha cached quantities, computed lazily; reads and writes go through
// the lock, the (deterministic) computations run outside it
struct AlphaCache {
    double x_star = 0.0;
    double c_env = 0.0; // 0 until certified
};

std::map<double, AlphaCache>& alpha_cache_map()
{
    static std::map<double, AlphaCache> cache;
    return cache;
}

std::mutex& alpha_cache_mutex()
{
    static std::mutex mu;
    return mu;
}

AlphaCache cache_snapshot(double alpha)
{
    std::lock_guard<std::mutex> lock(alpha_cache_mutex());
    return alpha_cache_map()[alpha];
}

void cache_store(double alpha, double AlphaCache::* field, double value)
{
    std::lock_guard<std::mutex> lock(alpha_cache_mutex());
    alpha_cache_map()[alpha].*field = value;
}

double scan_crossover(double rho)
{
    // smallest grid abscissa where the series meets the reference tolerance
    // within the cancellation budget; grid is fine enough that the exact
    // threshold does not matter
    const double lo = 1e-4, hi = 1e8;
    const int per_decade = 16;
    const int steps = static_cast<int>(std::log10(hi / lo) * per_decade);
    for (int j = 0; j <= steps; ++j) {
        const double x = lo * std::pow(10.0, static_cast<double>(j) / per_decade);
        SeriesEval s = density_series(rho, x, kCrossoverTol);
        if (s.tol_met && s.amplification <= kAmplificationBudget && s.value > 0.0)
            return x;
    }
    throw nonconvergence_error("series crossover scan failed");
}

} // namespace

Alpha::Alpha(double alpha) : alpha_(alpha), rho_(alpha / 2.0)
{
    if (!(alpha > 0.0) || !(alpha < 2.0))
        throw std::domain_error("Alpha: stability index must lie strictly in (0,2)");
}

StabilityCase Alpha::stability_case() const
{
    if (alpha_ < 1.0)
        return StabilityCase::subcritical;
    if (alpha_ > 1.0)
        return StabilityCase::supercritical;
    return StabilityCase::critical;
}

TruncationBound series_tail_majorant(const Alpha& alpha, double x, int n_start)
{
    if (n_start < 1)
        throw std::domain_error("series_tail_majorant: n_start >= 1");
    const double rho = alpha.rho();
    double tail = 0.0;
    double prev = majorant_term(rho, x, n_start);
    tail = prev;
    for (int m = n_start + 1; m < n_start + 400; ++m) {
        const double cur = majorant_term(rho, x, m);
        tail += cur;
        if (cur < 0.5 * prev && cur < 1e-6 * tail)
            break;
        prev = cur;
    }
    return TruncationBound{n_start, tail};
}

double series_crossover(const Alpha& alpha)
{
    AlphaCache c = cache_snapshot(alpha.value());
    if (c.x_star == 0.0) {
        c.x_star = scan_crossover(alpha.rho());
        cache_store(alpha.value(), &AlphaCache::x_star, c.x_star);
    }
    return c.x_star;
}

DensityEval density_at_one(const Alpha& alpha, double x, double tol)
{
    if (!(x > 0.0))
        throw std::domain_error("density_at_one: x must be positive");
    if (!(tol > 0.0))
        throw std::domain_error("density_at_one: tol must be positive");
    const double rho = alpha.rho();
    if (x >= series_crossover(alpha)) {
        SeriesEval s = density_series(rho, x, tol);
        if (!s.tol_met || s.amplification > kAmplificationBudget
            || s.rel_error > tol)
            throw nonconvergence_error(
                "density series: cancellation budget, term cap, or tolerance "
                "floor exceeded");
        DensityEval out;
        out.value = std::max(s.value, 0.0);
        out.method = DensityMethod::series;
        out.est_error = s.rel_error;
        return out;
    }
    return density_contour(rho, x, tol);
}

DensityEval density(const Alpha& alpha, double t, double x, double tol)
{
    if (!(t > 0.0))
        throw std::domain_error("density: t must be positive");
    if (t == 1.0)
        return density_at_one(alpha, x, tol);
    const double scale = std::pow(t, -2.0 / alpha.value());
    DensityEval out = density_at_one(alpha, x * scale, tol);
    out.value *= scale;
    return out;
}

DensityEval density_branch(const Alpha& alpha, double x, double tol,
                           DensityMethod force)
{
    if (!(x > 0.0) || !(tol > 0.0))
        throw std::domain_error("density_branch: x, tol must be positive");
    if (force == DensityMethod::fourier)
        return density_contour(alpha.rho(), x, tol);
    SeriesEval s = density_series(alpha.rho(), x, tol);
    if (!s.tol_met)
        throw nonconvergence_error("density_branch: series term cap exceeded");
    DensityEval out;
    out.value = std::max(s.value, 0.0);
    out.method = DensityMethod::series;
    out.est_error = s.rel_error;
    return out;
}

double envelope_constant(const Alpha& alpha)
{
    AlphaCache c = cache_snapshot(alpha.value());
    if (c.c_env == 0.0) {
        const double rho = alpha.rho();
        double worst = 0.0;
        for (int j = 0; j <= 240; ++j) {
            const double x = 1e-4 * std::pow(10.0, j / 20.0); // up to 1e8
            const double ref = std::min(1.0, std::pow(x, -1.0 - rho));
            const double g = density_at_one(alpha, x, 1e-9).value;
            worst = std::max(worst, g / ref);
        }
        c.c_env = worst * 1.05; // scan certificate with safety margin
        cache_store(alpha.value(), &AlphaCache::c_env, c.c_env);
    }
    return c.c_env;
}

double density_upper_envelope(const Alpha& alpha, double t, double x)
{
    if (!(t > 0.0) || !(x > 0.0))
        throw std::domain_error("density_upper_envelope: t, x must be positive");
    const double a = alpha.value();
    return envelope_constant(alpha)
        * std::min(std::pow(t, -2.0 / a), t * std::pow(x, -1.0 - a / 2.0));
}

double fractional_moment(const Alpha& alpha, double gamma_exponent)
{
    if (!(gamma_exponent < alpha.rho()))
        throw std::domain_error("fractional_moment: exponent must be below alpha/2");
    return gamma(1.0 - 2.0 * gamma_exponent / alpha.value())
        / gamma(1.0 - gamma_exponent);
}

namespace {

// termwise integral of the tail series: sum over n of
// term_n [ s^{p - rho n} / (rho n - p) ] from x to infinity, p < rho
double termwise_tail_integral(double rho, double x, double p, int max_terms,
                              double* err_out)
{
    const double lx = std::log(x);
    double sum = 0.0;
    int n = 1;
    for (; n <= max_terms; ++n) {
        const double denom = rho * n - p;
        if (denom <= 0.0)
            throw std::domain_error("termwise tail: non-integrable leading term");
        const double lcoef = log_gamma(1.0 + rho * n) - log_gamma(1.0 + n)
            - (rho * n - p) * lx;
        const double s = std::sin(pi * std::fmod(rho * n, 2.0));
        const double term =
            ((n % 2 == 0) ? -1.0 : 1.0) * std::exp(lcoef) * s / (pi * denom);
        sum += term;
        if (n >= 3) {
            const double tail_cap = majorant_term(rho, x, n + 1) * x / (rho * (n + 1) - p);
            if (tail_cap < 1e-15 * std::abs(sum) + 1e-300) {
                if (err_out)
                    *err_out = tail_cap;
                return sum;
            }
        }
    }
    if (err_out)
        *err_out = majorant_term(rho, x, n) * x / (rho * n - p);
    return sum;
}

// quadrature of s^p g(1,s) over [lo, hi] with log-spaced panels
double power_density_quad(const Alpha& alpha, double p, double lo, double hi,
                          double rel_tol)
{
    if (hi <= lo)
        return 0.0;
    auto f = [&](double s) {
        if (s <= 0.0)
            return 0.0;
        const double g = density_at_one(alpha, s, 1e-11).value;
        return g == 0.0 ? 0.0 : std::pow(s, p) * g;
    };
    std::vector<double> splits;
    const double xs = series_crossover(alpha);
    for (double v : {xs * 0.25, xs, 1.0, 4.0})
        if (v > lo && v < hi)
            splits.push_back(v);
    for (double v = std::max(lo, 8.0) * 4.0; v < hi; v *= 4.0)
        splits.push_back(v);
    QuadOptions opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = 1e-300;
    QuadResult q = integrate_or_throw(f, lo, hi, opt, splits);
    return q.value;
}

} // namespace

double truncated_moment(const Alpha& alpha, int k, double cutoff)
{
    if (k < 1)
        throw std::domain_error("truncated_moment: k >= 1");
    if (!(cutoff > 0.0))
        throw std::domain_error("truncated_moment: cutoff must be positive");
    const double p = 0.5 * k;
    const double rho = alpha.rho();
    const double x_term = std::max(2.0 * series_crossover(alpha), 16.0);
    if (cutoff <= x_term)
        return power_density_quad(alpha, p, 0.0, cutoff, 1e-9);
    // head by quadrature, then exact termwise integral of the series over
    // [x_term, cutoff]
    const double head = power_density_quad(alpha, p, 0.0, x_term, 1e-9);
    double e1 = 0.0, e2 = 0.0;
    double mid;
    if (std::abs(rho - p) < 1e-12) {
        // leading term integrates to a logarithm; fall back to quadrature
        mid = power_density_quad(alpha, p, x_term, cutoff, 1e-9);
        return head + mid;
    }
    if (p < rho) {
        mid = termwise_tail_integral(rho, x_term, p, kMaxSeriesTerms, &e1)
            - termwise_tail_integral(rho, cutoff, p, kMaxSeriesTerms, &e2);
    } else {
        // s^p g(1,s) is not integrable at infinity; integrate the series
        // termwise over the finite window instead
        mid = 0.0;
        const double l1 = std::log(x_term), l2 = std::log(cutoff);
        for (int n = 1; n <= kMaxSeriesTerms; ++n) {
            const double q = p - rho * n; // exponent of s^q
            const double s = std::sin(pi * std::fmod(rho * n, 2.0));
            const double lc = log_gamma(1.0 + rho * n) - log_gamma(1.0 + n);
            double integral;
            if (std::abs(q) < 1e-13)
                integral = l2 - l1;
            else
                integral = (std::exp((q)*l2) - std::exp((q)*l1)) / q;
            const double term =
                ((n % 2 == 0) ? -1.0 : 1.0) * std::exp(lc) * s / pi * integral;
            mid += term;
            if (n >= 3 && std::abs(term) < 1e-16 * std::abs(mid))
                break;
        }
    }
    return head + mid;
}

double tail_half_moment(const Alpha& alpha, double cutoff)
{
    if (alpha.stability_case() != StabilityCase::supercritical)
        throw std::domain_error("tail_half_moment: requires alpha in (1,2)");
    if (cutoff < 0.0)
        throw std::domain_error("tail_half_moment: cutoff must be nonnegative");
    const double rho = alpha.rho();
    const double x_term = std::max(2.0 * series_crossover(alpha), 16.0);
    double err = 0.0;
    if (cutoff >= x_term)
        return termwise_tail_integral(rho, cutoff, 0.5, kMaxSeriesTerms, &err);
    return power_density_quad(alpha, 0.5, cutoff, x_term, 1e-10)
        + termwise_tail_integral(rho, x_term, 0.5, kMaxSeriesTerms, &err);
}

double tail_probability(const Alpha& alpha, double x, int max_terms)
{
    if (!(x > 0.0))
        return 1.0;
    const double rho = alpha.rho();
    if (x >= series_crossover(alpha)) {
        double err = 0.0;
        return termwise_tail_integral(rho, x, 0.0, max_terms, &err);
    }
    // CDF through the deformed-contour representation
    const double xi = std::pow(x, -rho / (1.0 - rho));
    const double amin = kernel_min(rho);
    auto integrand = [&](double u) -> double {
        if (u <= 0.0 || u >= pi)
            return 0.0;
        const double d = log_kernel_ratio(rho, u);
        if (d > 600.0)
            return 0.0;
        const double e = -amin * xi - amin * std::expm1(d) * xi;
        return e < -745.0 ? 0.0 : std::exp(e);
    };
    QuadOptions opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 1e-15;
    const auto splits = peak_splits(xi);
    QuadResult q = integrate_or_throw(integrand, 0.0, pi, opt, splits);
    return 1.0 - q.value / pi;
}

double kanter_kernel(double rho, double u)
{
    return std::exp(log_kanter_kernel(rho, u));
}

double sample(const Alpha& alpha, double t, RngStream& rng)
{
    if (!(t > 0.0))
        throw std::domain_error("sample: t must be positive");
    const double rho = alpha.rho();
    const double u = pi * rng.uniform();
    const double w = rng.exponential();
    // S_1 = (a(U)/W)^{(1-rho)/rho}
    const double ls = (1.0 - rho) / rho * (log_kanter_kernel(rho, u) - std::log(w));
    return std::pow(t, 1.0 / rho) * std::exp(ls);
}

} // namespace shc
