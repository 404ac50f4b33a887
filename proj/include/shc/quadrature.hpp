#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace shc {

// Thrown when an adaptive quadrature cannot reach the requested tolerance
// within its evaluation budget.
class tolerance_error : public std::runtime_error {
public:
    tolerance_error(const std::string& msg, double value, double est_error)
        : std::runtime_error(msg), value(value), est_error(est_error) {}
    double value;
    double est_error;
};

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0; // error estimate, absolute
    int evaluations = 0;
    bool converged = false;
};

struct QuadOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    int max_panels = 4000; // subdivision budget
};

namespace detail {

// 15-point Kronrod nodes / weights with the embedded 7-point Gauss rule
// (QUADPACK dqk15 constants).
inline constexpr double gk15_x[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
};
inline constexpr double gk15_wk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};
inline constexpr double gk15_wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

struct Panel {
    double a, b;
    double value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15_panel(F&& f, double a, double b)
{
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = gk15_wk[7] * fc;
    double gauss = gk15_wg[3] * fc;
    double resabs = gk15_wk[7] * std::abs(fc);
    for (int j = 0; j < 7; ++j) {
        const double x = h * gk15_x[j];
        const double f1 = f(c - x);
        const double f2 = f(c + x);
        kron += gk15_wk[j] * (f1 + f2);
        resabs += gk15_wk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1)
            gauss += gk15_wg[j / 2] * (f1 + f2);
    }
    kron *= h;
    gauss *= h;
    resabs *= std::abs(h);
    // QUADPACK-style sharpened error estimate
    double err = std::abs(kron - gauss);
    if (resabs > 0.0 && err > 0.0) {
        const double scaled = std::pow(200.0 * err / resabs, 1.5);
        err = resabs * std::min(1.0, scaled);
    }
    return Panel{a, b, kron, err};
}

} // namespace detail

// Adaptive Gauss-Kronrod integration of f over [a, b]. Initial panels are
// the segments between consecutive split points (splits outside (a, b) are
// ignored); the worst panel is bisected until the summed error estimate
// meets abs_tol + rel_tol * |integral| or the panel budget runs out.
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadOptions& opt = {},
                     std::span<const double> splits = {})
{
    QuadResult res;
    if (a == b) {
        res.converged = true;
        return res;
    }

    std::vector<double> edges;
    edges.push_back(a);
    for (double s : splits)
        if (s > a && s < b)
            edges.push_back(s);
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());

    std::priority_queue<detail::Panel> heap;
    double total = 0.0, toterr = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        auto p = detail::gk15_panel(f, edges[i], edges[i + 1]);
        total += p.value;
        toterr += p.error;
        res.evaluations += 15;
        heap.push(p);
    }

    int panels = static_cast<int>(heap.size());
    while (toterr > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))
           && panels < opt.max_panels) {
        detail::Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // interval at floating-point resolution; keep its estimate
            total += 0.0;
            heap.push(detail::Panel{worst.a, worst.b, worst.value, 0.0});
            toterr -= worst.error;
            continue;
        }
        auto left = detail::gk15_panel(f, worst.a, mid);
        auto right = detail::gk15_panel(f, mid, worst.b);
        res.evaluations += 30;
        total += left.value + right.value - worst.value;
        toterr += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++panels;
    }

    res.value = total;
    res.abs_error = toterr;
    res.converged = toterr <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
    return res;
}

// As integrate(), but throws tolerance_error on failure.
template <class F>
QuadResult integrate_or_throw(F&& f, double a, double b, const QuadOptions& opt = {},
                              std::span<const double> splits = {})
{
    QuadResult r = integrate(std::forward<F>(f), a, b, opt, splits);
    if (!r.converged)
        throw tolerance_error("adaptive quadrature did not meet tolerance", r.value,
                              r.abs_error);
    return r;
}

} // namespace shc
