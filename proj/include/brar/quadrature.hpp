#pragma once

#include <cmath>
#include <cstddef>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

// Adaptive composite Gauss-Legendre integration. A 15-point rule is applied
// per panel; a panel is accepted when bisecting it moves the estimate by
// less than its share of the tolerance, otherwise the halves are pushed back
// on the work stack. Infinite ranges are truncated where the integrand
// envelope falls below 1e-12 relative to its observed peak.

namespace brar {

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// 15-point Gauss-Legendre abscissae/weights on [-1,1] (positive half).
inline constexpr double gl15_x[8] = {
    0.0000000000000000, 0.2011940939974345, 0.3941513470775634,
    0.5709721726085388, 0.7244177313601701, 0.8482065834104272,
    0.9372733924007060, 0.9879925180204854};
inline constexpr double gl15_w[8] = {
    0.2025782419255613, 0.1984314853271116, 0.1861610000155622,
    0.1662692058169939, 0.1395706779261543, 0.1071592204671719,
    0.0703660474881081, 0.0307532419961173};

template <class F>
double gl15_panel(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double m = 0.5 * (b - a);
    double s = gl15_w[0] * f(c);
    for (int i = 1; i < 8; ++i) {
        const double dx = m * gl15_x[i];
        s += gl15_w[i] * (f(c + dx) + f(c - dx));
    }
    return s * m;
}

}  // namespace detail

template <class F>
double integrate(const F& f, double a, double b, double rel_tol = 1e-8,
                 int initial_panels = 32) {
    if (!(a < b)) {
        if (a == b) return 0.0;
        throw std::invalid_argument("integrate: requires a <= b");
    }
    // Each panel carries the bisected estimate and |coarse - bisected| as
    // its error bound. Refinement is worst-panel-first against a global
    // error target, which keeps jump discontinuities and mildly noisy
    // integrands from triggering runaway subdivision.
    struct Panel {
        double a, b, value, error;
        bool operator<(const Panel& other) const { return error < other.error; }
    };
    std::size_t evaluations = 0;
    constexpr std::size_t max_evaluations = 1000000;
    auto make_panel = [&](double pa, double pb) {
        const double mid = 0.5 * (pa + pb);
        const double coarse = detail::gl15_panel(f, pa, pb);
        const double fine =
            detail::gl15_panel(f, pa, mid) + detail::gl15_panel(f, mid, pb);
        evaluations += 3;
        return Panel{pa, pb, fine, std::fabs(fine - coarse)};
    };

    std::priority_queue<Panel> queue;
    double total = 0.0, total_error = 0.0;
    for (int k = 0; k < initial_panels; ++k) {
        const Panel p = make_panel(a + (b - a) * k / initial_panels,
                                   a + (b - a) * (k + 1) / initial_panels);
        total += p.value;
        total_error += p.error;
        queue.push(p);
    }

    const double width_floor = 1e-13 * (b - a);
    while (!queue.empty()) {
        if (total_error <= rel_tol * std::max(std::fabs(total), 1e-300)) break;
        const Panel worst = queue.top();
        if (worst.b - worst.a < width_floor) break;  // roundoff-limited
        queue.pop();
        if (evaluations > max_evaluations)
            throw QuadratureError("integrate: panel budget exhausted");
        const double mid = 0.5 * (worst.a + worst.b);
        const Panel left = make_panel(worst.a, mid);
        const Panel right = make_panel(mid, worst.b);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
    }
    if (!std::isfinite(total)) throw QuadratureError("integrate: non-finite result");
    return total;
}

// Integral over the whole real line. The bracket grows outward from
// [-1,1] until the sampled envelope drops below `envelope_tol` of the
// peak seen so far.
template <class F>
double integrate_real_line(const F& f, double rel_tol = 1e-8,
                           double envelope_tol = 1e-12) {
    double peak = std::fabs(f(0.0));
    for (double x : {-1.0, -0.5, 0.5, 1.0}) peak = std::max(peak, std::fabs(f(x)));
    peak = std::max(peak, 1e-300);

    auto expand = [&](double x0, double direction) {
        double x = x0;
        for (int iter = 0; iter < 400; ++iter) {
            bool quiet = true;
            for (double frac : {0.25, 0.5, 0.75, 1.0}) {
                const double probe = x + direction * frac * (std::fabs(x) + 1.0);
                const double v = std::fabs(f(probe));
                peak = std::max(peak, v);
                if (v > envelope_tol * peak) quiet = false;
            }
            x += direction * (std::fabs(x) + 1.0);
            if (quiet) return x;
        }
        throw QuadratureError("integrate_real_line: envelope never decays");
    };

    const double hi = expand(1.0, +1.0);
    const double lo = expand(-1.0, -1.0);
    return integrate(f, lo, hi, rel_tol);
}

// Fixed composite Gauss-Legendre grid over [lo, hi]: `panels` panels with
// the 15-point rule each. Shared by the statistic evaluations, where the
// same nodes are reused across several integrand factors.
struct QuadratureGrid {
    std::vector<double> nodes;
    std::vector<double> weights;

    QuadratureGrid(double lo, double hi, std::size_t panels) {
        if (!(lo < hi) || panels == 0)
            throw std::invalid_argument("QuadratureGrid: empty range");
        nodes.reserve(panels * 15);
        weights.reserve(panels * 15);
        const double width = (hi - lo) / static_cast<double>(panels);
        for (std::size_t k = 0; k < panels; ++k) {
            const double a = lo + k * width;
            const double c = a + 0.5 * width;
            const double m = 0.5 * width;
            nodes.push_back(c);
            weights.push_back(detail::gl15_w[0] * m);
            for (int i = 1; i < 8; ++i) {
                const double dx = m * detail::gl15_x[i];
                nodes.push_back(c + dx);
                weights.push_back(detail::gl15_w[i] * m);
                nodes.push_back(c - dx);
                weights.push_back(detail::gl15_w[i] * m);
            }
        }
    }

    template <class F>
    double sum(const F& integrand) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            acc += weights[i] * integrand(nodes[i]);
        return acc;
    }
};

}  // namespace brar
