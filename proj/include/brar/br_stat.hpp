#pragma once

#include <cmath>
#include <concepts>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

#include "brar/kde.hpp"
#include "brar/kernel.hpp"
#include "brar/noise.hpp"
#include "brar/quadrature.hpp"

// The integrated-squared-error statistics
//   T_hat   = n h int (fhat - K_h * f)^2 a     (smoothed target)
//   T_tilde = n h int (fhat - f)^2 a           (raw target)
// together with their asymptotic centering mu = int f a . int K^2 and
// variance tau^2 = 2 int f^2 a^2 . int (K*K)^2. With the truncated
// reciprocal weight a = 1/f0 on [-delta, delta] these collapse to
// mu = 2 delta int K^2 and tau^2 = 4 delta int (K*K)^2, independent of f0.

namespace brar {

struct DegenerateVariance : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class WeightFn {
 public:
    static WeightFn truncated_reciprocal(const NoiseSpec& f0, double delta) {
        if (!(delta > 0.0))
            throw std::invalid_argument("weight: delta must be > 0");
        if (!f0.positive_on(-delta, delta))
            throw std::invalid_argument(
                "weight: f0 must be positive on [-delta, delta]");
        WeightFn w;
        w.lo_ = -delta;
        w.hi_ = delta;
        w.delta_ = delta;
        w.eval_ = [f0](double x) { return 1.0 / f0.density(x); };
        w.truncated_reciprocal_ = true;
        return w;
    }

    static WeightFn generic(std::function<double(double)> a, double lo, double hi) {
        if (!(lo < hi)) throw std::invalid_argument("weight: empty support");
        WeightFn w;
        w.lo_ = lo;
        w.hi_ = hi;
        w.eval_ = std::move(a);
        return w;
    }

    // Support detected from the envelope: expands outward from [-1,1] until
    // |a| stays below 1e-12 of the peak seen so far.
    static WeightFn generic(std::function<double(double)> a) {
        double peak = 1e-300;
        auto quiet_from = [&](double start, double direction) {
            double x = start;
            for (int iter = 0; iter < 200; ++iter) {
                bool quiet = true;
                for (double frac : {0.25, 0.5, 0.75, 1.0}) {
                    const double v =
                        std::fabs(a(x + direction * frac * (std::fabs(x) + 1.0)));
                    peak = std::max(peak, v);
                    if (v > 1e-12 * peak) quiet = false;
                }
                x += direction * (std::fabs(x) + 1.0);
                if (quiet) return x;
            }
            throw std::invalid_argument("weight: envelope never decays");
        };
        for (double probe : {-1.0, -0.5, 0.0, 0.5, 1.0})
            peak = std::max(peak, std::fabs(a(probe)));
        const double hi = quiet_from(1.0, +1.0);
        const double lo = quiet_from(-1.0, -1.0);
        return generic(std::move(a), lo, hi);
    }

    double operator()(double x) const {
        if (x < lo_ || x > hi_) return 0.0;
        return eval_(x);
    }

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    bool is_truncated_reciprocal() const { return truncated_reciprocal_; }
    double delta() const { return delta_; }

 private:
    WeightFn() = default;

    std::function<double(double)> eval_;
    double lo_ = 0.0;
    double hi_ = 0.0;
    double delta_ = 0.0;
    bool truncated_reciprocal_ = false;
};

struct BrReport {
    enum class StatKind { t_hat, t_tilde };
    StatKind kind = StatKind::t_tilde;
    double value = 0.0;
    double mu = 0.0;
    double tau2 = 0.0;
    double z = 0.0;
    long n = 0;
    double h = 0.0;
};

inline const char* stat_kind_name(BrReport::StatKind k) {
    return k == BrReport::StatKind::t_hat ? "t_hat" : "t_tilde";
}

template <class Density>
    requires(!std::same_as<std::decay_t<Density>, NoiseSpec>)
double centering_mu(Density&& f, const WeightFn& a, const Kernel& kernel) {
    const double fa = integrate([&](double x) { return f(x) * a(x); }, a.lo(),
                                a.hi(), 1e-9);
    return fa * kernel.l2_norm_sq();
}

template <class Density>
    requires(!std::same_as<std::decay_t<Density>, NoiseSpec>)
double variance_tau2(Density&& f, const WeightFn& a, const Kernel& kernel) {
    const double f2a2 = integrate(
        [&](double x) {
            const double v = f(x) * a(x);
            return v * v;
        },
        a.lo(), a.hi(), 1e-9);
    return 2.0 * f2a2 * kernel.autoconv_l2_sq();
}

inline double centering_mu(const NoiseSpec& f, const WeightFn& a, const Kernel& k) {
    return centering_mu([&f](double x) { return f.density(x); }, a, k);
}
inline double variance_tau2(const NoiseSpec& f, const WeightFn& a, const Kernel& k) {
    return variance_tau2([&f](double x) { return f.density(x); }, a, k);
}

// Simplified constants for the truncated reciprocal weight.
inline double centering_mu_simplified(double delta, const Kernel& k) {
    return 2.0 * delta * k.l2_norm_sq();
}
inline double variance_tau2_simplified(double delta, const Kernel& k) {
    return 4.0 * delta * k.autoconv_l2_sq();
}

namespace detail {

// Shared integration grid for one statistic evaluation: composite 15-point
// panels over the weight support, with the panel width tracking the
// bandwidth so the kernel bumps of fhat are resolved. The compact kernel's
// taper kinks need finer panels than the smooth gaussian, the one-sided
// exponential sits in between (its jumps only face order-of-magnitude
// checks).
inline double panel_width_factor(const Kernel& kernel) {
    switch (kernel.kind()) {
        case KernelKind::gaussian:
            return 1.0;
        case KernelKind::smoothed_uniform:
            return kernel.eps_s();
        case KernelKind::exponential_one_sided:
            return 0.25;
    }
    return 1.0;
}

inline QuadratureGrid statistic_grid(const WeightFn& a, double h,
                                     const Kernel& kernel) {
    const double width = a.hi() - a.lo();
    auto panels =
        static_cast<std::size_t>(std::ceil(width / (h * panel_width_factor(kernel))));
    panels = std::max<std::size_t>(panels, 16);
    panels = std::min<std::size_t>(panels, 8192);
    return QuadratureGrid(a.lo(), a.hi(), panels);
}

template <class Target>
double br_statistic(std::span<const double> residuals, const Kernel& kernel,
                    double h, Target&& target, const WeightFn& a) {
    if (!(h > 0.0)) throw std::invalid_argument("statistic: h must be > 0");
    const DensityGrid fhat(residuals, kernel, h);
    const QuadratureGrid grid = statistic_grid(a, h, kernel);
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
        const double x = grid.nodes[i];
        const double w = a(x);
        if (w == 0.0) continue;
        const double d = fhat(x) - target(x);
        acc += grid.weights[i] * d * d * w;
    }
    return static_cast<double>(residuals.size()) * h * acc;
}

}  // namespace detail

template <class Density>
    requires(!std::same_as<std::decay_t<Density>, NoiseSpec>)
double t_hat(std::span<const double> residuals, const Kernel& kernel, double h,
             Density&& f, const WeightFn& a) {
    const auto target = smoothed_target(kernel, h, std::forward<Density>(f));
    return detail::br_statistic(residuals, kernel, h, target, a);
}

template <class Density>
    requires(!std::same_as<std::decay_t<Density>, NoiseSpec>)
double t_tilde(std::span<const double> residuals, const Kernel& kernel, double h,
               Density&& f, const WeightFn& a) {
    return detail::br_statistic(residuals, kernel, h, std::forward<Density>(f), a);
}

inline double t_hat(std::span<const double> residuals, const Kernel& kernel,
                    double h, const NoiseSpec& f, const WeightFn& a) {
    return t_hat(residuals, kernel, h,
                 [&f](double x) { return f.density(x); }, a);
}
inline double t_tilde(std::span<const double> residuals, const Kernel& kernel,
                      double h, const NoiseSpec& f, const WeightFn& a) {
    return t_tilde(residuals, kernel, h,
                   [&f](double x) { return f.density(x); }, a);
}

inline double standardize(double value, double mu, double tau2, double h) {
    if (!(tau2 > 0.0))
        throw DegenerateVariance("standardize: tau^2 must be > 0");
    if (!(h > 0.0)) throw std::invalid_argument("standardize: h must be > 0");
    return (value - mu) / (std::sqrt(tau2) * std::sqrt(h));
}

}  // namespace brar
