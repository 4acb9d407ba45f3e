#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "brar/br_stat.hpp"
#include "brar/kde.hpp"
#include "brar/math.hpp"
#include "brar/noise.hpp"
#include "brar/parallel.hpp"
#include "brar/quadrature.hpp"
#include "brar/rng.hpp"

// The goodness-of-fit decision procedure built on T_tilde with the
// truncated reciprocal weight: H0 holds when the chi-square-type distance
// Delta_delta(f, f0) vanishes, and the standardized statistic is compared
// against the upper normal quantile. A one-sample Kolmogorov-Smirnov test
// serves as the classical baseline, and a random-walk variant based on
// Wiener-functional quantiles is exposed for the asymmetric-kernel case.

namespace brar {

struct TestConfig {
    double delta;
    double alpha;
    Kernel kernel;
    Bandwidth bandwidth;
    NoiseSpec f0;
    bool with_ks_baseline = false;

    TestConfig(double delta_, double alpha_, Kernel kernel_, Bandwidth bandwidth_,
               NoiseSpec f0_)
        : delta(delta_),
          alpha(alpha_),
          kernel(std::move(kernel_)),
          bandwidth(bandwidth_),
          f0(std::move(f0_)) {
        if (!(delta > 0.0)) throw std::invalid_argument("TestConfig: delta must be > 0");
        if (!(alpha > 0.0 && alpha < 1.0))
            throw std::invalid_argument("TestConfig: alpha must lie in (0,1)");
        if (!f0.positive_on(-delta, delta))
            throw std::invalid_argument(
                "TestConfig: f0 must be positive on [-delta, delta]");
    }
};

struct KsResult {
    double d = 0.0;
    double p_value = 1.0;
};

struct TestReport {
    BrReport br;
    bool reject = false;
    double p_value = 1.0;
    std::optional<KsResult> baseline_ks;
};

// Delta_delta(f, f0) = int_{-delta}^{delta} (f - f0)^2 / f0.
template <class DensityF, class DensityF0>
    requires(!std::same_as<std::decay_t<DensityF0>, NoiseSpec>)
double delta_distance(DensityF&& f, DensityF0&& f0, double delta) {
    if (!(delta > 0.0))
        throw std::invalid_argument("delta_distance: delta must be > 0");
    return integrate(
        [&](double x) {
            const double base = f0(x);
            if (!(base > 0.0))
                throw std::invalid_argument(
                    "delta_distance: f0 vanishes inside [-delta, delta]");
            const double d = f(x) - base;
            return d * d / base;
        },
        -delta, delta, 1e-9);
}

inline double delta_distance(const NoiseSpec& f, const NoiseSpec& f0, double delta) {
    if (!f0.positive_on(-delta, delta))
        throw std::invalid_argument(
            "delta_distance: f0 vanishes inside [-delta, delta]");
    return delta_distance([&f](double x) { return f.density(x); },
                          [&f0](double x) { return f0.density(x); }, delta);
}

// One-sample Kolmogorov-Smirnov statistic with the asymptotic p-value.
// The effective sample size uses the classic Stephens small-sample factor
// sqrt(n) + 0.12 + 0.11/sqrt(n) before the Kolmogorov survival function.
template <class Cdf>
    requires(!std::same_as<std::decay_t<Cdf>, NoiseSpec>)
KsResult ks_test(std::span<const double> sample, Cdf&& cdf0) {
    if (sample.empty()) throw std::invalid_argument("ks_test: empty sample");
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double u = cdf0(sorted[i]);
        const double lower = u - static_cast<double>(i) / n;
        const double upper = static_cast<double>(i + 1) / n - u;
        d = std::max({d, lower, upper});
    }
    const double root_n = std::sqrt(n);
    const double effective = root_n + 0.12 + 0.11 / root_n;
    KsResult result;
    result.d = d;
    result.p_value = kolmogorov_survival(effective * d);
    return result;
}

inline KsResult ks_test(std::span<const double> sample, const NoiseSpec& f0) {
    return ks_test(sample, [&f0](double x) { return f0.cdf(x); });
}

// Full decision procedure on a residual set: T_tilde^0 with the truncated
// reciprocal weight, the simplified mu and tau^2, a one-sided normal
// p-value and the strict-inequality rejection rule.
inline TestReport br_gof_test(std::span<const double> residuals,
                              const TestConfig& cfg) {
    const double h = bandwidth_at(cfg.bandwidth, static_cast<long>(residuals.size()));
    const WeightFn weight = WeightFn::truncated_reciprocal(cfg.f0, cfg.delta);

    TestReport report;
    report.br.kind = BrReport::StatKind::t_tilde;
    report.br.n = static_cast<long>(residuals.size());
    report.br.h = h;
    report.br.mu = centering_mu_simplified(cfg.delta, cfg.kernel);
    report.br.tau2 = variance_tau2_simplified(cfg.delta, cfg.kernel);
    report.br.value = t_tilde(residuals, cfg.kernel, h, cfg.f0, weight);
    report.br.z = standardize(report.br.value, report.br.mu, report.br.tau2, h);

    report.p_value = 1.0 - normal_cdf(report.br.z);
    report.reject = report.br.z > normal_quantile(1.0 - cfg.alpha);
    if (cfg.with_ks_baseline) report.baseline_ks = ks_test(residuals, cfg.f0);
    return report;
}

struct WienerQuantiles {
    double q90 = 0.0;
    double q95 = 0.0;
    double q99 = 0.0;
};

namespace detail {

// Z = (((W(1)^2 - 1)/2) / int W^2 . int W)^2 for one Wiener path simulated
// as scaled random-walk partial sums; integrals by the trapezoidal rule.
inline double wiener_functional(long steps, Rng& rng) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(steps));
    double w = 0.0;
    double int_w = 0.0, int_w2 = 0.0;
    double prev = 0.0, prev2 = 0.0;
    for (long k = 1; k <= steps; ++k) {
        const double u1 = rng.uniform_pos();
        const double u2 = rng.uniform();
        const double gauss =
            std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
        w += scale * gauss;
        const double w2 = w * w;
        int_w += 0.5 * (prev + w);
        int_w2 += 0.5 * (prev2 + w2);
        prev = w;
        prev2 = w2;
    }
    int_w /= static_cast<double>(steps);
    int_w2 /= static_cast<double>(steps);
    const double ratio = 0.5 * (w * w - 1.0) / int_w2;
    const double z = ratio * int_w;
    return z * z;
}

inline double sorted_quantile(const std::vector<double>& sorted, double level) {
    const double pos = level * (static_cast<double>(sorted.size()) - 1.0);
    const auto idx = static_cast<std::size_t>(pos);
    if (idx + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(idx);
    return sorted[idx] * (1.0 - frac) + sorted[idx + 1] * frac;
}

}  // namespace detail

inline WienerQuantiles wiener_functional_quantiles(long reps, long steps,
                                                   std::uint64_t seed,
                                                   int jobs = 1) {
    if (reps < 10000)
        throw std::invalid_argument("wiener_functional_quantiles: reps must be >= 1e4");
    if (steps < 1000)
        throw std::invalid_argument("wiener_functional_quantiles: steps must be >= 1e3");
    std::vector<double> values(static_cast<std::size_t>(reps));
    parallel_for(jobs, reps, [&](long path) {
        Rng rng(derive_stream(seed, static_cast<std::uint64_t>(path)));
        values[static_cast<std::size_t>(path)] = detail::wiener_functional(steps, rng);
    });
    std::sort(values.begin(), values.end());
    WienerQuantiles q;
    q.q90 = detail::sorted_quantile(values, 0.90);
    q.q95 = detail::sorted_quantile(values, 0.95);
    q.q99 = detail::sorted_quantile(values, 0.99);
    return q;
}

// Random-walk variant of the standardized statistic,
//   h (T_tilde^0 - mu) / (sigma_0 sqrt(F_0) int K'),
// meaningful only for kernels with a nonzero derivative integral. sigma_0^2
// is the f0 variance about its mean and F_0 the f0 mass on [-delta, delta].
inline double rw_variant_statistic(double t_tilde0, double mu, double h,
                                   const NoiseSpec& f0, double delta,
                                   const Kernel& kernel) {
    const double k_prime = kernel.derivative_integral();
    if (k_prime == 0.0)
        throw std::invalid_argument(
            "rw_variant_statistic: kernel has int K' = 0, inapplicable");
    if (!f0.finite_variance())
        throw std::invalid_argument(
            "rw_variant_statistic: f0 must have a finite second moment");
    if (!(delta > 0.0))
        throw std::invalid_argument("rw_variant_statistic: delta must be > 0");
    const double sigma0 = std::sqrt(f0.variance());
    const double mass = f0.cdf(delta) - f0.cdf(-delta);
    return h * (t_tilde0 - mu) / (sigma0 * std::sqrt(mass) * k_prime);
}

}  // namespace brar
