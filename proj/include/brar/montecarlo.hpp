#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "brar/ar.hpp"
#include "brar/estimation.hpp"
#include "brar/gof.hpp"
#include "brar/parallel.hpp"

// Replicated experiments: empirical level and power of the test, bandwidth
// calibration, growth-rate checks for the process functionals and the
// asymmetric-kernel experiment. Every replication draws from a stream
// derived from (master seed, replication index, retry index), so reports
// are identical for any degree of parallelism. Overflowing explosive
// trajectories and singular fits are retried with fresh streams up to the
// configured limit, and the retries are part of the report.

namespace brar {

struct RetryLimitExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct McConfig {
    ArModel model;
    NoiseSpec noise;  // data-generating distribution
    TestConfig test;
    long n = 100;
    long reps = 1000;
    std::uint64_t seed = 0;
    int retry_limit = 8;
    int jobs = 1;

    McConfig(ArModel model_, NoiseSpec noise_, TestConfig test_, long n_, long reps_,
             std::uint64_t seed_)
        : model(std::move(model_)),
          noise(std::move(noise_)),
          test(std::move(test_)),
          n(n_),
          reps(reps_),
          seed(seed_) {
        if (reps < 1) throw std::invalid_argument("McConfig: reps must be >= 1");
        if (n < 1) throw std::invalid_argument("McConfig: n must be >= 1");
    }
};

struct McReport {
    double rejection_rate = 0.0;
    double mc_stderr = 0.0;
    long reps_used = 0;
    long retries = 0;
    std::vector<double> z_values;
    double runtime_seconds = 0.0;
    std::optional<double> ks_rejection_rate;
};

namespace detail {

struct RepOutcome {
    double z = 0.0;
    bool reject = false;
    int retries = 0;
    bool ks_reject = false;
};

inline RepOutcome run_one_rep(const ArModel& model, const NoiseSpec& noise,
                              const TestConfig& test, long n, std::uint64_t seed,
                              long rep, int retry_limit) {
    for (int attempt = 0; attempt <= retry_limit; ++attempt) {
        Rng rng(derive_stream(seed, static_cast<std::uint64_t>(rep),
                              static_cast<std::uint64_t>(attempt)));
        try {
            std::vector<double> phi0(static_cast<std::size_t>(model.p), 0.0);
            const TimeSeries ts =
                simulate(model, noise, static_cast<int>(n), phi0, rng);
            std::vector<double> eps;
            if (model.p == 0) {
                eps = residuals(ts, {});
            } else {
                const OlsFit fit = ols_estimate(ts, model.p);
                eps = residuals(ts, fit.theta_hat);
            }
            const TestReport report = br_gof_test(eps, test);
            RepOutcome out;
            out.z = report.br.z;
            out.reject = report.reject;
            out.retries = attempt;
            if (report.baseline_ks)
                out.ks_reject = report.baseline_ks->p_value < test.alpha;
            return out;
        } catch (const SimulationOverflow&) {
        } catch (const SingularFit&) {
        }
    }
    throw RetryLimitExhausted("replication " + std::to_string(rep) +
                              " exhausted its " + std::to_string(retry_limit) +
                              " retries");
}

}  // namespace detail

inline McReport run_replications(const McConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    const auto count = static_cast<std::size_t>(cfg.reps);
    std::vector<detail::RepOutcome> outcomes(count);
    parallel_for(cfg.jobs, cfg.reps, [&](long rep) {
        outcomes[static_cast<std::size_t>(rep)] = detail::run_one_rep(
            cfg.model, cfg.noise, cfg.test, cfg.n, cfg.seed, rep, cfg.retry_limit);
    });

    McReport report;
    report.reps_used = cfg.reps;
    report.z_values.reserve(count);
    long rejections = 0, ks_rejections = 0, retries = 0;
    for (const auto& o : outcomes) {
        report.z_values.push_back(o.z);
        rejections += o.reject ? 1 : 0;
        ks_rejections += o.ks_reject ? 1 : 0;
        retries += o.retries;
    }
    const double r = static_cast<double>(rejections) / static_cast<double>(cfg.reps);
    report.rejection_rate = r;
    report.mc_stderr = std::sqrt(r * (1.0 - r) / static_cast<double>(cfg.reps));
    report.retries = retries;
    if (cfg.test.with_ks_baseline)
        report.ks_rejection_rate =
            static_cast<double>(ks_rejections) / static_cast<double>(cfg.reps);
    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return report;
}

inline McReport empirical_level(const McConfig& cfg) {
    if (!(cfg.noise == cfg.test.f0))
        throw std::invalid_argument(
            "empirical_level: data noise must equal f0 under H0");
    return run_replications(cfg);
}

inline McReport empirical_power(McConfig cfg, const NoiseSpec& alternative) {
    cfg.noise = alternative;
    return run_replications(cfg);
}

struct CalibrationResult {
    double h0 = 0.0;
    double achieved_level = 0.0;
};

// Grid search for the h0 whose empirical level on the neutral model is
// closest to the target; one refinement pass around the coarse winner.
// The achieved level must come within band (default 0.005) of the target.
inline CalibrationResult calibrate_h0(double target_alpha, const Kernel& kernel,
                                      long n, double lo, double hi, double kappa,
                                      double delta, long reps, std::uint64_t seed,
                                      int jobs = 1, double band = 0.005) {
    if (!(lo > 0.0) || !(hi >= lo))
        throw std::invalid_argument("calibrate_h0: search range must be positive");

    const NoiseSpec f0 = NoiseSpec::normal(0.0, 1.0);
    auto level_at = [&](double h0) {
        TestConfig test(delta, target_alpha, kernel, Bandwidth(h0, kappa), f0);
        McConfig cfg(ArModel{}, f0, test, n, reps, seed);
        cfg.jobs = jobs;
        return empirical_level(cfg).rejection_rate;
    };

    if (lo == hi) return {lo, level_at(lo)};

    CalibrationResult best{lo, 2.0};
    auto scan = [&](double a, double b, int points) {
        for (int i = 0; i < points; ++i) {
            const double h0 =
                a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1);
            const double level = level_at(h0);
            if (std::fabs(level - target_alpha) <
                std::fabs(best.achieved_level - target_alpha)) {
                best = {h0, level};
            }
        }
    };
    scan(lo, hi, 9);
    const double step = (hi - lo) / 8.0;
    scan(std::max(lo, best.h0 - step), std::min(hi, best.h0 + step), 7);

    if (std::fabs(best.achieved_level - target_alpha) > band)
        throw std::runtime_error("calibrate_h0: no h0 in range reaches the target band");
    return best;
}

// ---------------------------------------------------------------------------
// Empirical growth-rate checks.

struct RateReport {
    std::string quantity;
    std::string model_label;
    std::vector<long> n_grid;
    std::vector<double> medians;
    double slope = 0.0;
    double theoretical = 0.0;
    double tolerance = 0.15;
    bool pass = false;
};

namespace detail {

inline double median_of(std::vector<double> values) {
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    double m = values[mid];
    if (values.size() % 2 == 0) {
        const double below =
            *std::max_element(values.begin(), values.begin() + mid);
        m = 0.5 * (m + below);
    }
    return m;
}

inline double loglog_slope(std::span<const long> n_grid,
                           std::span<const double> medians) {
    const std::size_t m = n_grid.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double x = std::log(static_cast<double>(n_grid[i]));
        const double y = std::log(std::max(medians[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double dm = static_cast<double>(m);
    return (dm * sxy - sx * sy) / (dm * sxx - sx * sx);
}

}  // namespace detail

// Catalogue of rate-checked quantities. Except for ols-error they all use
// standard normal innovations and X_0 = 0, so the partial-sum exponent from
// the invariance principle is 1/2.
inline const std::vector<std::string>& rate_quantities() {
    static const std::vector<std::string> ids = {
        "sum-xt-pos-unit",  "sum-xt-neg-unit", "sum-xt2-unit",
        "max-xt-unit",      "sum-xt-seasonal", "sum-xt-cosine",
        "sum-xt-double-root", "sum-xt-twostep", "ols-error"};
    return ids;
}

inline RateReport rate_check(const std::string& quantity, const ArModel& ols_model,
                             std::span<const long> n_grid, long reps,
                             std::uint64_t seed, int jobs = 1,
                             double tolerance = 0.15) {
    if (n_grid.size() < 3)
        throw std::invalid_argument("rate_check: n grid needs at least 3 points");
    if (reps < 1) throw std::invalid_argument("rate_check: reps must be >= 1");

    ArModel model;
    double theory = 0.0;
    bool super_polynomial = false;
    enum class Magnitude { sum, sum_sq, max_abs, ols } magnitude = Magnitude::sum;

    if (quantity == "sum-xt-pos-unit") {
        model = ArModel({1.0});
        theory = 1.5;
    } else if (quantity == "sum-xt-neg-unit") {
        model = ArModel({-1.0});
        theory = 0.5;
    } else if (quantity == "sum-xt2-unit") {
        model = ArModel({1.0});
        theory = 2.0;
        magnitude = Magnitude::sum_sq;
    } else if (quantity == "max-xt-unit") {
        model = ArModel({1.0});
        theory = 0.5;
        magnitude = Magnitude::max_abs;
    } else if (quantity == "sum-xt-seasonal") {
        model = ArModel({0.0, 0.0, 0.0, 1.0});
        theory = 1.5;
    } else if (quantity == "sum-xt-cosine") {
        model = ArModel({1.0, -1.0});  // roots exp(+-i pi/3)
        theory = 0.5;
    } else if (quantity == "sum-xt-double-root") {
        model = ArModel({2.0, -1.0});
        theory = 2.5;
    } else if (quantity == "sum-xt-twostep") {
        model = ArModel({0.0, 1.0});
        theory = 1.5;
    } else if (quantity == "ols-error") {
        model = ols_model;
        magnitude = Magnitude::ols;
        switch (classify(model)) {
            case Regime::stable:
                theory = -0.5;
                break;
            case Regime::purely_unstable:
            case Regime::seasonal_unstable:
                theory = -1.0;
                break;
            case Regime::purely_explosive:
                // super-polynomial decay; pass when steeper than every
                // polynomial regime
                theory = -2.0;
                super_polynomial = true;
                break;
            default:
                throw std::invalid_argument(
                    "rate_check: ols-error needs a stable, unstable or explosive model");
        }
    } else {
        throw std::invalid_argument("rate_check: unknown quantity '" + quantity + "'");
    }

    const NoiseSpec noise = NoiseSpec::normal(0.0, 1.0);
    RateReport report;
    report.quantity = quantity;
    report.model_label = regime_name(classify(model, 1e-8));
    report.n_grid.assign(n_grid.begin(), n_grid.end());
    report.medians.resize(n_grid.size());
    report.theoretical = theory;
    report.tolerance = tolerance;

    for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
        const long n = n_grid[gi];
        std::vector<double> magnitudes(static_cast<std::size_t>(reps));
        const std::uint64_t grid_seed =
            derive_stream(seed, static_cast<std::uint64_t>(gi) + 1000);
        parallel_for(jobs, reps, [&](long rep) {
            Rng rng(derive_stream(grid_seed, static_cast<std::uint64_t>(rep)));
            std::vector<double> phi0(static_cast<std::size_t>(model.p), 0.0);
            const TimeSeries ts =
                simulate(model, noise, static_cast<int>(n), phi0, rng);
            double value = 0.0;
            switch (magnitude) {
                case Magnitude::sum: {
                    double acc = 0.0;
                    for (int t = 1; t <= ts.n; ++t) acc += ts.at(t);
                    value = std::fabs(acc);
                    break;
                }
                case Magnitude::sum_sq: {
                    double acc = 0.0;
                    for (int t = 1; t <= ts.n; ++t) acc += ts.at(t) * ts.at(t);
                    value = acc;
                    break;
                }
                case Magnitude::max_abs: {
                    double acc = 0.0;
                    for (int t = 1; t <= ts.n; ++t)
                        acc = std::max(acc, std::fabs(ts.at(t)));
                    value = acc;
                    break;
                }
                case Magnitude::ols: {
                    const OlsFit fit = ols_estimate(ts, model.p);
                    double acc = 0.0;
                    for (int j = 0; j < model.p; ++j) {
                        const double d = fit.theta_hat[j] - model.theta[j];
                        acc += d * d;
                    }
                    value = std::sqrt(acc);
                    break;
                }
            }
            magnitudes[static_cast<std::size_t>(rep)] = value;
        });
        report.medians[gi] = detail::median_of(std::move(magnitudes));
    }

    report.slope = detail::loglog_slope(report.n_grid, report.medians);
    report.pass = super_polynomial
                      ? report.slope <= theory
                      : std::fabs(report.slope - theory) <= tolerance;
    return report;
}

inline RateReport rate_check(const std::string& quantity,
                             std::span<const long> n_grid, long reps,
                             std::uint64_t seed, int jobs = 1) {
    return rate_check(quantity, preset_model("m1"), n_grid, reps, seed, jobs);
}

// ---------------------------------------------------------------------------
// Asymmetric-kernel experiment on the positive-unit-root model.

struct AsymKernelReport {
    std::string kernel_label;
    std::string normalization;  // "h" or "sqrt-h"
    std::vector<long> n_grid;
    std::vector<double> medians;
    std::vector<double> ratios;  // median[i+1] / median[i]
    double q95_largest_n = 0.0;
};

// For each n: h_n (T_hat - mu) under the one-sided exponential kernel
// (int K' != 0), or (T_hat - mu)/sqrt(h_n) under a kernel with int K' = 0.
// Medians should stay of the same order across n doublings.
inline AsymKernelReport asym_kernel_experiment(const Kernel& kernel,
                                               const Bandwidth& bandwidth,
                                               std::span<const long> n_grid,
                                               long reps, std::uint64_t seed,
                                               int jobs = 1) {
    const ArModel model = preset_model("m4");
    const NoiseSpec f0 = NoiseSpec::normal(0.0, 1.0);
    const double delta = 2.0;
    const WeightFn weight = WeightFn::truncated_reciprocal(f0, delta);
    const double mu = centering_mu_simplified(delta, kernel);
    const bool asymmetric = kernel.derivative_integral() != 0.0;

    AsymKernelReport report;
    report.kernel_label = kernel.label();
    report.normalization = asymmetric ? "h" : "sqrt-h";
    report.n_grid.assign(n_grid.begin(), n_grid.end());

    std::vector<double> largest_values;
    for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
        const long n = n_grid[gi];
        const double h = bandwidth_at(bandwidth, n);
        std::vector<double> values(static_cast<std::size_t>(reps));
        const std::uint64_t grid_seed =
            derive_stream(seed, static_cast<std::uint64_t>(gi) + 2000);
        parallel_for(jobs, reps, [&](long rep) {
            Rng rng(derive_stream(grid_seed, static_cast<std::uint64_t>(rep)));
            std::vector<double> phi0(1, 0.0);
            const TimeSeries ts = simulate(model, f0, static_cast<int>(n), phi0, rng);
            const OlsFit fit = ols_estimate(ts, model.p);
            const std::vector<double> eps = residuals(ts, fit.theta_hat);
            const double stat = t_hat(eps, kernel, h, f0, weight);
            values[static_cast<std::size_t>(rep)] =
                asymmetric ? h * (stat - mu) : (stat - mu) / std::sqrt(h);
        });
        if (gi + 1 == n_grid.size()) largest_values = values;
        report.medians.push_back(detail::median_of(std::move(values)));
    }
    for (std::size_t i = 0; i + 1 < report.medians.size(); ++i)
        report.ratios.push_back(report.medians[i + 1] / report.medians[i]);

    std::sort(largest_values.begin(), largest_values.end());
    report.q95_largest_n = detail::sorted_quantile(largest_values, 0.95);
    return report;
}

}  // namespace brar
