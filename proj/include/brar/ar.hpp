#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "brar/noise.hpp"
#include "brar/rng.hpp"

// AR(p) models: X_t = theta_1 X_{t-1} + ... + theta_p X_{t-p} + eps_t.
// The regime is read off the companion-matrix eigenvalue moduli; the zeros
// of the characteristic polynomial 1 - theta_1 z - ... - theta_p z^p are the
// reciprocals of those eigenvalues and are computed by an independent
// root-finding route so the identity can be cross-checked.

namespace brar {

enum class Regime {
    neutral,           // p = 0
    stable,            // all eigenvalue moduli < 1
    purely_unstable,   // all moduli = 1
    seasonal_unstable, // moduli = 1 with theta = (0, ..., 0, 1)
    purely_explosive,  // all moduli > 1
    mixed
};

inline std::string regime_name(Regime r) {
    switch (r) {
        case Regime::neutral: return "neutral";
        case Regime::stable: return "stable";
        case Regime::purely_unstable: return "purely-unstable";
        case Regime::seasonal_unstable: return "seasonal-unstable";
        case Regime::purely_explosive: return "purely-explosive";
        case Regime::mixed: return "mixed";
    }
    return "?";
}

struct ArModel {
    int p = 0;
    std::vector<double> theta;

    ArModel() = default;
    explicit ArModel(std::vector<double> coefficients)
        : p(static_cast<int>(coefficients.size())), theta(std::move(coefficients)) {
        for (double c : theta)
            if (!std::isfinite(c))
                throw std::invalid_argument("ArModel: coefficients must be finite");
        if (p > 0 && theta.back() == 0.0)
            throw std::invalid_argument("ArModel: theta_p must be nonzero");
    }
};

inline Eigen::MatrixXd companion_matrix(const ArModel& model) {
    if (model.p < 1)
        throw std::invalid_argument("no companion matrix for neutral model");
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(model.p, model.p);
    for (int j = 0; j < model.p; ++j) c(0, j) = model.theta[j];
    for (int i = 1; i < model.p; ++i) c(i, i - 1) = 1.0;
    return c;
}

inline std::vector<double> companion_eigen_moduli(const ArModel& model) {
    const Eigen::MatrixXd c = companion_matrix(model);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(c, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("companion eigenvalue solver failed for p=" +
                                 std::to_string(model.p));
    std::vector<double> moduli(model.p);
    for (int i = 0; i < model.p; ++i) moduli[i] = std::abs(solver.eigenvalues()[i]);
    std::sort(moduli.begin(), moduli.end(), std::greater<double>());
    return moduli;
}

inline Regime classify(const ArModel& model, double tol = 1e-8) {
    if (!(tol > 0.0)) throw std::invalid_argument("classify: tol must be > 0");
    if (model.p == 0) return Regime::neutral;
    const std::vector<double> moduli = companion_eigen_moduli(model);
    const double largest = moduli.front();
    const double smallest = moduli.back();

    const bool all_unit = largest <= 1.0 + tol && smallest >= 1.0 - tol;
    if (all_unit) {
        bool seasonal = model.p >= 2 && model.theta.back() == 1.0;
        for (int j = 0; seasonal && j + 1 < model.p; ++j)
            if (model.theta[j] != 0.0) seasonal = false;
        return seasonal ? Regime::seasonal_unstable : Regime::purely_unstable;
    }
    if (largest < 1.0 - tol) return Regime::stable;
    if (smallest > 1.0 + tol) return Regime::purely_explosive;
    return Regime::mixed;
}

// Zeros of Theta(z) = 1 - theta_1 z - ... - theta_p z^p by Durand-Kerner
// iteration. Kept independent of the eigenvalue route on purpose.
inline std::vector<std::complex<double>> char_poly_roots(const ArModel& model) {
    if (model.p < 1)
        throw std::invalid_argument("char_poly_roots: requires p >= 1");
    if (model.theta.back() == 0.0)
        throw std::invalid_argument("char_poly_roots: degree-deficient, theta_p = 0");

    const int degree = model.p;
    using complexd = std::complex<double>;
    // Monic coefficients of Theta(z) / (-theta_p).
    std::vector<complexd> monic(degree + 1);
    monic[degree] = 1.0;
    monic[0] = -1.0 / model.theta[degree - 1];
    for (int j = 1; j < degree; ++j)
        monic[j] = model.theta[j - 1] / model.theta[degree - 1];

    auto eval = [&](complexd z) {
        complexd acc = monic[degree];
        for (int j = degree - 1; j >= 0; --j) acc = acc * z + monic[j];
        return acc;
    };

    std::vector<complexd> roots(degree);
    const complexd start(0.4, 0.9);
    complexd power = start;
    for (int i = 0; i < degree; ++i) {
        roots[i] = power;
        power *= start;
    }
    for (int iter = 0; iter < 500; ++iter) {
        double shift = 0.0;
        for (int i = 0; i < degree; ++i) {
            complexd denom = 1.0;
            for (int j = 0; j < degree; ++j)
                if (j != i) denom *= roots[i] - roots[j];
            const complexd delta = eval(roots[i]) / denom;
            roots[i] -= delta;
            shift = std::max(shift, std::abs(delta));
        }
        if (shift < 1e-14) break;
    }
    std::sort(roots.begin(), roots.end(), [](complexd a, complexd b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return roots;
}

struct TimeSeries {
    std::vector<double> values;  // X_{-p+1}, ..., X_0, X_1, ..., X_n
    int p = 0;
    int n = 0;

    // t in [-p+1, n].
    double at(int t) const { return values[static_cast<std::size_t>(t + p - 1)]; }
};

struct SimulationOverflow : std::runtime_error {
    int index;
    explicit SimulationOverflow(int t)
        : std::runtime_error("simulation overflow at t=" + std::to_string(t)),
          index(t) {}
};

inline constexpr double simulation_overflow_guard = 1e300;

inline TimeSeries simulate(const ArModel& model, const NoiseSpec& noise, int n,
                           std::span<const double> phi0, Rng& rng) {
    if (n < 1) throw std::invalid_argument("simulate: n must be >= 1");
    if (static_cast<int>(phi0.size()) != model.p)
        throw std::invalid_argument("simulate: phi0 must have p entries");
    for (double v : phi0)
        if (!std::isfinite(v))
            throw std::invalid_argument("simulate: phi0 must be finite");
    if (model.p > 0 && !noise.finite_variance() &&
        noise.family() != NoiseFamily::degenerate)
        throw std::invalid_argument(
            "simulate: infinite-variance noise is only supported for p = 0");

    TimeSeries ts;
    ts.p = model.p;
    ts.n = n;
    ts.values.resize(static_cast<std::size_t>(model.p + n));
    // phi0 = (X_0, X_{-1}, ..., X_{-p+1})
    for (int i = 0; i < model.p; ++i) ts.values[model.p - 1 - i] = phi0[i];

    for (int t = 1; t <= n; ++t) {
        double x = noise.sample(rng);
        for (int j = 0; j < model.p; ++j) x += model.theta[j] * ts.at(t - 1 - j);
        if (!(std::fabs(x) <= simulation_overflow_guard))
            throw SimulationOverflow(t);
        ts.values[static_cast<std::size_t>(model.p + t - 1)] = x;
    }
    return ts;
}

inline TimeSeries simulate(const ArModel& model, const NoiseSpec& noise, int n,
                           std::span<const double> phi0, std::uint64_t seed) {
    Rng rng(seed);
    return simulate(model, noise, n, phi0, rng);
}

inline TimeSeries simulate(const ArModel& model, const NoiseSpec& noise, int n,
                           std::uint64_t seed) {
    std::vector<double> phi0(static_cast<std::size_t>(model.p), 0.0);
    return simulate(model, noise, n, phi0, seed);
}

// Built-in model aliases m0..m5 exposed by the CLI.
inline ArModel preset_model(std::string_view id) {
    if (id == "m0") return ArModel{};
    if (id == "m1") return ArModel({-1.0 / 12.0, 5.0 / 24.0, 1.0 / 24.0});
    if (id == "m2") return ArModel({0.99});
    if (id == "m3") return ArModel({-1.0});
    if (id == "m4") return ArModel({1.0});
    if (id == "m5") return ArModel({0.0, 1.21});
    throw std::invalid_argument("unknown model alias '" + std::string(id) + "'");
}

}  // namespace brar
