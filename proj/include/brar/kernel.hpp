#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "brar/math.hpp"
#include "brar/quadrature.hpp"

// Smoothing kernels together with the analytic functionals the test
// statistics need: the L2 norm, the squared L2 norm of the autoconvolution,
// the integral of the derivative and the first moment. Functionals are fixed
// at construction so the Monte Carlo inner loops never integrate.
//
// Catalogue:
//   gaussian              N(0,1) density; the workhorse.
//   smoothed_uniform      1/2 on [-1+e, 1-e], quintic taper to 0 at +-1,
//                         rescaled to unit mass; C^2 and compactly supported.
//   exponential_one_sided exp(-u) on [0, inf); intentionally asymmetric with
//                         a nonzero derivative integral (-1).

namespace brar {

enum class KernelKind { gaussian, smoothed_uniform, exponential_one_sided };

class Kernel {
 public:
    static Kernel gaussian() {
        Kernel k(KernelKind::gaussian, 0.0);
        k.l2_ = 0.5 / std::sqrt(pi);
        k.autoconv_l2_ = 0.5 / std::sqrt(two_pi);
        k.deriv_integral_ = 0.0;
        k.first_moment_ = 0.0;
        return k;
    }

    static Kernel smoothed_uniform(double eps_s = 0.05) {
        if (!(eps_s > 0.0 && eps_s < 0.5))
            throw std::invalid_argument("smoothed_uniform: eps_s must be in (0, 1/2)");
        Kernel k(KernelKind::smoothed_uniform, eps_s);
        k.l2_ = integrate([&k](double u) { return k(u) * k(u); }, -1.0, 1.0, 1e-10);
        auto autoconv = [&k](double s) {
            const double lo = std::max(-1.0, -1.0 - s);
            const double hi = std::min(1.0, 1.0 - s);
            if (!(lo < hi)) return 0.0;
            return integrate([&k, s](double t) { return k(t) * k(t + s); }, lo, hi,
                             1e-10);
        };
        k.autoconv_l2_ = integrate(
            [&autoconv](double s) {
                const double v = autoconv(s);
                return v * v;
            },
            -2.0, 2.0, 1e-9);
        k.deriv_integral_ = 0.0;
        k.first_moment_ = 0.0;
        return k;
    }

    static Kernel exponential_one_sided() {
        Kernel k(KernelKind::exponential_one_sided, 0.0);
        k.l2_ = 0.5;
        k.autoconv_l2_ = 0.25;  // autoconvolution is the Laplace(1) density
        k.deriv_integral_ = -1.0;
        k.first_moment_ = 1.0;
        return k;
    }

    double operator()(double u) const {
        switch (kind_) {
            case KernelKind::gaussian:
                return inv_sqrt_2pi * std::exp(-0.5 * u * u);
            case KernelKind::smoothed_uniform: {
                const double a = std::fabs(u);
                if (a >= 1.0) return 0.0;
                const double plateau = 0.5 / (1.0 - 0.5 * eps_);
                if (a <= 1.0 - eps_) return plateau;
                const double s = (1.0 - a) / eps_;  // in (0,1)
                return plateau * s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
            }
            case KernelKind::exponential_one_sided:
                return (u >= 0.0) ? std::exp(-u) : 0.0;
        }
        return 0.0;
    }

    KernelKind kind() const { return kind_; }
    double eps_s() const { return eps_; }

    double l2_norm_sq() const { return l2_; }             // int K^2
    double autoconv_l2_sq() const { return autoconv_l2_; } // int (K*K)^2
    double derivative_integral() const { return deriv_integral_; }
    double first_moment() const { return first_moment_; }

    // Interval outside which K is below tail_tol relative to its peak.
    double support_lo(double tail_tol = 1e-16) const {
        switch (kind_) {
            case KernelKind::gaussian:
                return -std::sqrt(-2.0 * std::log(tail_tol));
            case KernelKind::smoothed_uniform:
                return -1.0;
            case KernelKind::exponential_one_sided:
                return 0.0;
        }
        return 0.0;
    }
    double support_hi(double tail_tol = 1e-16) const {
        switch (kind_) {
            case KernelKind::gaussian:
                return std::sqrt(-2.0 * std::log(tail_tol));
            case KernelKind::smoothed_uniform:
                return 1.0;
            case KernelKind::exponential_one_sided:
                return -std::log(tail_tol);
        }
        return 0.0;
    }

    std::string label() const {
        switch (kind_) {
            case KernelKind::gaussian: return "gaussian";
            case KernelKind::smoothed_uniform: return "uniform";
            case KernelKind::exponential_one_sided: return "exponential";
        }
        return "?";
    }

    static Kernel parse(const std::string& name) {
        if (name == "gaussian" || name == "normal") return gaussian();
        if (name == "uniform" || name == "smoothed-uniform") return smoothed_uniform();
        if (name == "exponential" || name == "exponential-one-sided")
            return exponential_one_sided();
        throw std::invalid_argument("unknown kernel '" + name + "'");
    }

 private:
    Kernel(KernelKind kind, double eps) : kind_(kind), eps_(eps) {}

    KernelKind kind_;
    double eps_;
    double l2_ = 0.0;
    double autoconv_l2_ = 0.0;
    double deriv_integral_ = 0.0;
    double first_moment_ = 0.0;
};

}  // namespace brar
