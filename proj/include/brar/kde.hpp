#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "brar/kernel.hpp"
#include "brar/quadrature.hpp"

// Bandwidth schedule and the Parzen-Rosenblatt estimator
//   fhat(x) = (n h)^-1 sum_t K((x - eps_t) / h).

namespace brar {

struct Bandwidth {
    double h0;
    double kappa;

    Bandwidth(double h0_, double kappa_) : h0(h0_), kappa(kappa_) {
        if (!(h0 > 0.0)) throw std::invalid_argument("Bandwidth: h0 must be > 0");
        if (!(kappa >= 0.0 && kappa < 1.0))
            throw std::invalid_argument("Bandwidth: kappa must lie in [0, 1)");
    }
};

inline double bandwidth_at(const Bandwidth& b, long n) {
    if (n < 1) throw std::invalid_argument("bandwidth_at: n must be >= 1");
    return b.h0 * std::pow(static_cast<double>(n), -b.kappa);
}

// Kernel-density evaluator over a fixed residual set. Residuals are sorted
// once so each query only touches the terms inside the kernel window; the
// canonical summation order also makes evaluations independent of the input
// permutation.
class DensityGrid {
 public:
    DensityGrid(std::span<const double> residuals, const Kernel& kernel, double h)
        : sorted_(residuals.begin(), residuals.end()), kernel_(kernel), h_(h) {
        if (!(h > 0.0)) throw std::invalid_argument("pr_density: h must be > 0");
        if (sorted_.empty())
            throw std::invalid_argument("pr_density: residual set is empty");
        std::sort(sorted_.begin(), sorted_.end());
        // K((x - eps)/h) is live for eps in [x - hi*h, x - lo*h].
        window_lo_ = kernel.support_lo(1e-16) * h;
        window_hi_ = kernel.support_hi(1e-16) * h;
    }

    double operator()(double x) const {
        const auto first = std::lower_bound(sorted_.begin(), sorted_.end(),
                                            x - window_hi_);
        const auto last =
            std::upper_bound(first, sorted_.end(), x - window_lo_);
        double acc = 0.0;
        for (auto it = first; it != last; ++it) acc += kernel_((x - *it) / h_);
        return acc / (static_cast<double>(sorted_.size()) * h_);
    }

    std::size_t size() const { return sorted_.size(); }

 private:
    std::vector<double> sorted_;
    Kernel kernel_;
    double h_;
    double window_lo_;
    double window_hi_;
};

inline double pr_density(std::span<const double> residuals, const Kernel& kernel,
                         double h, double x) {
    return DensityGrid(residuals, kernel, h)(x);
}

// The smoothed target K_h * f, evaluated as int K(v) f(x - h v) dv over the
// kernel support.
template <class Density>
class SmoothedTarget {
 public:
    SmoothedTarget(const Kernel& kernel, double h, Density f)
        : kernel_(kernel), h_(h), f_(std::move(f)) {
        if (!(h > 0.0)) throw std::invalid_argument("smoothed_target: h must be > 0");
        lo_ = kernel.support_lo(1e-16);
        hi_ = kernel.support_hi(1e-16);
    }

    double operator()(double x) const {
        return integrate(
            [this, x](double v) { return kernel_(v) * f_(x - h_ * v); }, lo_, hi_,
            1e-9, /*initial_panels=*/8);
    }

 private:
    Kernel kernel_;
    double h_;
    Density f_;
    double lo_, hi_;
};

template <class Density>
SmoothedTarget<std::decay_t<Density>> smoothed_target(const Kernel& kernel, double h,
                                                      Density&& f) {
    return SmoothedTarget<std::decay_t<Density>>(kernel, h,
                                                 std::forward<Density>(f));
}

}  // namespace brar
