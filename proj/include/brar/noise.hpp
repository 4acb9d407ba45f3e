#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "brar/math.hpp"
#include "brar/rng.hpp"

// Catalogue of noise / alternative distributions: density, CDF, sampler and
// second-order moments for the normal, Student, uniform, Laplace and Cauchy
// families. A degenerate point mass at zero is provided for tests that need
// noiseless recursions; it is not a density and is rejected everywhere else.

namespace brar {

enum class NoiseFamily { normal, student, uniform, laplace, cauchy, degenerate };

class NoiseSpec {
 public:
    static NoiseSpec normal(double mean, double variance) {
        if (!(variance > 0.0))
            throw std::invalid_argument("normal noise: variance must be > 0");
        return NoiseSpec(NoiseFamily::normal, mean, variance);
    }
    static NoiseSpec student(double nu) {
        if (!(nu > 0.0))
            throw std::invalid_argument("student noise: nu must be > 0");
        return NoiseSpec(NoiseFamily::student, nu, 0.0);
    }
    static NoiseSpec uniform(double half_width) {
        if (!(half_width > 0.0))
            throw std::invalid_argument("uniform noise: half-width must be > 0");
        return NoiseSpec(NoiseFamily::uniform, half_width, 0.0);
    }
    static NoiseSpec laplace(double scale) {
        if (!(scale > 0.0))
            throw std::invalid_argument("laplace noise: scale must be > 0");
        return NoiseSpec(NoiseFamily::laplace, scale, 0.0);
    }
    static NoiseSpec cauchy(double scale) {
        if (!(scale > 0.0))
            throw std::invalid_argument("cauchy noise: scale must be > 0");
        return NoiseSpec(NoiseFamily::cauchy, scale, 0.0);
    }
    // Point mass at zero, for noiseless test recursions only.
    static NoiseSpec degenerate() {
        return NoiseSpec(NoiseFamily::degenerate, 0.0, 0.0);
    }

    NoiseFamily family() const { return family_; }

    double density(double x) const {
        switch (family_) {
            case NoiseFamily::normal:
                return normal_pdf(x, a_, b_);
            case NoiseFamily::student: {
                const double nu = a_;
                const double ln = log_gamma(0.5 * (nu + 1.0)) - log_gamma(0.5 * nu) -
                                  0.5 * std::log(nu * pi) -
                                  0.5 * (nu + 1.0) * std::log1p(x * x / nu);
                return std::exp(ln);
            }
            case NoiseFamily::uniform:
                return (std::fabs(x) <= a_) ? 0.5 / a_ : 0.0;
            case NoiseFamily::laplace:
                return 0.5 / a_ * std::exp(-std::fabs(x) / a_);
            case NoiseFamily::cauchy:
                return a_ / (pi * (a_ * a_ + x * x));
            case NoiseFamily::degenerate:
                throw std::invalid_argument("degenerate noise has no density");
        }
        return 0.0;
    }

    double cdf(double x) const {
        switch (family_) {
            case NoiseFamily::normal:
                return normal_cdf(x, a_, b_);
            case NoiseFamily::student: {
                const double nu = a_;
                if (x == 0.0) return 0.5;
                const double ib = incomplete_beta(0.5 * nu, 0.5, nu / (nu + x * x));
                return (x > 0.0) ? 1.0 - 0.5 * ib : 0.5 * ib;
            }
            case NoiseFamily::uniform:
                if (x <= -a_) return 0.0;
                if (x >= a_) return 1.0;
                return 0.5 * (x / a_ + 1.0);
            case NoiseFamily::laplace:
                return (x < 0.0) ? 0.5 * std::exp(x / a_)
                                 : 1.0 - 0.5 * std::exp(-x / a_);
            case NoiseFamily::cauchy:
                return 0.5 + std::atan(x / a_) / pi;
            case NoiseFamily::degenerate:
                throw std::invalid_argument("degenerate noise has no cdf");
        }
        return 0.0;
    }

    double sample(Rng& rng) const {
        switch (family_) {
            case NoiseFamily::normal:
                return a_ + std::sqrt(b_) * sample_standard_normal(rng);
            case NoiseFamily::student: {
                const double z = sample_standard_normal(rng);
                const double chi2 = 2.0 * sample_gamma(rng, 0.5 * a_);
                return z * std::sqrt(a_ / chi2);
            }
            case NoiseFamily::uniform:
                return a_ * (2.0 * rng.uniform() - 1.0);
            case NoiseFamily::laplace: {
                const double u = rng.uniform_pos();
                return (u < 0.5) ? a_ * std::log(2.0 * u)
                                 : -a_ * std::log(2.0 * (1.0 - u));
            }
            case NoiseFamily::cauchy:
                return a_ * std::tan(pi * (rng.uniform() - 0.5));
            case NoiseFamily::degenerate:
                return 0.0;
        }
        return 0.0;
    }

    double mean() const {
        switch (family_) {
            case NoiseFamily::normal:
                return a_;
            case NoiseFamily::student:
                return (a_ > 1.0) ? 0.0
                                  : std::numeric_limits<double>::quiet_NaN();
            case NoiseFamily::cauchy:
                return std::numeric_limits<double>::quiet_NaN();
            default:
                return 0.0;
        }
    }

    double variance() const {
        switch (family_) {
            case NoiseFamily::normal:
                return b_;
            case NoiseFamily::student:
                return (a_ > 2.0) ? a_ / (a_ - 2.0)
                                  : std::numeric_limits<double>::infinity();
            case NoiseFamily::uniform:
                return a_ * a_ / 3.0;
            case NoiseFamily::laplace:
                return 2.0 * a_ * a_;
            case NoiseFamily::cauchy:
                return std::numeric_limits<double>::infinity();
            case NoiseFamily::degenerate:
                return 0.0;
        }
        return 0.0;
    }

    bool finite_variance() const { return std::isfinite(variance()); }

    // Whether the density is bounded away from zero on [lo, hi].
    bool positive_on(double lo, double hi) const {
        if (family_ == NoiseFamily::uniform) return lo >= -a_ && hi <= a_;
        if (family_ == NoiseFamily::degenerate) return false;
        return true;
    }

    std::string label() const {
        std::ostringstream out;
        out.precision(17);
        switch (family_) {
            case NoiseFamily::normal:
                out << "normal:" << a_ << "," << b_;
                break;
            case NoiseFamily::student:
                out << "student:" << a_;
                break;
            case NoiseFamily::uniform:
                out << "uniform:" << a_;
                break;
            case NoiseFamily::laplace:
                out << "laplace:" << a_;
                break;
            case NoiseFamily::cauchy:
                out << "cauchy:" << a_;
                break;
            case NoiseFamily::degenerate:
                out << "degenerate";
                break;
        }
        return out.str();
    }

    // Accepts the label() format, e.g. "normal:0,1", "student:5", "laplace:1".
    static NoiseSpec parse(const std::string& text) {
        const auto colon = text.find(':');
        const std::string name = text.substr(0, colon);
        std::string args = (colon == std::string::npos) ? "" : text.substr(colon + 1);
        for (auto& ch : args)
            if (ch == ',') ch = ' ';
        std::istringstream in(args);
        double x = 0.0, y = 0.0;
        if (name == "normal") {
            if (!(in >> x >> y))
                throw std::invalid_argument("noise spec: expected normal:mean,var");
            return normal(x, y);
        }
        if (!(in >> x) && name != "degenerate")
            throw std::invalid_argument("noise spec: missing parameter in '" + text + "'");
        if (name == "student") return student(x);
        if (name == "uniform") return uniform(x);
        if (name == "laplace") return laplace(x);
        if (name == "cauchy") return cauchy(x);
        if (name == "degenerate") return degenerate();
        throw std::invalid_argument("noise spec: unknown family '" + name + "'");
    }

    friend bool operator==(const NoiseSpec& l, const NoiseSpec& r) {
        return l.family_ == r.family_ && l.a_ == r.a_ && l.b_ == r.b_;
    }

 private:
    NoiseSpec(NoiseFamily family, double a, double b)
        : family_(family), a_(a), b_(b) {}

    static double sample_standard_normal(Rng& rng) {
        const double u1 = rng.uniform_pos();
        const double u2 = rng.uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    // Marsaglia-Tsang; shape boost for alpha < 1.
    static double sample_gamma(Rng& rng, double alpha) {
        if (alpha < 1.0) {
            const double u = rng.uniform_pos();
            return sample_gamma(rng, alpha + 1.0) * std::pow(u, 1.0 / alpha);
        }
        const double d = alpha - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = sample_standard_normal(rng);
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = rng.uniform_pos();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    NoiseFamily family_;
    double a_;
    double b_;
};

}  // namespace brar
