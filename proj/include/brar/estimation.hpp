#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "brar/ar.hpp"

// Least-squares estimation of the AR coefficients and the residual process.
// The normal equations are never formed for the solve: explosive regressors
// reach ~1e40 in the Gram matrix and lose every significant digit there, so
// the fit goes through a rank-revealing QR of the regressor block.

namespace brar {

struct SingularFit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OlsFit {
    std::vector<double> theta_hat;
    Eigen::MatrixXd gram;  // sum of Phi_{t-1} Phi_{t-1}^T
    double condition_estimate = 0.0;
};

inline constexpr double condition_limit = 1e15;

inline OlsFit ols_estimate(const TimeSeries& series, int p) {
    if (p < 1) throw std::invalid_argument("ols_estimate: requires p >= 1");
    if (series.p != p)
        throw std::invalid_argument("ols_estimate: series was built with another p");
    if (series.n <= p)
        throw std::invalid_argument("ols_estimate: requires n > p");

    const int n = series.n;
    Eigen::MatrixXd regressors(n, p);
    Eigen::VectorXd response(n);
    for (int t = 1; t <= n; ++t) {
        for (int j = 0; j < p; ++j) regressors(t - 1, j) = series.at(t - 1 - j);
        response(t - 1) = series.at(t);
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(regressors);
    const auto& r_diag = qr.matrixR().diagonal();
    const double largest = std::fabs(r_diag(0));
    const double smallest = std::fabs(r_diag(p - 1));
    const double condition =
        (smallest > 0.0) ? largest / smallest : std::numeric_limits<double>::infinity();
    if (!(condition < condition_limit) || qr.rank() < p)
        throw SingularFit("ols_estimate: rank-deficient or condition above 1e15");

    const Eigen::VectorXd solution = qr.solve(response);

    OlsFit fit;
    fit.theta_hat.assign(solution.data(), solution.data() + p);
    fit.gram = regressors.transpose() * regressors;
    fit.condition_estimate = condition;
    if (!fit.gram.allFinite() || !solution.allFinite())
        throw SingularFit("ols_estimate: non-finite fit (regressors overflowed)");
    return fit;
}

// Residuals eps_t = X_t - theta_hat . Phi_{t-1}, t = 1..n; the series itself
// when p = 0.
inline std::vector<double> residuals(const TimeSeries& series,
                                     std::span<const double> theta_hat) {
    const int p = static_cast<int>(theta_hat.size());
    if (series.p != p)
        throw std::invalid_argument("residuals: theta_hat length must equal p");
    std::vector<double> eps(static_cast<std::size_t>(series.n));
    for (int t = 1; t <= series.n; ++t) {
        double value = series.at(t);
        for (int j = 0; j < p; ++j) value -= theta_hat[j] * series.at(t - 1 - j);
        eps[static_cast<std::size_t>(t - 1)] = value;
    }
    return eps;
}

}  // namespace brar
