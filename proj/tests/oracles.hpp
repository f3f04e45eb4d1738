// Independent oracles used by the test suites: brute-force Cartesian
// integration and closed-form special functions.  Nothing here touches the
// polar assembly path of the library.
#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "zmlab/field.hpp"
#include "zmlab/zeromodes.hpp"

namespace oracles {

// Midpoint-rule Gram matrix on a Cartesian box; the integrand decays like
// e^{-b0 r^2 / 2}, so box size L and step h control the error directly.
inline Eigen::MatrixXcd brute_force_gram(const zmlab::MagneticField& field, int K, double L,
                                         double h) {
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(K, K);
    const int n = static_cast<int>(std::ceil(2.0 * L / h));
    for (int i = 0; i < n; ++i) {
        const double x1 = -L + (i + 0.5) * h;
        for (int j = 0; j < n; ++j) {
            const double x2 = -L + (j + 0.5) * h;
            const zmlab::Vec2 x(x1, x2);
            const double w = std::exp(-2.0 * zmlab::eval_phitilde(field, x)) * h * h;
            Eigen::VectorXcd phi(K);
            for (int k = 0; k < K; ++k) phi(k) = zmlab::phi_k(field, k, x);
            G.noalias() += w * phi * phi.adjoint();
        }
    }
    return G;
}

// Regularized lower incomplete gamma P(k+1, T) for integer order, through
// the Poisson identity P(k+1, T) = sum_{j >= k+1} e^{-T} T^j / j!; all
// terms positive, so small values keep full relative accuracy.
inline double reg_lower_gamma_int(int kplus1, double T) {
    double term = std::exp(-T + kplus1 * std::log(T) - std::lgamma(kplus1 + 1.0));
    double sum = 0.0;
    for (int j = kplus1; term > 0.0; ++j) {
        sum += term;
        if (term < 1e-18 * sum && j > T) break;
        term *= T / (j + 1);
    }
    return sum;
}

}  // namespace oracles
