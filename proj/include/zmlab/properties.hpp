#pragma once

#include <complex>
#include <random>

#include <Eigen/Dense>

#include "zmlab/toeplitz.hpp"

namespace zmlab {

// Randomized checks of the two counting-function mechanisms the corridor
// theorems rest on; both hold exactly, so any failure is a numerics bug.

// n_+(s; A* A) = n_+(s; A A*) on random rectangular A, thresholds kept away
// from the eigenvalues.
inline long duality_trials(unsigned long seed, long trials) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> rows(1, 12), cols(1, 20);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    long failures = 0;
    for (long t = 0; t < trials; ++t) {
        const int m = rows(rng), n = cols(rng);
        Eigen::MatrixXcd A(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = std::complex<double>(coef(rng), coef(rng));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> e1(A.adjoint() * A, Eigen::EigenvaluesOnly);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> e2(A * A.adjoint(), Eigen::EigenvaluesOnly);
        const Eigen::VectorXd l1 = detail::sorted_descending(e1.eigenvalues());
        const Eigen::VectorXd l2 = detail::sorted_descending(e2.eigenvalues());
        const double top = std::max(l1(0), 1e-12);
        std::uniform_real_distribution<double> thr(1e-6 * top, 1.1 * top);
        int drawn = 0;
        while (drawn < 100) {
            const double s = thr(rng);
            bool near = false;
            for (Eigen::Index i = 0; i < l1.size() && !near; ++i)
                if (std::abs(l1(i) - s) < 1e-6 * top) near = true;
            for (Eigen::Index i = 0; i < l2.size() && !near; ++i)
                if (std::abs(l2(i) - s) < 1e-6 * top) near = true;
            if (near) continue;
            ++drawn;
            if (counting(l1, s) != counting(l2, s)) ++failures;
        }
    }
    return failures;
}

// Weyl inequality n_pm(s1 + s2; T1 + T2) <= n_pm(s1; T1) + n_pm(s2; T2) on
// random Hermitian pairs.
inline long weyl_trials(unsigned long seed, long trials) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dims(1, 12);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::uniform_real_distribution<double> sdist(0.01, 2.0);
    long failures = 0;
    for (long t = 0; t < trials; ++t) {
        const int n = dims(rng);
        auto random_hermitian = [&]() {
            Eigen::MatrixXcd M(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) M(i, j) = std::complex<double>(coef(rng), coef(rng));
            return Eigen::MatrixXcd((M + M.adjoint()) / 2.0);
        };
        const Eigen::MatrixXcd t1 = random_hermitian(), t2 = random_hermitian();
        const double s1 = sdist(rng), s2 = sdist(rng);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> e1(t1, Eigen::EigenvaluesOnly);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> e2(t2, Eigen::EigenvaluesOnly);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> e12(t1 + t2, Eigen::EigenvaluesOnly);
        const Eigen::VectorXd l1 = detail::sorted_descending(e1.eigenvalues());
        const Eigen::VectorXd l2 = detail::sorted_descending(e2.eigenvalues());
        const Eigen::VectorXd l12 = detail::sorted_descending(e12.eigenvalues());
        for (const Sign sign : {Sign::plus, Sign::minus}) {
            if (counting(l12, s1 + s2, sign) > counting(l1, s1, sign) + counting(l2, s2, sign))
                ++failures;
        }
    }
    return failures;
}

}  // namespace zmlab
