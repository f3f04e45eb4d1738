#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "zmlab/errors.hpp"

namespace zmlab {

struct RadialNode {
    double t;           // abscissa in the substituted variable t = b0 r^2 / 2
    double weight;      // e^{-t}-folded weight; underflows to 0 for far nodes
    double log_weight;  // ln(weight), always finite; the assembly tables use this
};

struct LineNode {
    double x;
    double weight;
};

namespace detail {

// Golub-Welsch: eigenvalues of the symmetric Jacobi matrix are the nodes,
// weights follow from the first eigenvector components.  The eigenvector
// route loses all relative accuracy once weights drop below ~1e-30, so it
// is used only where weights stay moderate (Legendre) and as the node seed
// for Laguerre.
inline void golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& subdiag,
                         double moment0, std::vector<double>& nodes,
                         std::vector<double>& weights) {
    const Eigen::Index n = diag.size();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, subdiag, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success)
        throw ConvergenceFailure("golub_welsch: tridiagonal eigensolve failed");
    nodes.resize(static_cast<size_t>(n));
    weights.resize(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        nodes[static_cast<size_t>(i)] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        weights[static_cast<size_t>(i)] = moment0 * v0 * v0;
    }
}

// Orthonormal Laguerre recurrence p_{k+1} = ((t - (2k+1)) p_k - k p_{k-1})/(k+1),
// p_0 = 1, evaluated with power-of-two renormalization: values reach e^{t/2}
// and overflow far before the node range ends.  Returns the Newton ratio
// p_n/p_n' and ln of the Christoffel sum sum_{k<n} p_k(t)^2, whose inverse
// is the quadrature weight.
struct LaguerreEval {
    double newton_ratio;
    double log_christoffel;
};

inline LaguerreEval laguerre_eval(int n, double t) {
    double pm = 0.0, p = 1.0;    // p_{k-1}, p_k
    double dpm = 0.0, dp = 0.0;  // derivatives
    long exp2 = 0;               // current values are true * 2^{-exp2}
    double sum_mant = 0.0;
    long sum_exp = 0;  // Christoffel sum = sum_mant * 2^{sum_exp}
    for (int k = 0; k < n; ++k) {
        // accumulate p_k^2 * 2^{2 exp2}
        const double term = p * p;
        const long term_exp = 2 * exp2;
        if (sum_mant == 0.0) {
            sum_mant = term;
            sum_exp = term_exp;
        } else if (term_exp >= sum_exp) {
            sum_mant = std::ldexp(sum_mant, static_cast<int>(sum_exp - term_exp)) + term;
            sum_exp = term_exp;
        } else {
            sum_mant += std::ldexp(term, static_cast<int>(term_exp - sum_exp));
        }
        const double a = t - (2.0 * k + 1.0);
        const double pn = (a * p - k * pm) / (k + 1.0);
        const double dpn = (p + a * dp - k * dpm) / (k + 1.0);
        pm = p;
        p = pn;
        dpm = dp;
        dp = dpn;
        const double m = std::max(std::abs(p), std::abs(dp));
        if (m > 1e150) {
            pm = std::ldexp(pm, -500);
            p = std::ldexp(p, -500);
            dpm = std::ldexp(dpm, -500);
            dp = std::ldexp(dp, -500);
            exp2 += 500;
        }
    }
    return LaguerreEval{p / dp, std::log(sum_mant) + sum_exp * M_LN2};
}

}  // namespace detail

// Gauss-Laguerre rule for the weight e^{-t} on (0, inf).  Node seeds from
// the Jacobi matrix (alpha_k = 2k+1, beta_k = k^2), polished by Newton;
// weights through the Christoffel function in the log domain, which keeps
// full relative accuracy for weights far below the underflow threshold.
inline std::vector<RadialNode> gauss_laguerre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_laguerre: need n >= 1");
    Eigen::VectorXd diag(n), sub(std::max(n - 1, 0));
    for (int k = 0; k < n; ++k) diag(k) = 2.0 * k + 1.0;
    for (int k = 1; k < n; ++k) sub(k - 1) = static_cast<double>(k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw ConvergenceFailure("gauss_laguerre: tridiagonal eigensolve failed");

    std::vector<RadialNode> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        double t = es.eigenvalues()(i);
        detail::LaguerreEval ev{0.0, 0.0};
        for (int iter = 0; iter < 4; ++iter) {
            ev = detail::laguerre_eval(n, t);
            const double step = ev.newton_ratio;
            t -= step;
            if (std::abs(step) <= 1e-15 * t) break;
        }
        ev = detail::laguerre_eval(n, t);
        const double logw = -ev.log_christoffel;
        out[static_cast<size_t>(i)] = {t, std::exp(logw), logw};
    }
    return out;
}

// Gauss-Legendre rule on [-1, 1].  Recursion: alpha_k = 0,
// beta_k = k^2 / (4k^2 - 1).
inline std::vector<LineNode> gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(std::max(n - 1, 0));
    for (int k = 1; k < n; ++k) {
        const double kk = static_cast<double>(k);
        sub(k - 1) = kk / std::sqrt(4.0 * kk * kk - 1.0);
    }
    std::vector<double> nodes, weights;
    detail::golub_welsch(diag, sub, 2.0, nodes, weights);
    std::vector<LineNode> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        out[static_cast<size_t>(i)] = {nodes[static_cast<size_t>(i)], weights[static_cast<size_t>(i)]};
    return out;
}

// Gauss-Legendre rule mapped to [a, b].
inline std::vector<LineNode> gauss_legendre(int n, double a, double b) {
    auto base = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (auto& nd : base) {
        nd.x = mid + half * nd.x;
        nd.weight *= half;
    }
    return base;
}

// Product rule used for every planar integral: radial nodes in
// t = b0 r^2 / 2 against the measure e^{-t} dt, uniform angular grid on
// [0, 2pi).  The uniform grid integrates e^{i m theta} exactly for
// 0 < |m| < angular_count.
struct QuadratureRule {
    std::vector<RadialNode> radial;
    int angular_count = 0;

    QuadratureRule() = default;
    QuadratureRule(std::vector<RadialNode> r, int angular) : radial(std::move(r)), angular_count(angular) {
        validate();
    }

    void validate() const {
        if (radial.empty()) throw std::invalid_argument("QuadratureRule: need at least one radial node");
        if (angular_count < 4) throw std::invalid_argument("QuadratureRule: need angular_count >= 4");
        for (const auto& nd : radial)
            if (!(nd.t > 0.0) || !(nd.weight >= 0.0) || !std::isfinite(nd.log_weight))
                throw std::invalid_argument("QuadratureRule: radial nodes must be positive with finite log weight");
    }
};

}  // namespace zmlab
