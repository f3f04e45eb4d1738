#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "zmlab/detail/parallel.hpp"
#include "zmlab/errors.hpp"
#include "zmlab/field.hpp"
#include "zmlab/quadrature.hpp"

namespace zmlab {

// Constant-field zero mode
//   phi_k(x) = sqrt(b0 / (2 pi k!)) (b0/2)^{k/2} (x1 + i x2)^k e^{-b0 |x|^2 / 4}.
// Magnitude is accumulated in the log domain (k! and r^k overflow naive
// evaluation near k ~ 170), phase is k * theta.
inline std::complex<double> phi_k(double b0, int k, const Vec2& x) {
    if (!(b0 > 0.0)) throw std::invalid_argument("phi_k: b0 must be positive");
    if (k < 0) throw std::invalid_argument("phi_k: k must be nonnegative");
    const double r2 = x.squaredNorm();
    if (r2 == 0.0) return k == 0 ? std::sqrt(b0 / (2.0 * M_PI)) : 0.0;
    const double logmag = 0.5 * (std::log(b0 / (2.0 * M_PI)) - std::lgamma(k + 1.0)) +
                          0.5 * k * std::log(b0 / 2.0) + 0.5 * k * std::log(r2) - b0 * r2 / 4.0;
    const double theta = std::atan2(x.y(), x.x());
    return std::polar(std::exp(logmag), k * theta);
}

inline std::complex<double> phi_k(const MagneticField& field, int k, const Vec2& x) {
    return phi_k(field.b0(), k, x);
}

// Trusted evaluation radius for a K-term basis: phi_k mass sits near
// r ~ sqrt(2k/b0), and the tail beyond index K is negligible only for
// t = b0 r^2/2 <= K - 6 sqrt(K).
inline double eval_radius(int K, double b0) {
    const double margin = static_cast<double>(K) - 6.0 * std::sqrt(static_cast<double>(K));
    if (margin <= 0.0) return 0.0;
    return std::sqrt(2.0 * margin / b0);
}

namespace detail {

// Scaled monomial table A[i][k] = sqrt(w_i) t_i^{k/2} / sqrt(k!), the radial
// half of every basis integral, kept in the log domain until the final exp.
inline Eigen::MatrixXd radial_monomials(const std::vector<RadialNode>& nodes, int K) {
    const long n = static_cast<long>(nodes.size());
    Eigen::MatrixXd A(n, K);
    for (long i = 0; i < n; ++i) {
        const double logw = 0.5 * nodes[static_cast<size_t>(i)].log_weight;
        const double logt = std::log(nodes[static_cast<size_t>(i)].t);
        for (int k = 0; k < K; ++k)
            A(i, k) = std::exp(logw + 0.5 * (k * logt - std::lgamma(k + 1.0)));
    }
    return A;
}

// Angular transform F[i][d] = (1/N) sum_m f(r_i, theta_m) e^{i d theta_m}
// for d = 0..K-1; f real, so F(-d) = conj(F(d)).
inline Eigen::MatrixXcd angular_transform(const std::function<double(double, double)>& f_polar,
                                          const std::vector<RadialNode>& nodes, int angular_count,
                                          double b0, int K, int threads) {
    const long n = static_cast<long>(nodes.size());
    Eigen::MatrixXcd F(n, K);
    detail::parallel_for(n, threads, [&](long i) {
        const double r = std::sqrt(2.0 * nodes[static_cast<size_t>(i)].t / b0);
        Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(K);
        for (int m = 0; m < angular_count; ++m) {
            const double theta = 2.0 * M_PI * m / angular_count;
            const double v = f_polar(r, theta);
            if (v == 0.0) continue;
            const std::complex<double> z = std::polar(1.0, theta);
            std::complex<double> p(1.0, 0.0);
            for (int d = 0; d < K; ++d) {
                acc(d) += v * p;
                p *= z;
            }
        }
        F.row(i) = acc.transpose() / static_cast<double>(angular_count);
    });
    return F;
}

// Assembles the K x K matrix with entries  int f(x) phi_j(x) conj(phi_k(x)) dx
// over the product rule; used with f = e^{-2 phitilde} for the Gram matrix.
// In polar form the entry reduces to sum_i A[i][j] A[i][k] F_i(j - k).
inline Eigen::MatrixXcd weighted_phi_gram(const std::function<double(double, double)>& f_polar,
                                          double b0, int K, const QuadratureRule& rule, int threads) {
    const Eigen::MatrixXd A = radial_monomials(rule.radial, K);
    const Eigen::MatrixXcd F = angular_transform(f_polar, rule.radial, rule.angular_count, b0, K, threads);
    const long n = static_cast<long>(rule.radial.size());
    Eigen::MatrixXcd G(K, K);
    detail::parallel_for(K, threads, [&](long j) {
        for (int k = 0; k <= j; ++k) {
            std::complex<double> s(0.0, 0.0);
            const int d = static_cast<int>(j) - k;
            for (long i = 0; i < n; ++i) s += A(i, j) * A(i, k) * F(i, d);
            G(j, k) = s;
            G(k, j) = std::conj(s);
        }
    });
    return G;
}

inline QuadratureRule doubled(const QuadratureRule& rule, bool laguerre_radial, double legendre_upper) {
    const int nr = static_cast<int>(rule.radial.size());
    if (laguerre_radial) return QuadratureRule(gauss_laguerre(2 * nr), 2 * rule.angular_count);
    auto line = gauss_legendre(2 * nr, 0.0, legendre_upper);
    std::vector<RadialNode> radial(line.size());
    for (size_t i = 0; i < line.size(); ++i)
        radial[i] = {line[i].x, line[i].weight * std::exp(-line[i].x),
                     std::log(line[i].weight) - line[i].x};
    return QuadratureRule(std::move(radial), 2 * rule.angular_count);
}

}  // namespace detail

// Gram matrix  g_{jk} = int e^{-2 phitilde} phi_j conj(phi_k) dx  of the
// constant-field basis under the weight of the background.
inline Eigen::MatrixXcd gram_matrix(const MagneticField& field, int K, const QuadratureRule& rule,
                                    int threads = 1) {
    if (K < 1) throw std::invalid_argument("gram_matrix: K must be positive");
    auto f = [&field](double r, double theta) {
        return std::exp(-2.0 * eval_phitilde(field, Vec2(r * std::cos(theta), r * std::sin(theta))));
    };
    return detail::weighted_phi_gram(f, field.b0(), K, rule, threads);
}

// Principal inverse square root of a Hermitian positive definite matrix via
// symmetric eigendecomposition.  Eigenvalues below 1e-12 * lambda_max signal
// a numerics bug (the Gram operator is bounded below by e^{-2 sup phitilde}).
inline Eigen::MatrixXcd whiten(const Eigen::MatrixXcd& gram) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
    if (es.info() != Eigen::Success) throw NearSingularGram("whiten: eigendecomposition failed");
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double floor = 1e-12 * ev(ev.size() - 1);
    if (!(ev(0) > floor)) throw NearSingularGram("whiten: gram eigenvalue below 1e-12 * lambda_max");
    const Eigen::VectorXd inv_sqrt = ev.array().rsqrt();
    return es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().adjoint();
}

// Truncated orthonormal basis psi_j = e^{-phitilde} sum_k rho_{jk} phi_k of
// the zero-mode space, rho = gram^{-1/2}.
class ZeroModeBasis {
  public:
    struct Options {
        int radial_nodes = 0;    // 0: auto, 2K + 32
        int angular_nodes = 0;   // 0: auto, max(4K + 16, ceil(8 |lambda|_max R))
        bool self_check = true;  // doubled-node drift check on the Gram matrix
        int threads = 1;         // 0: all hardware threads
    };

    ZeroModeBasis(MagneticField field, int K) : ZeroModeBasis(std::move(field), K, Options()) {}

    ZeroModeBasis(MagneticField field, int K, Options opt)
        : field_(std::move(field)), K_(K), radius_(eval_radius(K, field_.b0())) {
        if (K_ < 1) throw std::invalid_argument("ZeroModeBasis: K must be positive");
        const int nr = opt.radial_nodes > 0 ? opt.radial_nodes : 2 * K_ + 32;
        int na = opt.angular_nodes > 0
                     ? opt.angular_nodes
                     : std::max(4 * K_ + 16,
                                static_cast<int>(std::ceil(8.0 * field_.max_frequency() * radius_)));
        na = std::max(na, 4);
        rule_ = QuadratureRule(gauss_laguerre(nr), na);
        gram_ = gram_matrix(field_, K_, rule_, opt.threads);
        gram_drift_ = 0.0;
        if (opt.self_check) {
            const Eigen::MatrixXcd g2 =
                gram_matrix(field_, K_, detail::doubled(rule_, true, 0.0), opt.threads);
            gram_drift_ = (gram_ - g2).cwiseAbs().maxCoeff();
            if (gram_drift_ > 1e-9)
                throw ConvergenceFailure("ZeroModeBasis: doubled-node Gram drift " +
                                         std::to_string(gram_drift_) + " exceeds 1e-9");
        }
        whiten_ = zmlab::whiten(gram_);
    }

    const MagneticField& field() const { return field_; }
    int K() const { return K_; }
    double radius() const { return radius_; }
    const QuadratureRule& rule() const { return rule_; }
    const Eigen::MatrixXcd& gram() const { return gram_; }
    const Eigen::MatrixXcd& whiten() const { return whiten_; }
    double gram_drift() const { return gram_drift_; }

    // Column vector (phi_0(x), ..., phi_{K-1}(x)).
    Eigen::VectorXcd phi_vector(const Vec2& x) const {
        Eigen::VectorXcd v(K_);
        const double r2 = x.squaredNorm();
        if (r2 == 0.0) {
            v.setZero();
            v(0) = std::sqrt(field_.b0() / (2.0 * M_PI));
            return v;
        }
        // same log-domain evaluation as phi_k, hoisted out of the k loop
        const double b0 = field_.b0();
        const double theta = std::atan2(x.y(), x.x());
        const double base = 0.5 * std::log(b0 / (2.0 * M_PI)) - b0 * r2 / 4.0;
        const double logtr = 0.5 * (std::log(b0 / 2.0) + std::log(r2));
        for (int k = 0; k < K_; ++k)
            v(k) = std::polar(std::exp(base + k * logtr - 0.5 * std::lgamma(k + 1.0)), k * theta);
        return v;
    }

    std::complex<double> psi(int j, const Vec2& x) const {
        if (j < 0 || j >= K_) throw std::invalid_argument("psi: index out of range");
        const std::complex<double> s = whiten_.row(j) * phi_vector(x);
        return std::exp(-eval_phitilde(field_, x)) * s;
    }

    // Diagonal of the zero-mode projection kernel,
    //   P_b(x,x) = sum_j |psi_j(x)|^2 = e^{-2 phitilde} |rho phi(x)|^2,
    // truncated to K terms; trusted only for |x| <= R(K).
    double kernel_diag(const Vec2& x) const {
        if (x.norm() > radius_)
            throw EvaluationRadiusExceeded("kernel_diag: |x| exceeds the evaluation radius R(K)");
        const double w = std::exp(-2.0 * eval_phitilde(field_, x));
        return w * (whiten_ * phi_vector(x)).squaredNorm();
    }

  private:
    MagneticField field_;
    int K_;
    double radius_;
    QuadratureRule rule_;
    Eigen::MatrixXcd gram_;
    Eigen::MatrixXcd whiten_;
    double gram_drift_;
};

}  // namespace zmlab
