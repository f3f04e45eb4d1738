#pragma once

#include <atomic>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "zmlab/errors.hpp"
#include "zmlab/field.hpp"
#include "zmlab/quadrature.hpp"
#include "zmlab/zeromodes.hpp"

namespace zmlab {

enum class Sign { plus, minus };

// u0(theta) = c_0 + sum_{j>=1} c_j cos(j theta); the angular factor of
// power-decay symbols.
class CosineSeries {
  public:
    CosineSeries() : coeffs_{1.0} {}
    explicit CosineSeries(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) coeffs_ = {0.0};
    }

    double operator()(double theta) const {
        double v = coeffs_[0];
        for (size_t j = 1; j < coeffs_.size(); ++j) v += coeffs_[j] * std::cos(j * theta);
        return v;
    }

    const std::vector<double>& coeffs() const { return coeffs_; }
    bool constant() const { return coeffs_.size() == 1; }

    double min_on_grid(int n = 4096) const {
        double m = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) m = std::min(m, (*this)(2.0 * M_PI * i / n));
        return m;
    }
    double max_on_grid(int n = 4096) const {
        double m = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) m = std::max(m, (*this)(2.0 * M_PI * i / n));
        return m;
    }

  private:
    std::vector<double> coeffs_;
};

// Nonnegative multiplication symbol U on the plane.  The three analytic
// kinds mirror the decay classes of the eigenvalue asymptotics:
//   power     U(x) = c1 u0(theta) <x>^{-alpha}
//   gaussian  U(x) = exp(-eta |x|^{2 beta})
//   disc      U(x) = height on |x| <= radius, 0 outside
//   tabulated caller-supplied sample, optionally with compact support
class SymbolU {
  public:
    enum class Kind { power, gaussian, disc, tabulated };

    static SymbolU power(double alpha, CosineSeries u0 = CosineSeries{}, double c1 = 1.0) {
        if (!(alpha > 0.0)) throw std::invalid_argument("SymbolU::power: alpha must be positive");
        if (!(c1 >= 0.0)) throw std::invalid_argument("SymbolU::power: c1 must be nonnegative");
        if (u0.min_on_grid() < 0.0)
            throw std::invalid_argument("SymbolU::power: u0 must be nonnegative on the circle");
        SymbolU s;
        s.kind_ = Kind::power;
        s.alpha_ = alpha;
        s.u0_ = std::move(u0);
        s.c1_ = c1;
        return s;
    }

    static SymbolU gaussian(double beta, double eta) {
        if (!(beta > 0.0) || !(eta > 0.0))
            throw std::invalid_argument("SymbolU::gaussian: beta and eta must be positive");
        SymbolU s;
        s.kind_ = Kind::gaussian;
        s.beta_ = beta;
        s.eta_ = eta;
        return s;
    }

    static SymbolU disc(double radius, double height) {
        if (!(radius > 0.0) || !(height >= 0.0))
            throw std::invalid_argument("SymbolU::disc: need radius > 0 and height >= 0");
        SymbolU s;
        s.kind_ = Kind::disc;
        s.radius_ = radius;
        s.height_ = height;
        return s;
    }

    static SymbolU tabulated(std::function<double(const Vec2&)> f,
                             double support_radius = std::numeric_limits<double>::infinity()) {
        if (!f) throw std::invalid_argument("SymbolU::tabulated: callable required");
        if (!(support_radius > 0.0))
            throw std::invalid_argument("SymbolU::tabulated: support_radius must be positive");
        SymbolU s;
        s.kind_ = Kind::tabulated;
        s.callable_ = std::move(f);
        s.radius_ = support_radius;
        return s;
    }

    Kind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    double c1() const { return c1_; }
    const CosineSeries& u0() const { return u0_; }
    double beta() const { return beta_; }
    double eta() const { return eta_; }
    double radius() const { return radius_; }
    double height() const { return height_; }

    bool compact() const {
        return kind_ == Kind::disc || (kind_ == Kind::tabulated && std::isfinite(radius_));
    }
    bool radial() const {
        switch (kind_) {
            case Kind::power: return u0_.constant();
            case Kind::gaussian:
            case Kind::disc: return true;
            case Kind::tabulated: return false;
        }
        return false;
    }

    double operator()(const Vec2& x) const { return value_polar(x.norm(), std::atan2(x.y(), x.x())); }

    double value_polar(double r, double theta) const {
        switch (kind_) {
            case Kind::power:
                return c1_ * u0_(theta) * std::pow(1.0 + r * r, -alpha_ / 2.0);
            case Kind::gaussian:
                return std::exp(-eta_ * std::pow(r * r, beta_));
            case Kind::disc:
                return r <= radius_ ? height_ : 0.0;
            case Kind::tabulated:
                if (r > radius_) return 0.0;
                return callable_(Vec2(r * std::cos(theta), r * std::sin(theta)));
        }
        return 0.0;
    }

    double sup_norm() const {
        switch (kind_) {
            case Kind::power: return c1_ * u0_.max_on_grid();
            case Kind::gaussian: return 1.0;
            case Kind::disc: return height_;
            case Kind::tabulated: return std::numeric_limits<double>::quiet_NaN();
        }
        return 0.0;
    }

  private:
    SymbolU() = default;
    Kind kind_ = Kind::gaussian;
    double alpha_ = 0.0, c1_ = 1.0;
    CosineSeries u0_;
    double beta_ = 1.0, eta_ = 1.0;
    double radius_ = 0.0, height_ = 0.0;
    std::function<double(const Vec2&)> callable_;
};

// Hermitian matrix of the compression p(b) U p(b) to the truncated basis,
// entries M[j,k] = int U conj(psi_j) psi_k dx, eigenvalues sorted descending.
struct ToeplitzMatrix {
    Eigen::MatrixXcd matrix;
    Eigen::VectorXd eigenvalues;     // descending
    double quadrature_residual = 0;  // doubled-node drift, max abs entry change
    int K = 0;
    double b0 = 0.0;
};

namespace detail {

// Radial rule matched to the symbol: Laguerre nodes for smooth symbols,
// Gauss-Legendre on [0, b0 rho^2 / 2] for compactly supported ones (a jump
// inside the Laguerre range would wreck the spectral convergence).
inline QuadratureRule symbol_rule(const SymbolU& U, double b0, const QuadratureRule& base) {
    if (!U.compact()) return base;
    const double T = b0 * U.radius() * U.radius() / 2.0;
    auto line = gauss_legendre(static_cast<int>(base.radial.size()), 0.0, T);
    std::vector<RadialNode> radial(line.size());
    for (size_t i = 0; i < line.size(); ++i)
        radial[i] = {line[i].x, line[i].weight * std::exp(-line[i].x),
                     std::log(line[i].weight) - line[i].x};
    return QuadratureRule(std::move(radial), base.angular_count);
}

inline Eigen::VectorXd sorted_descending(const Eigen::VectorXd& v) {
    Eigen::VectorXd out = v;
    std::sort(out.data(), out.data() + out.size(), std::greater<double>());
    return out;
}

inline Eigen::MatrixXcd whitened_symbol_matrix(const ZeroModeBasis& basis, const SymbolU& U,
                                               const QuadratureRule& rule, int threads) {
    const MagneticField& field = basis.field();
    std::atomic<bool> negative{false};
    auto f = [&](double r, double theta) {
        const double u = U.value_polar(r, theta);
        if (u < 0.0) negative.store(true, std::memory_order_relaxed);
        return u * std::exp(-2.0 * eval_phitilde(field, Vec2(r * std::cos(theta), r * std::sin(theta))));
    };
    const Eigen::MatrixXcd S = weighted_phi_gram(f, field.b0(), basis.K(), rule, threads);
    if (negative.load()) throw std::invalid_argument("toeplitz_matrix: symbol is negative at a quadrature node");
    return (basis.whiten() * S * basis.whiten()).conjugate();
}

}  // namespace detail

struct ToeplitzOptions {
    bool self_check = true;
    int threads = 1;
};

inline ToeplitzMatrix toeplitz_matrix(const ZeroModeBasis& basis, const SymbolU& U,
                                      ToeplitzOptions opt = {}) {
    if (U.kind() == SymbolU::Kind::disc && U.radius() > basis.radius())
        throw SupportExceedsRadius("toeplitz_matrix: disc radius exceeds the evaluation radius R(K)");
    const QuadratureRule rule = detail::symbol_rule(U, basis.field().b0(), basis.rule());
    ToeplitzMatrix out;
    out.K = basis.K();
    out.b0 = basis.field().b0();
    out.matrix = detail::whitened_symbol_matrix(basis, U, rule, opt.threads);
    if (opt.self_check) {
        const QuadratureRule fine =
            detail::doubled(rule, !U.compact(), out.b0 * U.radius() * U.radius() / 2.0);
        const Eigen::MatrixXcd m2 = detail::whitened_symbol_matrix(basis, U, fine, opt.threads);
        out.quadrature_residual = (out.matrix - m2).cwiseAbs().maxCoeff();
        if (out.quadrature_residual > 1e-9)
            throw ConvergenceFailure("toeplitz_matrix: doubled-node drift " +
                                     std::to_string(out.quadrature_residual) + " exceeds 1e-9");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(out.matrix, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw ConvergenceFailure("toeplitz_matrix: eigensolve failed");
    out.eigenvalues = detail::sorted_descending(es.eigenvalues());
    return out;
}

// n_{+-}(s; T) = number of eigenvalues of +-T strictly above s.
inline long counting(const Eigen::VectorXd& eigenvalues_desc, double s, Sign sign = Sign::plus) {
    if (!(s > 0.0)) throw std::invalid_argument("counting: s must be positive");
    long n = 0;
    for (Eigen::Index i = 0; i < eigenvalues_desc.size(); ++i) {
        const double v = sign == Sign::plus ? eigenvalues_desc(i) : -eigenvalues_desc(i);
        if (v > s) ++n;
    }
    return n;
}

inline long counting(const ToeplitzMatrix& T, double s, Sign sign = Sign::plus) {
    return counting(T.eigenvalues, s, sign);
}

// ||T||_q = (sum |lambda_i|^q)^{1/q}
inline double schatten_norm(const Eigen::VectorXd& eigenvalues, double q) {
    if (!(q >= 1.0)) throw std::invalid_argument("schatten_norm: q must be >= 1");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) acc += std::pow(std::abs(eigenvalues(i)), q);
    return std::pow(acc, 1.0 / q);
}

inline double schatten_norm(const ToeplitzMatrix& T, double q) { return schatten_norm(T.eigenvalues, q); }

// Power-decay comparator
//   Psi_alpha(s; u0, b0) = s^{-2/alpha} (b0 / 4 pi) int_{S^1} u0^{2/alpha} dtheta.
inline double comparator_psi(double s, double alpha, const CosineSeries& u0, double b0, int grid = 8192) {
    if (!(s > 0.0)) throw std::invalid_argument("comparator_psi: s must be positive");
    if (!(alpha > 0.0)) throw std::invalid_argument("comparator_psi: alpha must be positive");
    double integral = 0.0;
    for (int i = 0; i < grid; ++i) {
        const double v = u0(2.0 * M_PI * i / grid);
        integral += std::pow(std::max(v, 0.0), 2.0 / alpha);
    }
    integral *= 2.0 * M_PI / grid;
    return std::pow(s, -2.0 / alpha) * b0 / (4.0 * M_PI) * integral;
}

// Exponential/compact comparators on s in (0, e^{-1}):
//   beta < 1:       b0 / (2 eta^{1/beta}) |ln s|^{1/beta}
//   beta = 1:       |ln s| / ln(1 + 2 eta / b0)
//   1 < beta < inf: beta/(beta-1) |ln s| / ln|ln s|
//   beta = inf:     |ln s| / ln|ln s|          (compact support)
inline double comparator_phi(double s, double beta, double eta, double b0) {
    if (!(s > 0.0) || !(s < std::exp(-1.0)))
        throw std::domain_error("comparator_phi: s must lie in (0, e^{-1})");
    if (!(beta > 0.0)) throw std::invalid_argument("comparator_phi: beta must be positive");
    const double L = -std::log(s);
    if (std::isinf(beta)) return L / std::log(L);
    if (!(eta > 0.0)) throw std::invalid_argument("comparator_phi: eta must be positive");
    if (beta < 1.0) return b0 / (2.0 * std::pow(eta, 1.0 / beta)) * std::pow(L, 1.0 / beta);
    if (beta == 1.0) return L / std::log1p(2.0 * eta / b0);
    return beta / (beta - 1.0) * L / std::log(L);
}

inline double comparator_phi_inf(double s) {
    return comparator_phi(s, std::numeric_limits<double>::infinity(), 1.0, 1.0);
}

// Semiclassical count (b0 / 2 pi) |{ U > s }|, the leading term of
// n_+(s; p U p).  Analytic super-level sets for the radial kinds, grid
// counting for tabulated symbols.
inline double volume_count(const SymbolU& U, double s, double b0, int grid_density = 1024) {
    if (!(s > 0.0)) throw std::invalid_argument("volume_count: s must be positive");
    const double factor = b0 / (2.0 * M_PI);
    switch (U.kind()) {
        case SymbolU::Kind::power: {
            // per angle, U > s  iff  1 + r^2 < (c1 u0 / s)^{2/alpha}
            const int n = 8192;
            double area = 0.0;
            for (int i = 0; i < n; ++i) {
                const double u = U.c1() * U.u0()(2.0 * M_PI * i / n);
                if (u <= 0.0) continue;
                const double lim = std::pow(u / s, 2.0 / U.alpha()) - 1.0;
                if (lim > 0.0) area += lim;
            }
            area *= 0.5 * 2.0 * M_PI / n;
            return factor * area;
        }
        case SymbolU::Kind::gaussian: {
            if (s >= 1.0) return 0.0;
            return factor * M_PI * std::pow(-std::log(s) / U.eta(), 1.0 / U.beta());
        }
        case SymbolU::Kind::disc:
            return s < U.height() ? factor * M_PI * U.radius() * U.radius() : 0.0;
        case SymbolU::Kind::tabulated: {
            if (!std::isfinite(U.radius()))
                throw std::invalid_argument("volume_count: tabulated symbol needs a finite support radius");
            const double R = U.radius();
            const double h = 2.0 * R / grid_density;
            long hits = 0;
            for (int i = 0; i < grid_density; ++i)
                for (int j = 0; j < grid_density; ++j)
                    if (U(Vec2(-R + (i + 0.5) * h, -R + (j + 0.5) * h)) > s) ++hits;
            return factor * hits * h * h;
        }
    }
    return 0.0;
}

// Two-sided counting estimate (constant-field comparison operator):
//   n_+(e^{2 osc} s; p(b0) U p(b0)) <= n_+(s; p(b) U p(b)) <= n_+(e^{-2 osc} s; p(b0) U p(b0)).
struct SandwichResult {
    long lower = 0;
    long middle = 0;
    long upper = 0;
    bool ok = false;
};

inline SandwichResult sandwich_counts(const Eigen::VectorXd& eig_b, const Eigen::VectorXd& eig_b0,
                                      double s, double osc) {
    SandwichResult r;
    r.lower = counting(eig_b0, std::exp(2.0 * osc) * s);
    r.middle = counting(eig_b, s);
    r.upper = counting(eig_b0, std::exp(-2.0 * osc) * s);
    r.ok = r.lower <= r.middle && r.middle <= r.upper;
    return r;
}

inline SandwichResult sandwich_check(const ZeroModeBasis& basis_b, const ZeroModeBasis& basis_b0,
                                     const SymbolU& U, double s, double osc, ToeplitzOptions opt = {}) {
    if (basis_b.field().b0() != basis_b0.field().b0())
        throw std::invalid_argument("sandwich_check: the two bases must share b0");
    if (!basis_b0.field().constant())
        throw std::invalid_argument("sandwich_check: comparison basis must have a constant field");
    if (!(s > 0.0)) throw std::invalid_argument("sandwich_check: s must be positive");
    const ToeplitzMatrix mb = toeplitz_matrix(basis_b, U, opt);
    const ToeplitzMatrix mb0 = toeplitz_matrix(basis_b0, U, opt);
    return sandwich_counts(mb.eigenvalues, mb0.eigenvalues, s, osc);
}

}  // namespace zmlab
