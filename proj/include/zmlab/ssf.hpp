#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "zmlab/errors.hpp"
#include "zmlab/quadrature.hpp"
#include "zmlab/toeplitz.hpp"
#include "zmlab/zeromodes.hpp"

namespace zmlab {

namespace detail {

// int_{-inf}^{inf} <x>^{-m} cos(omega x) dx over a certified truncation.
// The absolute tail bound 2 X^{1-m}/(m-1) < 1e-10 governs omega = 0; for
// omega > 0 the integration-by-parts bound 2 <X>^{-m} / omega is also
// admissible and keeps X finite for slowly decaying profiles.
inline double power_cosine_moment(double m, double omega) {
    if (!(m > 1.0)) throw std::invalid_argument("power_cosine_moment: need m > 1");
    constexpr double tol = 1e-10;
    double X = std::pow(2.0 / ((m - 1.0) * tol), 1.0 / (m - 1.0));
    if (omega > 0.0) X = std::min(X, std::pow(2.0 / (omega * tol), 1.0 / m));
    if (!(X < 1e9))
        throw ConvergenceFailure("power_cosine_moment: certified truncation infeasible for m = " +
                                 std::to_string(m));
    // panels: geometric growth, capped at half a cosine period
    const double cap = omega > 0.0 ? std::max(M_PI / omega, 1e-3) : X;
    const auto base = gauss_legendre(24);
    double acc = 0.0;
    double lo = 0.0, len = std::min(1.0, cap);
    while (lo < X) {
        const double hi = std::min(lo + len, X);
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        double panel = 0.0;
        for (const auto& nd : base) {
            const double x = mid + half * nd.x;
            panel += nd.weight * std::pow(1.0 + x * x, -m / 2.0) * std::cos(omega * x);
        }
        acc += half * panel;
        lo = hi;
        len = std::min(2.0 * len, cap);
    }
    return 2.0 * acc;
}

}  // namespace detail

// Longitudinal factor g(x3) >= 0 of the separable perturbation; all three
// kinds are even, so the mixed cos*sin moment vanishes identically.
class LongitudinalProfile {
  public:
    enum class Kind { gaussian, boxcar, power };

    static LongitudinalProfile gaussian(double sigma) {
        if (!(sigma > 0.0)) throw std::invalid_argument("LongitudinalProfile: sigma must be positive");
        return LongitudinalProfile(Kind::gaussian, sigma);
    }
    static LongitudinalProfile boxcar(double halfwidth) {
        if (!(halfwidth > 0.0))
            throw std::invalid_argument("LongitudinalProfile: halfwidth must be positive");
        return LongitudinalProfile(Kind::boxcar, halfwidth);
    }
    static LongitudinalProfile power(double m3) {
        if (!(m3 > 1.0)) throw std::invalid_argument("LongitudinalProfile: need m3 > 1");
        LongitudinalProfile g(Kind::power, m3);
        g.cached_integral_ = detail::power_cosine_moment(m3, 0.0);
        return g;
    }

    Kind kind() const { return kind_; }
    double parameter() const { return param_; }

    double operator()(double x3) const {
        switch (kind_) {
            case Kind::gaussian: return std::exp(-x3 * x3 / (2.0 * param_ * param_));
            case Kind::boxcar: return std::abs(x3) <= param_ ? 1.0 : 0.0;
            case Kind::power: return std::pow(1.0 + x3 * x3, -param_ / 2.0);
        }
        return 0.0;
    }

    // int g dx3
    double integral() const {
        switch (kind_) {
            case Kind::gaussian: return param_ * std::sqrt(2.0 * M_PI);
            case Kind::boxcar: return 2.0 * param_;
            case Kind::power: return cached_integral_;
        }
        return 0.0;
    }

    // int g(x3) cos(omega x3) dx3
    double cosine_moment(double omega) const {
        switch (kind_) {
            case Kind::gaussian:
                return param_ * std::sqrt(2.0 * M_PI) * std::exp(-param_ * param_ * omega * omega / 2.0);
            case Kind::boxcar: {
                const double a = param_;
                if (std::abs(a * omega) < 1e-8) return 2.0 * a * (1.0 - a * a * omega * omega / 6.0);
                return 2.0 * std::sin(a * omega) / omega;
            }
            case Kind::power: return detail::power_cosine_moment(param_, omega);
        }
        return 0.0;
    }

  private:
    LongitudinalProfile(Kind k, double p) : kind_(k), param_(p) {}
    Kind kind_;
    double param_;
    double cached_integral_ = 0.0;
};

// Decay class of the full 3D perturbation, the input of the generalized
// Levinson prediction.
struct DecayClass {
    enum class Kind { power, exponential, compact };
    Kind kind = Kind::compact;
    double m = 0.0;     // power: <x>^{-m}, m > 3
    double beta = 0.0;  // exponential: exp(-eta |x|^{2 beta})
    double eta = 0.0;

    static DecayClass power(double m) {
        if (!(m > 3.0)) throw std::invalid_argument("DecayClass::power: need m > 3");
        DecayClass d;
        d.kind = Kind::power;
        d.m = m;
        return d;
    }
    static DecayClass exponential(double beta, double eta) {
        if (!(beta > 0.0) || !(eta > 0.0))
            throw std::invalid_argument("DecayClass::exponential: beta and eta must be positive");
        DecayClass d;
        d.kind = Kind::exponential;
        d.beta = beta;
        d.eta = eta;
        return d;
    }
    static DecayClass compact() { return DecayClass{}; }

    // lim_{E->0} xi(E)/xi(-E) for H0 - V:
    // 1/(2 cos(pi/(m-1))) for the power class, 1/2 otherwise.
    double predicted_levinson() const {
        if (kind == Kind::power) return 1.0 / (2.0 * std::cos(M_PI / (m - 1.0)));
        return 0.5;
    }
};

// Separable sign-definite perturbation v11(x, x3) = U(x) g(x3) >= 0.
struct PerturbationProfile {
    SymbolU transverse;
    LongitudinalProfile longitudinal;
    DecayClass decay;
};

// W(x) = int v11(x, x3) dx3 = U(x) int g
inline double w_profile(const PerturbationProfile& p, const Vec2& x) {
    return p.transverse(x) * p.longitudinal.integral();
}

// Longitudinal moments of the 2x2 effective symbol at energy E:
//   c2 = int g cos^2(sqrt(E) x3),  s2 = int g sin^2,  cs = int g cos sin.
struct WMoments {
    double ig = 0.0;
    double c2 = 0.0;
    double cs = 0.0;
    double s2 = 0.0;
};

inline WMoments w_moments(const LongitudinalProfile& g, double E) {
    if (!(E >= 0.0)) throw std::invalid_argument("w_moments: E must be nonnegative");
    WMoments m;
    m.ig = g.integral();
    const double c = g.cosine_moment(2.0 * std::sqrt(E));
    m.c2 = 0.5 * (m.ig + c);
    m.s2 = 0.5 * (m.ig - c);
    m.cs = 0.0;  // g even, cos*sin odd
    return m;
}

// 2x2 matrix W_E(x); trace equals W(x) pointwise (cos^2 + sin^2 = 1).
inline Eigen::Matrix2d w_matrix(const PerturbationProfile& p, double E, const Vec2& x) {
    const WMoments m = w_moments(p.longitudinal, E);
    const double u = p.transverse(x);
    Eigen::Matrix2d out;
    out << u * m.c2, u * m.cs, u * m.cs, u * m.s2;
    return out;
}

// Descending eigenvalues mu of p W p.  Spectra of omega(E) = (2 sqrt(E))^{-1} p W p
// follow by exact scaling, so they are computed once per profile.
struct EffectiveSpectrum {
    Eigen::VectorXd mu;  // descending, clamped at 0
    int K = 0;
    double b0 = 0.0;
    double quadrature_residual = 0.0;
};

// Transverse matrix of U plus the longitudinal profile; enough to produce
// the spectra of both omega(E) and Omega(E) for every E.
class EffectiveModel {
  public:
    EffectiveModel(const ZeroModeBasis& basis, PerturbationProfile profile, ToeplitzOptions opt = {})
        : profile_(std::move(profile)), m_u_(toeplitz_matrix(basis, profile_.transverse, opt)) {}

    const PerturbationProfile& profile() const { return profile_; }
    const ToeplitzMatrix& transverse_matrix() const { return m_u_; }

    EffectiveSpectrum spectrum() const {
        EffectiveSpectrum s;
        s.K = m_u_.K;
        s.b0 = m_u_.b0;
        s.quadrature_residual = m_u_.quadrature_residual;
        s.mu = (profile_.longitudinal.integral() * m_u_.eigenvalues).cwiseMax(0.0);
        return s;
    }

    // Eigenvalues nu of p W_E p from the 2K x 2K block matrix
    // [[c2 M, cs M], [cs M, s2 M]]; every block is the scalar integrator
    // output scaled by a longitudinal moment.
    Eigen::VectorXd block_spectrum(double E) const {
        const WMoments m = w_moments(profile_.longitudinal, E);
        const int K = m_u_.K;
        Eigen::MatrixXcd block(2 * K, 2 * K);
        block.topLeftCorner(K, K) = m.c2 * m_u_.matrix;
        block.topRightCorner(K, K) = m.cs * m_u_.matrix;
        block.bottomLeftCorner(K, K) = m.cs * m_u_.matrix;
        block.bottomRightCorner(K, K) = m.s2 * m_u_.matrix;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(block, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw ConvergenceFailure("block_spectrum: eigensolve failed");
        return detail::sorted_descending(es.eigenvalues()).cwiseMax(0.0);
    }

  private:
    PerturbationProfile profile_;
    ToeplitzMatrix m_u_;
};

inline EffectiveSpectrum effective_spectrum(const ZeroModeBasis& basis, const PerturbationProfile& p,
                                            ToeplitzOptions opt = {}) {
    return EffectiveModel(basis, p, opt).spectrum();
}

struct Corridor {
    double lo = 0.0;
    double hi = 0.0;
};

// Effective corridor for xi(-E; H0 - V, H0):
//   lo = -n_+((1-eps); omega(E)),  hi = -n_+((1+eps); omega(E)),
// i.e. counts of mu_k above (1 -+ eps) 2 sqrt(E).  The theorems' O(1)
// remainders are not representable and are not added.
inline Corridor xi_below(const EffectiveSpectrum& spec, double E, double epsilon) {
    if (!(E > 0.0)) throw std::invalid_argument("xi_below: E must be positive");
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        throw std::invalid_argument("xi_below: epsilon must lie in (0,1)");
    const double tau = 2.0 * std::sqrt(E);
    Corridor c;
    c.lo = -static_cast<double>(counting(spec.mu, (1.0 - epsilon) * tau));
    c.hi = -static_cast<double>(counting(spec.mu, (1.0 + epsilon) * tau));
    return c;
}

// (1/pi) sum arctan(nu_j / (s 2 sqrt(E))) with the +- sign of the
// perturbation; endpoint pair at s = 1 -+ eps.
inline Corridor xi_above(const Eigen::VectorXd& nu_desc, double E, double epsilon, Sign sign) {
    if (!(E > 0.0)) throw std::invalid_argument("xi_above: E must be positive");
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        throw std::invalid_argument("xi_above: epsilon must lie in (0,1)");
    const double tau = 2.0 * std::sqrt(E);
    auto trace_arctan = [&](double scale) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < nu_desc.size(); ++j)
            acc += std::atan(nu_desc(j) / (scale * tau));
        return acc / M_PI;
    };
    const double wide = trace_arctan(1.0 - epsilon);   // larger magnitude
    const double narrow = trace_arctan(1.0 + epsilon); // smaller magnitude
    if (sign == Sign::plus) return Corridor{narrow, wide};
    return Corridor{-wide, -narrow};
}

inline Corridor xi_above(const ZeroModeBasis& basis, const PerturbationProfile& p, double E,
                         double epsilon, Sign sign, ToeplitzOptions opt = {}) {
    return xi_above(EffectiveModel(basis, p, opt).block_spectrum(E), E, epsilon, sign);
}

// Reduced form through Omega~(E) = (2 sqrt(E))^{-1} p diag(W, 0) p:
// +-(1/pi) sum arctan(mu_k / (2 sqrt(E))); the small-E surrogate of xi_above.
inline double xi_above_tilde(const EffectiveSpectrum& spec, double E, Sign sign) {
    if (!(E > 0.0)) throw std::invalid_argument("xi_above_tilde: E must be positive");
    const double tau = 2.0 * std::sqrt(E);
    double acc = 0.0;
    for (Eigen::Index k = 0; k < spec.mu.size(); ++k) acc += std::atan(spec.mu(k) / tau);
    return (sign == Sign::plus ? 1.0 : -1.0) * acc / M_PI;
}

// Semiclassical integral form (b0 / 2 pi^2) int arctan((2 sqrt(E))^{-1} W(x)) dx,
// radial-angular product quadrature with certified tail cutoffs per kind.
inline double xi_semiclassical(const PerturbationProfile& p, double E, double b0) {
    if (!(E > 0.0)) throw std::invalid_argument("xi_semiclassical: E must be positive");
    const double c = p.longitudinal.integral() / (2.0 * std::sqrt(E));
    const SymbolU& U = p.transverse;
    const auto base = gauss_legendre(24);

    auto radial_integral = [&](double scale, double r_end) {
        // int_0^{r_end} arctan(c * scale * profile(r)) r dr, geometric panels
        double acc = 0.0;
        double lo = 0.0, len = std::min(1.0, r_end);
        while (lo < r_end) {
            const double hi = std::min(lo + len, r_end);
            const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
            double panel = 0.0;
            for (const auto& nd : base) {
                const double r = mid + half * nd.x;
                const double u = U.value_polar(r, 0.0) * scale;
                panel += nd.weight * std::atan(c * u) * r;
            }
            acc += half * panel;
            lo = hi;
            len *= 2.0;
        }
        return acc;
    };

    switch (U.kind()) {
        case SymbolU::Kind::power: {
            const double alpha = U.alpha();
            if (!(alpha > 2.0))
                throw std::domain_error("xi_semiclassical: power symbol needs alpha > 2 for W in L^1");
            // tail: int_R^inf arctan(c u) r dr <= c c1 u0max R^{2-alpha}/(alpha-2)
            const double umax = U.c1() * U.u0().max_on_grid();
            double R = 10.0;
            const double scale_guess = std::max(c * umax, 1.0);
            while (c * umax * std::pow(R, 2.0 - alpha) / (alpha - 2.0) > 1e-12 * scale_guess && R < 1e12)
                R *= 2.0;
            const int n_theta = 512;
            double acc = 0.0;
            for (int i = 0; i < n_theta; ++i) {
                const double theta = 2.0 * M_PI * i / n_theta;
                const double u0v = U.u0()(theta);
                // radial profile at fixed angle: c1 u0 <r>^{-alpha}
                double lo = 0.0, len = 1.0, acc_r = 0.0;
                while (lo < R) {
                    const double hi = std::min(lo + len, R);
                    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
                    double panel = 0.0;
                    for (const auto& nd : base) {
                        const double r = mid + half * nd.x;
                        const double u = U.c1() * u0v * std::pow(1.0 + r * r, -alpha / 2.0);
                        panel += nd.weight * std::atan(c * u) * r;
                    }
                    acc_r += half * panel;
                    lo = hi;
                    len *= 2.0;
                }
                acc += acc_r;
            }
            acc *= 2.0 * M_PI / n_theta;
            return b0 / (2.0 * M_PI * M_PI) * acc;
        }
        case SymbolU::Kind::gaussian: {
            // beyond eta r^{2 beta} = 46 the integrand is below 1e-20 * c
            const double R = std::pow(46.0 / U.eta(), 1.0 / (2.0 * U.beta())) + 1.0;
            return b0 / (2.0 * M_PI * M_PI) * 2.0 * M_PI * radial_integral(1.0, R);
        }
        case SymbolU::Kind::disc:
            return b0 / (2.0 * M_PI * M_PI) * 2.0 * M_PI * radial_integral(1.0, U.radius());
        case SymbolU::Kind::tabulated: {
            if (!std::isfinite(U.radius()))
                throw std::invalid_argument("xi_semiclassical: tabulated symbol needs a finite support radius");
            const double R = U.radius();
            const int n_theta = 512;
            double acc = 0.0;
            for (int i = 0; i < n_theta; ++i) {
                const double theta = 2.0 * M_PI * i / n_theta;
                double lo = 0.0, len = std::min(1.0, R), acc_r = 0.0;
                while (lo < R) {
                    const double hi = std::min(lo + len, R);
                    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
                    double panel = 0.0;
                    for (const auto& nd : base) {
                        const double r = mid + half * nd.x;
                        panel += nd.weight * std::atan(c * U.value_polar(r, theta)) * r;
                    }
                    acc_r += half * panel;
                    lo = hi;
                    len *= 2.0;
                }
                acc += acc_r;
            }
            acc *= 2.0 * M_PI / n_theta;
            return b0 / (2.0 * M_PI * M_PI) * acc;
        }
    }
    return 0.0;
}

// Corridor record for one energy; for +V the below-threshold SSF vanishes
// identically.
struct SsfCorridor {
    double E = 0.0;
    double epsilon = 0.0;
    double below_lo = 0.0;
    double below_hi = 0.0;
    double above_lo = 0.0;
    double above_hi = 0.0;
    Sign sign = Sign::minus;
};

inline SsfCorridor make_corridor(const EffectiveSpectrum& spec, const Eigen::VectorXd& nu, double E,
                                 double epsilon, Sign sign) {
    SsfCorridor c;
    c.E = E;
    c.epsilon = epsilon;
    c.sign = sign;
    if (sign == Sign::minus) {
        const Corridor below = xi_below(spec, E, epsilon);
        c.below_lo = below.lo;
        c.below_hi = below.hi;
    }
    const Corridor above = xi_above(nu, E, epsilon, sign);
    c.above_lo = above.lo;
    c.above_hi = above.hi;
    return c;
}

// Generalized Levinson sweep: ratio(E) = xi(E; H0 - V) / xi(-E; H0 - V)
// evaluated at the eps -> 0 reference endpoints.  Below the crossover where
// the reduced form agrees with the full block trace to 1%, the reduced form
// is used (one K x K spectrum instead of a 2K x 2K eigensolve per energy).
struct LevinsonRow {
    double E = 0.0;
    double numerator = 0.0;    // xi(E; H0 - V), negative
    double denominator = 0.0;  // xi(-E; H0 - V), negative counting midpoint
    double ratio = 0.0;        // NaN when the denominator count is zero
    bool flagged = false;
    bool used_tilde = false;
};

struct LevinsonResult {
    std::vector<LevinsonRow> rows;
    double predicted = 0.0;
};

inline LevinsonResult levinson_ratio(const EffectiveModel& model, std::span<const double> e_sweep,
                                     double epsilon) {
    for (size_t i = 0; i + 1 < e_sweep.size(); ++i)
        if (!(e_sweep[i] > e_sweep[i + 1]))
            throw std::invalid_argument("levinson_ratio: energy sweep must be strictly decreasing");
    const EffectiveSpectrum spec = model.spectrum();
    LevinsonResult out;
    out.predicted = model.profile().decay.predicted_levinson();
    bool use_tilde = false;
    for (const double E : e_sweep) {
        LevinsonRow row;
        row.E = E;
        const Corridor below = xi_below(spec, E, epsilon);
        row.denominator = 0.5 * (below.lo + below.hi);
        const double tilde = xi_above_tilde(spec, E, Sign::minus);
        if (!use_tilde) {
            const Corridor above = xi_above(model.block_spectrum(E), E, epsilon, Sign::minus);
            row.numerator = 0.5 * (above.lo + above.hi);
            const double gap = std::abs(row.numerator - tilde) / std::max(std::abs(tilde), 1e-300);
            if (gap < 0.01) use_tilde = true;
        } else {
            row.numerator = tilde;
            row.used_tilde = true;
        }
        if (row.denominator == 0.0) {
            row.flagged = true;
            row.ratio = std::numeric_limits<double>::quiet_NaN();
        } else {
            row.ratio = row.numerator / row.denominator;
        }
        out.rows.push_back(row);
    }
    return out;
}

// Constant-field integrated density of states
//   rho_{b0}(E) = (b0 / 2 pi) #{ q >= 0 : 2 b0 q < E }.
// At a Landau level the left limit is returned and the boundary flag set
// (the Heaviside step is undefined at 0).
struct IdsValue {
    double value = 0.0;
    bool at_landau_level = false;
};

inline IdsValue ids_constant_field(double E, double b0) {
    if (!(b0 > 0.0)) throw std::invalid_argument("ids_constant_field: b0 must be positive");
    if (E <= 0.0) return IdsValue{0.0, E == 0.0};
    const double r = E / (2.0 * b0);
    const bool at_level = std::floor(r) == r;
    const double count = std::ceil(r);
    return IdsValue{b0 / (2.0 * M_PI) * count, at_level};
}

}  // namespace zmlab
