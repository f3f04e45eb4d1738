#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace zmlab {

using Vec2 = Eigen::Vector2d;

// One atom of the Fourier charge behind the background field:
// contributes coefficient * e^{i frequency . x} to btilde.
struct FourierMode {
    Vec2 frequency;
    std::complex<double> coefficient;
};

// Admissible field b = b0 + btilde with constant mean b0 > 0 and a finite
// atomic Fourier charge.  The charge must pair every mode (lambda, c) with
// (-lambda, conj(c)) so that btilde is real-valued, and no frequency may
// vanish or repeat.
class MagneticField {
  public:
    explicit MagneticField(double b0, std::vector<FourierMode> modes = {})
        : b0_(b0), modes_(std::move(modes)) {
        if (!(b0_ > 0.0)) throw std::invalid_argument("MagneticField: b0 must be positive");
        for (const auto& m : modes_) {
            if (m.frequency.x() == 0.0 && m.frequency.y() == 0.0)
                throw std::invalid_argument("MagneticField: zero frequency is not allowed");
        }
        auto same = [](const Vec2& a, const Vec2& b) { return a.x() == b.x() && a.y() == b.y(); };
        for (size_t i = 0; i < modes_.size(); ++i)
            for (size_t j = i + 1; j < modes_.size(); ++j)
                if (same(modes_[i].frequency, modes_[j].frequency))
                    throw std::invalid_argument("MagneticField: duplicate frequency");
        for (const auto& m : modes_) {
            bool paired = false;
            for (const auto& p : modes_) {
                if (same(p.frequency, -m.frequency) && p.coefficient == std::conj(m.coefficient)) {
                    paired = true;
                    break;
                }
            }
            if (!paired)
                throw std::invalid_argument(
                    "MagneticField: every mode (lambda, c) needs its Hermitian partner (-lambda, conj(c))");
        }
    }

    double b0() const { return b0_; }
    const std::vector<FourierMode>& modes() const { return modes_; }
    bool constant() const { return modes_.empty(); }

    double max_frequency() const {
        double m = 0.0;
        for (const auto& md : modes_) m = std::max(m, md.frequency.norm());
        return m;
    }
    double min_frequency() const {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& md : modes_) m = std::min(m, md.frequency.norm());
        return modes_.empty() ? 0.0 : m;
    }

  private:
    double b0_;
    std::vector<FourierMode> modes_;
};

namespace detail {

// Finite charge sum  sum_n scale(lambda_n) c_n e^{i lambda_n . x}.  By the
// Hermitian pairing the imaginary part cancels to rounding; callers return
// the real part.
template <typename Scale>
std::complex<double> charge_sum(const MagneticField& field, const Vec2& x, Scale scale) {
    std::complex<double> acc(0.0, 0.0);
    for (const auto& m : field.modes()) {
        const double phase = m.frequency.dot(x);
        acc += scale(m.frequency) * m.coefficient * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    return acc;
}

inline std::complex<double> btilde_complex(const MagneticField& field, const Vec2& x) {
    return charge_sum(field, x, [](const Vec2&) { return 1.0; });
}

inline std::complex<double> phitilde_complex(const MagneticField& field, const Vec2& x) {
    return charge_sum(field, x, [](const Vec2& lambda) { return -1.0 / lambda.squaredNorm(); });
}

}  // namespace detail

// btilde(x) = sum_n c_n e^{i lambda_n . x}
inline double eval_btilde(const MagneticField& field, const Vec2& x) {
    return detail::btilde_complex(field, x).real();
}

// Poisson solution phitilde(x) = -sum_n |lambda_n|^{-2} c_n e^{i lambda_n . x},
// so that Laplacian(phitilde) = btilde for every finite charge.
inline double eval_phitilde(const MagneticField& field, const Vec2& x) {
    return detail::phitilde_complex(field, x).real();
}

// phi = phi0 + phitilde with phi0 = b0 |x|^2 / 4.
struct PotentialSample {
    Vec2 point;
    double btilde;
    double phitilde;
    double phi;
};

inline PotentialSample sample_potentials(const MagneticField& field, const Vec2& x) {
    const double pt = eval_phitilde(field, x);
    return PotentialSample{x, eval_btilde(field, x), pt, field.b0() * x.squaredNorm() / 4.0 + pt};
}

struct OscEstimate {
    double inf = 0.0;
    double sup = 0.0;
    double osc = 0.0;
};

// Grid estimate of osc phitilde = sup - inf over [-radius, radius]^2.
// The paper's sup/inf range over all of R^2; for periodic backgrounds one
// period suffices, for genuinely almost periodic ones this is an estimate.
inline OscEstimate osc_phitilde(const MagneticField& field, double radius, int grid_density) {
    if (!(radius > 0.0)) throw std::invalid_argument("osc_phitilde: radius must be positive");
    if (grid_density < 2) throw std::invalid_argument("osc_phitilde: grid_density must be >= 2");
    if (field.constant()) return OscEstimate{};
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    const double h = 2.0 * radius / (grid_density - 1);
    for (int i = 0; i < grid_density; ++i) {
        for (int j = 0; j < grid_density; ++j) {
            const double v = eval_phitilde(field, Vec2(-radius + i * h, -radius + j * h));
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    return OscEstimate{lo, hi, hi - lo};
}

// Default osc grid radius: one period of the coarsest mode.
inline double default_osc_radius(const MagneticField& field) {
    if (field.constant()) return 1.0;
    return 2.0 * M_PI / field.min_frequency();
}

// Spectral gap constant: the interval (0, C) is free of spectrum of the
// transverse operator, C = 2 b0 exp(-2 osc phitilde).
inline double gap_constant(const MagneticField& field, double osc) {
    if (!(osc >= 0.0)) throw std::invalid_argument("gap_constant: osc must be nonnegative");
    return 2.0 * field.b0() * std::exp(-2.0 * osc);
}

}  // namespace zmlab
