#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "zmlab/field.hpp"

using namespace zmlab;

namespace {

// single-cosine background 2 q cos(lambda . x)
MagneticField cosine_field(double b0, const Vec2& lambda, double q = 1.0) {
    return MagneticField(b0, {{lambda, {q, 0.0}}, {-lambda, {q, 0.0}}});
}

// random Hermitian-paired finite charge; moderate frequencies and
// amplitudes keep |phitilde| of order one
MagneticField random_field(std::mt19937_64& rng, double b0, int pairs) {
    std::uniform_real_distribution<double> freq(-1.5, 1.5), coef(-0.2, 0.2);
    std::vector<FourierMode> modes;
    for (int i = 0; i < pairs; ++i) {
        Vec2 lambda(freq(rng), freq(rng));
        if (lambda.norm() < 0.7) lambda = Vec2(0.8 + 0.1 * i, 0.3);
        const std::complex<double> c(coef(rng), coef(rng));
        modes.push_back({lambda, c});
        modes.push_back({-lambda, std::conj(c)});
    }
    return MagneticField(b0, std::move(modes));
}

}  // namespace

TEST_CASE("btilde of the empty charge vanishes") {
    const MagneticField f(1.5);
    CHECK(eval_btilde(f, Vec2(0.3, -2.0)) == 0.0);
    CHECK(eval_phitilde(f, Vec2(0.3, -2.0)) == 0.0);
}

TEST_CASE("btilde of a cosine pair") {
    const MagneticField f = cosine_field(1.0, Vec2(1.0, 0.0));
    CHECK(eval_btilde(f, Vec2(0.0, 0.0)) == Catch::Approx(2.0).epsilon(1e-14));
    CHECK(eval_btilde(f, Vec2(M_PI / 3.0, 0.0)) == Catch::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("phitilde of cosine pairs scales with the inverse frequency square") {
    const MagneticField f1 = cosine_field(1.0, Vec2(1.0, 0.0));
    CHECK(eval_phitilde(f1, Vec2(0.0, 0.0)) == Catch::Approx(-2.0).epsilon(1e-14));
    const MagneticField f2 = cosine_field(1.0, Vec2(2.0, 0.0));
    CHECK(eval_phitilde(f2, Vec2(0.0, 0.0)) == Catch::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("field invariants are enforced") {
    CHECK_THROWS_AS(MagneticField(0.0), std::invalid_argument);
    CHECK_THROWS_AS(MagneticField(-1.0), std::invalid_argument);
    // zero frequency
    CHECK_THROWS_AS(MagneticField(1.0, {{Vec2(0, 0), {1, 0}}}), std::invalid_argument);
    // missing Hermitian partner
    CHECK_THROWS_AS(MagneticField(1.0, {{Vec2(1, 0), {1, 0}}}), std::invalid_argument);
    // partner with wrong coefficient
    CHECK_THROWS_AS(MagneticField(1.0, {{Vec2(1, 0), {0, 1}}, {Vec2(-1, 0), {0, 1}}}),
                    std::invalid_argument);
    // duplicate frequency
    CHECK_THROWS_AS(
        MagneticField(1.0, {{Vec2(1, 0), {1, 0}}, {Vec2(1, 0), {1, 0}}, {Vec2(-1, 0), {1, 0}}}),
        std::invalid_argument);
    // self-conjugate pair at +-lambda is fine
    CHECK_NOTHROW(MagneticField(1.0, {{Vec2(1, 0), {0.5, 0.25}}, {Vec2(-1, 0), {0.5, -0.25}}}));
}

TEST_CASE("imaginary residue of the evaluators is at rounding level") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> pos(-4.0, 4.0);
    for (int trial = 0; trial < 20; ++trial) {
        const MagneticField f = random_field(rng, 2.0, 4);
        const Vec2 x(pos(rng), pos(rng));
        const auto b = detail::btilde_complex(f, x);
        const auto p = detail::phitilde_complex(f, x);
        const double bscale = std::max(std::abs(b), 1.0);
        const double pscale = std::max(std::abs(p), 1.0);
        CHECK(std::abs(b.imag()) <= 1e-12 * bscale);
        CHECK(std::abs(p.imag()) <= 1e-12 * pscale);
    }
}

TEST_CASE("Poisson residual: finite-difference Laplacian of phitilde matches btilde") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> pos(-2.0, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        const MagneticField f = random_field(rng, 1.0, 3);
        const double h = 1e-4 / std::max(f.max_frequency(), 1.0);
        for (int pt = 0; pt < 5; ++pt) {
            const Vec2 x(pos(rng), pos(rng));
            const double lap = (eval_phitilde(f, x + Vec2(h, 0)) + eval_phitilde(f, x - Vec2(h, 0)) +
                                eval_phitilde(f, x + Vec2(0, h)) + eval_phitilde(f, x - Vec2(0, h)) -
                                4.0 * eval_phitilde(f, x)) /
                               (h * h);
            CHECK(lap == Catch::Approx(eval_btilde(f, x)).margin(1e-6));
        }
    }
}

TEST_CASE("potential sample satisfies phi = phi0 + phitilde") {
    const MagneticField f = cosine_field(2.0, Vec2(1.0, 1.0));
    const Vec2 x(0.7, -1.3);
    const PotentialSample s = sample_potentials(f, x);
    CHECK(s.phi == Catch::Approx(2.0 * x.squaredNorm() / 4.0 + s.phitilde).epsilon(1e-15));
    CHECK(s.btilde == Catch::Approx(eval_btilde(f, x)));
}

TEST_CASE("osc of the empty charge is exactly zero") {
    const MagneticField f(1.0);
    const OscEstimate o = osc_phitilde(f, 1.0, 16);
    CHECK(o.inf == 0.0);
    CHECK(o.sup == 0.0);
    CHECK(o.osc == 0.0);
}

TEST_CASE("osc of single-cosine backgrounds matches 4/|lambda|^2") {
    const MagneticField f1 = cosine_field(2.0, Vec2(1.0, 0.0));
    const OscEstimate o1 = osc_phitilde(f1, 2.0 * M_PI, 512);
    CHECK(o1.osc == Catch::Approx(4.0).epsilon(1e-3));
    const MagneticField f2 = cosine_field(2.0, Vec2(2.0, 0.0));
    const OscEstimate o2 = osc_phitilde(f2, 2.0 * M_PI, 512);
    CHECK(o2.osc == Catch::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("osc argument validation") {
    const MagneticField f = cosine_field(1.0, Vec2(1.0, 0.0));
    CHECK_THROWS_AS(osc_phitilde(f, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(osc_phitilde(f, -1.0, 16), std::invalid_argument);
}

TEST_CASE("gap constant") {
    CHECK(gap_constant(MagneticField(1.0), 0.0) == Catch::Approx(2.0));
    CHECK(gap_constant(MagneticField(2.0), 0.0) == Catch::Approx(4.0));
    CHECK(gap_constant(MagneticField(1.0), 1.0) == Catch::Approx(2.0 * std::exp(-2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(gap_constant(MagneticField(1.0), -0.1), std::invalid_argument);
    // monotone decreasing in osc, linear in b0
    double prev = gap_constant(MagneticField(1.0), 0.0);
    for (double osc : {0.25, 0.5, 1.0, 2.0}) {
        const double v = gap_constant(MagneticField(1.0), osc);
        CHECK(v < prev);
        prev = v;
        CHECK(gap_constant(MagneticField(3.0), osc) == Catch::Approx(3.0 * v).epsilon(1e-13));
    }
}

TEST_CASE("default osc radius covers the coarsest period") {
    const MagneticField f = cosine_field(1.0, Vec2(0.5, 0.0));
    CHECK(default_osc_radius(f) == Catch::Approx(4.0 * M_PI));
}
