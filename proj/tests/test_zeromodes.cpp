#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "zmlab/zeromodes.hpp"

using namespace zmlab;

namespace {

MagneticField cosine_field(double b0, const Vec2& lambda, double q) {
    return MagneticField(b0, {{lambda, {q, 0.0}}, {-lambda, {q, 0.0}}});
}

}  // namespace

TEST_CASE("phi_k values at the origin") {
    CHECK(std::abs(phi_k(2.0, 0, Vec2(0, 0)) - std::sqrt(1.0 / M_PI)) < 1e-15);
    for (int k = 1; k < 5; ++k) CHECK(std::abs(phi_k(2.0, k, Vec2(0, 0))) == 0.0);
}

TEST_CASE("phi_k at unit radius matches the closed form") {
    // b0 = 2, k = 1: sqrt(b0/(2 pi)) (b0/2)^{1/2} r e^{-b0 r^2/4} = sqrt(1/pi) e^{-1/2}
    const std::complex<double> v = phi_k(2.0, 1, Vec2(1.0, 0.0));
    CHECK(v.real() == Catch::Approx(std::sqrt(1.0 / M_PI) * std::exp(-0.5)).epsilon(1e-14));
    CHECK(std::abs(v.imag()) < 1e-16);
    // phase carries k * theta
    const std::complex<double> w = phi_k(2.0, 3, Vec2(0.0, 1.0));  // theta = pi/2
    CHECK(std::arg(w) == Catch::Approx(3.0 * M_PI / 2.0 - 2.0 * M_PI).margin(1e-12));
}

TEST_CASE("phi_k is overflow-safe at large k") {
    // naive (b0/2)^{k/2} r^k / sqrt(k!) overflows near k ~ 170
    const int k = 400;
    const double r = std::sqrt(2.0 * k / 2.0);
    const std::complex<double> v = phi_k(2.0, k, Vec2(r, 0.0));
    CHECK(std::isfinite(v.real()));
    CHECK(std::abs(v) > 1e-3);  // near the mass peak of phi_k
}

TEST_CASE("phi_k norm identity: sum of |phi_k|^2 equals b0/2pi") {
    for (double b0 : {1.0, 2.0}) {
        for (double r : {0.0, 0.8, 2.0}) {
            double acc = 0.0;
            for (int k = 0; k < 200; ++k) acc += std::norm(phi_k(b0, k, Vec2(r, 0.3)));
            CHECK(acc == Catch::Approx(b0 / (2.0 * M_PI)).epsilon(1e-12));
        }
    }
}

TEST_CASE("constant-field gram is the identity") {
    for (int K : {8, 64}) {
        const QuadratureRule rule(gauss_laguerre(2 * K + 32), 4 * K + 16);
        const Eigen::MatrixXcd G = gram_matrix(MagneticField(2.0), K, rule);
        const double dev = (G - Eigen::MatrixXcd::Identity(K, K)).cwiseAbs().maxCoeff();
        CHECK(dev < 1e-10);
    }
}

TEST_CASE("coefficient-zero modes reproduce the empty-charge gram") {
    const MagneticField f(2.0, {{Vec2(1, 0), {0, 0}}, {Vec2(-1, 0), {0, 0}}});
    const QuadratureRule rule(gauss_laguerre(48), 48);
    const Eigen::MatrixXcd G = gram_matrix(f, 8, rule);
    CHECK((G - Eigen::MatrixXcd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("gram is Hermitian and matches a brute-force Cartesian oracle") {
    const MagneticField f = cosine_field(1.0, Vec2(1.0, 0.0), 0.15);
    const QuadratureRule rule(gauss_laguerre(48), 64);
    const Eigen::MatrixXcd G = gram_matrix(f, 4, rule);
    CHECK((G - G.adjoint()).cwiseAbs().maxCoeff() < 1e-12 * G.cwiseAbs().maxCoeff());
    const Eigen::MatrixXcd B = oracles::brute_force_gram(f, 4, 12.0, 0.02);
    CHECK((G - B).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("gram eigenvalues sit inside the oscillation bounds") {
    const MagneticField f = cosine_field(2.0, Vec2(1.0, 0.0), 0.5);
    ZeroModeBasis basis(f, 48);
    const OscEstimate osc = osc_phitilde(f, 2.0 * M_PI, 512);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(basis.gram(), Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues()(0) >= std::exp(-2.0 * osc.sup) - 1e-6);
    CHECK(es.eigenvalues()(47) <= std::exp(-2.0 * osc.inf) + 1e-6);
}

TEST_CASE("whiten of the identity is the identity") {
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(5, 5);
    CHECK((whiten(I) - I).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("whiten of diag(4,1) is diag(1/2,1)") {
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(2, 2);
    G(0, 0) = 4.0;
    G(1, 1) = 1.0;
    const Eigen::MatrixXcd R = whiten(G);
    CHECK(std::abs(R(0, 0) - 0.5) < 1e-14);
    CHECK(std::abs(R(1, 1) - 1.0) < 1e-14);
    CHECK(std::abs(R(0, 1)) < 1e-15);
}

TEST_CASE("whiten of [[2,1],[1,2]] matches the hand eigendecomposition") {
    // eigenpairs: 3 on (1,1)/sqrt(2), 1 on (1,-1)/sqrt(2)
    Eigen::MatrixXcd G(2, 2);
    G << 2.0, 1.0, 1.0, 2.0;
    const Eigen::MatrixXcd R = whiten(G);
    const double a = 0.5 * (1.0 / std::sqrt(3.0) + 1.0);
    const double b = 0.5 * (1.0 / std::sqrt(3.0) - 1.0);
    CHECK(std::abs(R(0, 0) - a) < 1e-14);
    CHECK(std::abs(R(1, 1) - a) < 1e-14);
    CHECK(std::abs(R(0, 1) - b) < 1e-14);
    CHECK((R * G * R - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-13);
}

TEST_CASE("whiten rejects a near-singular gram") {
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Identity(2, 2);
    G(1, 1) = 1e-14;
    CHECK_THROWS_AS(whiten(G), NearSingularGram);
}

TEST_CASE("whitening residual rho gram rho = I within 1e-10") {
    const MagneticField f = cosine_field(2.0, Vec2(1.0, 0.5), 0.4);
    ZeroModeBasis basis(f, 32);
    const int K = basis.K();
    const Eigen::MatrixXcd resid =
        basis.whiten() * basis.gram() * basis.whiten() - Eigen::MatrixXcd::Identity(K, K);
    CHECK(resid.norm() / std::sqrt(static_cast<double>(K)) < 1e-10);
}

TEST_CASE("psi equals phi at constant field") {
    ZeroModeBasis basis(MagneticField(2.0), 12);
    for (int j : {0, 3, 11}) {
        for (const Vec2& x : {Vec2(0.1, 0.2), Vec2(-1.0, 0.7)}) {
            CHECK(std::abs(basis.psi(j, x) - phi_k(2.0, j, x)) < 1e-10);
        }
    }
    CHECK_THROWS_AS(basis.psi(-1, Vec2(0, 0)), std::invalid_argument);
    CHECK_THROWS_AS(basis.psi(12, Vec2(0, 0)), std::invalid_argument);
}

TEST_CASE("psi family is orthonormal under an independent quadrature route") {
    // evaluate psi_j pointwise on the product rule and form the Gram matrix
    // directly; independent of the polar table assembly
    const MagneticField f = cosine_field(1.0, Vec2(1.0, 0.0), 0.3);
    const int K = 12;
    ZeroModeBasis basis(f, K);
    const int nr = 64, na = 72;
    const auto radial = gauss_laguerre(nr);
    Eigen::MatrixXcd B(nr * na, K);
    for (int i = 0; i < nr; ++i) {
        const double r = std::sqrt(2.0 * radial[i].t / f.b0());
        // bare weight: log_weight + t restores the e^{-t}-free measure
        const double sw = std::sqrt(2.0 * M_PI / (na * f.b0())) *
                          std::exp(0.5 * (radial[i].log_weight + radial[i].t));
        for (int m = 0; m < na; ++m) {
            const double theta = 2.0 * M_PI * m / na;
            const Vec2 x(r * std::cos(theta), r * std::sin(theta));
            for (int j = 0; j < K; ++j) B(i * na + m, j) = sw * basis.psi(j, x);
        }
    }
    const Eigen::MatrixXcd G = B.adjoint() * B;
    CHECK((G - Eigen::MatrixXcd::Identity(K, K)).norm() < 1e-8);
}

TEST_CASE("kernel diagonal at constant field equals b0/2pi") {
    for (double b0 : {1.0, 2.0}) {
        ZeroModeBasis basis(MagneticField(b0), 64);
        for (int i = 0; i < 20; ++i) {
            const double r = basis.radius() * std::sqrt((i + 0.5) / 20.0);
            const double th = 2.39996 * i;
            const double v = basis.kernel_diag(Vec2(r * std::cos(th), r * std::sin(th)));
            CHECK(v == Catch::Approx(b0 / (2.0 * M_PI)).epsilon(1e-8));
        }
    }
}

TEST_CASE("kernel diagonal honors the two-sided oscillation bound") {
    const MagneticField f = cosine_field(2.0, Vec2(1.0, 0.0), 1.0);
    ZeroModeBasis basis(f, 96);
    const OscEstimate osc = osc_phitilde(f, 2.0 * M_PI, 512);
    const double scale = f.b0() / (2.0 * M_PI);
    const double tol = 1e-4 * scale;
    for (int i = 0; i < 50; ++i) {
        const double r = basis.radius() * std::sqrt((i + 0.5) / 50.0);
        const double th = 2.39996 * i;
        const double v = basis.kernel_diag(Vec2(r * std::cos(th), r * std::sin(th)));
        CHECK(v >= scale * std::exp(-2.0 * osc.osc) - tol);
        CHECK(v <= scale * std::exp(2.0 * osc.osc) + tol);
    }
}

TEST_CASE("kernel evaluation outside R(K) is rejected") {
    ZeroModeBasis basis(MagneticField(2.0), 64);
    CHECK(basis.radius() == Catch::Approx(4.0));
    CHECK_THROWS_AS(basis.kernel_diag(Vec2(4.1, 0.0)), EvaluationRadiusExceeded);
    CHECK(eval_radius(36, 1.0) == 0.0);  // K - 6 sqrt(K) <= 0 clamps to zero
}

TEST_CASE("kernel diagonal is truncation-stable under K -> 1.25 K") {
    const MagneticField f = cosine_field(2.0, Vec2(1.0, 0.0), 0.5);
    ZeroModeBasis basis(f, 64);
    ZeroModeBasis bigger(f, 80);
    for (int i = 0; i < 10; ++i) {
        const double r = basis.radius() * std::sqrt((i + 0.5) / 10.0);
        const double th = 2.39996 * i;
        const Vec2 x(r * std::cos(th), r * std::sin(th));
        const double a = basis.kernel_diag(x), b = bigger.kernel_diag(x);
        CHECK(std::abs(a - b) / b < 1e-6);
    }
}

TEST_CASE("basis rejects invalid truncation") {
    CHECK_THROWS_AS(ZeroModeBasis(MagneticField(1.0), 0), std::invalid_argument);
}
