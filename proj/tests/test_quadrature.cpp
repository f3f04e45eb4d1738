#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "zmlab/quadrature.hpp"

using namespace zmlab;

TEST_CASE("gauss_laguerre reproduces factorial moments") {
    // int t^k e^{-t} dt = k!, exact for polynomial degree <= 2n - 1
    const auto rule = gauss_laguerre(24);
    double fact = 1.0;
    for (int k = 0; k <= 47; ++k) {
        if (k > 0) fact *= k;
        double acc = 0.0;
        for (const auto& nd : rule) acc += nd.weight * std::pow(nd.t, k);
        INFO("k = " << k);
        CHECK(acc == Catch::Approx(fact).epsilon(5e-12));
    }
}

TEST_CASE("gauss_laguerre log weights stay accurate far into the tail") {
    // log-domain moments from a large rule: the far nodes carry weights
    // below the double underflow threshold and must still combine to k!
    const auto rule = gauss_laguerre(160);
    for (int k : {63, 100, 127}) {
        double acc = 0.0;
        const double lg = std::lgamma(k + 1.0);
        for (const auto& nd : rule) acc += std::exp(nd.log_weight + k * std::log(nd.t) - lg);
        INFO("k = " << k);
        CHECK(acc == Catch::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("gauss_laguerre weights sum to one with finite log weights") {
    for (int n : {1, 5, 40, 200}) {
        const auto rule = gauss_laguerre(n);
        REQUIRE(rule.size() == static_cast<size_t>(n));
        double sum = 0.0;
        for (const auto& nd : rule) {
            CHECK(nd.t > 0.0);
            CHECK(nd.weight >= 0.0);  // far-tail weights underflow to 0
            CHECK(std::isfinite(nd.log_weight));
            sum += nd.weight;
        }
        CHECK(sum == Catch::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("gauss_laguerre matches reference nodes and weights") {
    // n = 5 rule, reference values from the classical tables
    const auto rule = gauss_laguerre(5);
    const double nodes[5] = {0.26356031971814091020, 1.4134030591065167922, 3.5964257710407220812,
                             7.0858100058588375569, 12.640800844275782659};
    const double weights[5] = {0.52175561058280865248, 0.39866681108317592745,
                               0.075942449681707595390, 0.0036117586799220484545,
                               0.000023369972385776227891};
    for (int i = 0; i < 5; ++i) {
        CHECK(rule[i].t == Catch::Approx(nodes[i]).epsilon(1e-14));
        CHECK(rule[i].weight == Catch::Approx(weights[i]).epsilon(1e-13));
    }
}

TEST_CASE("gauss_legendre integrates monomials on [-1,1]") {
    const auto rule = gauss_legendre(16);
    for (int k = 0; k <= 31; ++k) {
        double acc = 0.0;
        for (const auto& nd : rule) acc += nd.weight * std::pow(nd.x, k);
        const double exact = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
        INFO("k = " << k);
        CHECK(acc == Catch::Approx(exact).margin(1e-14));
    }
}

TEST_CASE("gauss_legendre maps to arbitrary intervals") {
    const auto rule = gauss_legendre(12, 0.0, 3.0);
    double acc = 0.0;
    for (const auto& nd : rule) acc += nd.weight * nd.x * nd.x;
    CHECK(acc == Catch::Approx(9.0).epsilon(1e-13));
}

TEST_CASE("uniform angular grid kills nonzero harmonics below the bandwidth") {
    const int n = 37;
    for (int m = 1; m < n; ++m) {
        std::complex<double> acc(0.0, 0.0);
        for (int j = 0; j < n; ++j) acc += std::polar(1.0, 2.0 * M_PI * m * j / n);
        CHECK(std::abs(acc) < 1e-11);
    }
}

TEST_CASE("quadrature rule validation") {
    CHECK_THROWS_AS(gauss_laguerre(0), std::invalid_argument);
    CHECK_THROWS_AS(QuadratureRule(gauss_laguerre(4), 3), std::invalid_argument);
    CHECK_THROWS_AS(QuadratureRule({}, 8), std::invalid_argument);
    CHECK_THROWS_AS(QuadratureRule({RadialNode{1.0, -0.5}}, 8), std::invalid_argument);
}
