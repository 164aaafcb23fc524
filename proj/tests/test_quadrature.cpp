#include <doctest.h>

#include <cmath>
#include <numbers>

#include "uvclt/quadrature.hpp"

using namespace uvclt;

TEST_SUITE_BEGIN("quadrature");

TEST_CASE("weights integrate the Gaussian weight exactly") {
    for (int n : {1, 2, 5, 16, 40, 64, 96, 128}) {
        const auto rule = gauss_hermite(n);
        double mass = 0.0, second = 0.0;
        for (int i = 0; i < n; ++i) {
            mass += rule.weights[i];
            second += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
        }
        CHECK(mass == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
        if (n >= 2) {
            CHECK(second == doctest::Approx(0.5 * std::sqrt(std::numbers::pi)).epsilon(1e-11));
        }
    }
}

TEST_CASE("nodes are symmetric and ascending") {
    const auto rule = gauss_hermite(33);
    for (int i = 0; i + 1 < 33; ++i) CHECK(rule.nodes[i] < rule.nodes[i + 1]);
    for (int i = 0; i < 16; ++i) {
        CHECK(rule.nodes[i] == doctest::Approx(-rule.nodes[32 - i]).epsilon(1e-13));
    }
    CHECK(rule.nodes[16] == 0.0);
}

TEST_CASE("two node counts agree on E cos(Z)") {
    // E cos(Z) = exp(-1/2) for standard normal Z.
    const double expected = std::exp(-0.5);
    for (int n : {40, 96}) {
        const auto rule = gauss_hermite(n);
        double acc = 0.0, mass = 0.0;
        for (int i = 0; i < n; ++i) {
            acc += rule.weights[i] * std::cos(std::sqrt(2.0) * rule.nodes[i]);
            mass += rule.weights[i];
        }
        CHECK(acc / mass == doctest::Approx(expected).epsilon(1e-13));
    }
}

TEST_CASE("pairwise sum matches plain sum on benign data") {
    std::vector<double> v(1000);
    for (int i = 0; i < 1000; ++i) v[i] = 1.0 / (i + 1);
    double plain = 0.0;
    for (double x : v) plain += x;
    CHECK(pairwise_sum(v) == doctest::Approx(plain).epsilon(1e-14));
}

TEST_SUITE_END();
