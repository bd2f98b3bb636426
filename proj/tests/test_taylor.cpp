#include <doctest.h>

#include <cmath>
#include <random>

#include "specho/numerics.hpp"
#include "specho/taylor_fit.hpp"

using namespace specho;

TEST_CASE("log model fit: exact trunk instance tau = 2 ln|u| + 3") {
    auto us = num::log_spaced(1e-2, 1e-5, 48);
    std::vector<double> u, tau;
    for (double d : us) {
        u.push_back(-d); // samples below the critical value
        tau.push_back(2.0 * std::log(d) + 3.0);
    }
    auto fit = fit_log_model(u, tau);
    CHECK_FALSE(fit.flipped);
    CHECK(fit.log_coeffs[0] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(fit.smooth_coeffs[0] == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(std::abs(fit.log_coeffs[1]) < 1e-6);
    CHECK(fit.residual < 1e-10);
}

TEST_CASE("log model fit: tau = 2(1+u) ln|u| + 3 + u recovers both series") {
    auto us = num::log_spaced(5e-2, 1e-5, 60);
    std::vector<double> u, tau;
    for (double d : us) {
        u.push_back(d);
        tau.push_back(2.0 * (1.0 + d) * std::log(d) + 3.0 + d);
    }
    auto rec = extract_taylor(u, tau, 2.0);
    CHECK(rec.f_prime[0] == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(rec.f_prime[1] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(std::abs(rec.f_prime[2]) < 1e-2);
    CHECK(rec.h[0] == doctest::Approx(3.0).epsilon(1e-7));
    CHECK(rec.h[1] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("sign normalization flips physically growing periods") {
    // a period diverging to +infinity at u -> 0 has a negative raw log coefficient
    auto us = num::log_spaced(1e-2, 1e-5, 48);
    std::vector<double> u, tau;
    for (double d : us) {
        u.push_back(d);
        tau.push_back(-1.4 * std::log(d) + 5.0);
    }
    auto fit = fit_log_model(u, tau);
    CHECK(fit.flipped);
    CHECK(fit.log_coeffs[0] == doctest::Approx(1.4).epsilon(1e-9));
    CHECK(fit.smooth_coeffs[0] == doctest::Approx(-5.0).epsilon(1e-9));
}

TEST_CASE("g recovery inverts the weight construction exactly") {
    // Build tau from a known (alpha, f-hat, g) and check extract_taylor returns g.
    // f(u) = alpha u + f2 u^2 + f3 u^3; tau = factor f' ln|u| + h with
    // h = factor f' ln|f/u| + f' (g o f).
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> pick(-0.6, 0.6);
    for (int trial = 0; trial < 20; ++trial) {
        const double alpha = 0.7 + 0.4 * std::abs(pick(rng));
        const double f2 = pick(rng), f3 = pick(rng);
        const double g0 = 1.0 + pick(rng), g1 = pick(rng), g2 = pick(rng);
        const double factor = (trial % 2 == 0) ? 2.0 : 1.0;
        auto f = [&](double u) { return alpha * u + f2 * u * u + f3 * u * u * u; };
        auto fp = [&](double u) { return alpha + 2 * f2 * u + 3 * f3 * u * u; };
        auto g = [&](double q) { return g0 + g1 * q + g2 * q * q; };
        auto us = num::log_spaced(3e-2, 1e-5, 80);
        std::vector<double> u, tau;
        for (double d : us) {
            u.push_back(d);
            tau.push_back(fp(d) * (factor * std::log(std::abs(f(d))) + g(f(d))));
        }
        auto rec = extract_taylor(u, tau, factor);
        CHECK(rec.f_prime[0] == doctest::Approx(alpha).epsilon(5e-4));
        CHECK(rec.g[0] == doctest::Approx(g0).epsilon(5e-3));
        CHECK(rec.g[1] == doctest::Approx(g1).epsilon(0.05).scale(1.0));
    }
}

TEST_CASE("ill-conditioned fit windows are rejected") {
    // samples spanning a factor of 1.1 in u cannot separate ln u from polynomials
    std::vector<double> u, tau;
    for (int i = 0; i < 30; ++i) {
        const double d = 1e-3 * (1.0 + 0.1 * i / 29.0);
        u.push_back(d);
        tau.push_back(-std::log(d) + 2.0);
    }
    CHECK_THROWS_AS(fit_log_model(u, tau), PrecisionError);
}

TEST_CASE("flatness: smooth data fits the pure polynomial model 10x better") {
    // tau smooth (no log part): residual of the log-model fit should attribute
    // essentially nothing to the log basis.
    auto us = num::log_spaced(1e-1, 1e-4, 50);
    std::vector<double> u, tau;
    for (double d : us) {
        u.push_back(d);
        tau.push_back(4.0 + 2.0 * d - d * d);
    }
    auto fit = fit_log_model(u, tau);
    CHECK(std::abs(fit.log_coeffs[0]) < 1e-8);
    CHECK(fit.residual < 1e-10);
}
