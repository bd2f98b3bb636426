#include <doctest.h>

#include <cmath>
#include <random>

#include "specho/numerics.hpp"
#include "specho/series.hpp"

using namespace specho;

TEST_CASE("gauss-kronrod adaptive integration") {
    CHECK(num::integrate([](double x) { return std::sin(x); }, 0.0, M_PI) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(num::integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0) ==
          doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
    // integrable log singularity at the endpoint
    CHECK(num::integrate([](double x) { return std::log(x); }, 0.0, 1.0, 1e-10, 1e-13) ==
          doctest::Approx(-1.0).epsilon(1e-8));
}

TEST_CASE("brent root finding") {
    const double r = num::brent([](double x) { return x * x - 2.0; }, 0.0, 2.0);
    CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(num::brent([](double x) { return x * x + 1.0; }, -1.0, 1.0), UsageError);

    auto roots = num::roots_on_grid([](double x) { return std::sin(x); }, 0.5, 7.0, 200);
    REQUIRE(roots.size() == 2);
    CHECK(roots[0] == doctest::Approx(M_PI).epsilon(1e-12));
    CHECK(roots[1] == doctest::Approx(2 * M_PI).epsilon(1e-12));
}

TEST_CASE("cubic spline reproduces smooth functions and derivatives") {
    std::vector<double> x, y;
    for (int i = 0; i <= 60; ++i) {
        const double t = i / 60.0 * 2.0;
        x.push_back(t);
        y.push_back(std::sin(t) + 0.3 * t * t);
    }
    num::CubicSpline s(x, y);
    for (double t : {0.31, 0.77, 1.13, 1.62}) {
        CHECK(s(t) == doctest::Approx(std::sin(t) + 0.3 * t * t).epsilon(1e-6));
        CHECK(s(t, 1) == doctest::Approx(std::cos(t) + 0.6 * t).epsilon(1e-4));
        CHECK(s(t, 2) == doctest::Approx(-std::sin(t) + 0.6).epsilon(2e-2));
    }
}

TEST_CASE("linear fit slope statistics") {
    Eigen::VectorXd x(6), y(6);
    for (int i = 0; i < 6; ++i) {
        x[i] = i;
        y[i] = 3.0 + 2.0 * i;
    }
    auto f = num::linear_fit(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(3.0));
    CHECK(f.t_stat > 1e6); // exact line

    // pure noise: slope should not be significant
    std::mt19937 rng(7);
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::VectorXd ry(6);
    for (int i = 0; i < 6; ++i) ry[i] = n(rng);
    CHECK(std::abs(num::linear_fit(x, ry).t_stat) < 4.0);
}

TEST_CASE("polyfit recovers polynomial coefficients") {
    Eigen::VectorXd x(20), y(20);
    for (int i = 0; i < 20; ++i) {
        x[i] = -1.0 + 2.0 * i / 19.0;
        y[i] = 1.0 - 0.5 * x[i] + 0.25 * x[i] * x[i];
    }
    auto c = num::polyfit(x, y, 2);
    CHECK(c[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c[1] == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(c[2] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("series algebra: multiply, compose, revert") {
    using namespace specho::series;
    const Coeffs a = make(1.0, 2.0, 3.0, 4.0);
    const Coeffs b = make(2.0, -1.0, 0.5, 0.0);
    const Coeffs ab = mul(a, b);
    CHECK(ab[0] == doctest::Approx(2.0));
    CHECK(ab[1] == doctest::Approx(3.0));   // 1*(-1) + 2*2
    CHECK(ab[2] == doctest::Approx(4.5));   // 0.5 - 2 + 6
    CHECK(ab[3] == doctest::Approx(6.0));   // 1 - 1.5 + 8 - 1.5... direct: 1*0 + 2*0.5 + 3*(-1) + 4*2

    CHECK(mul(a, reciprocal(a))[0] == doctest::Approx(1.0));
    CHECK(mul(a, reciprocal(a))[1] == doctest::Approx(0.0));
    CHECK(mul(a, reciprocal(a))[3] == doctest::Approx(0.0));

    // compose(f, revert(f)) = identity for f vanishing at 0
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    for (int trial = 0; trial < 50; ++trial) {
        Coeffs f = make(0.0, 1.0 + u(rng), u(rng), u(rng));
        if (std::abs(f[1]) < 0.3) continue;
        const Coeffs inv = revert(f);
        const Coeffs id = compose(f, inv);
        CHECK(id[0] == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(id[1] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(id[2]) < 1e-12);
        CHECK(std::abs(id[3]) < 1e-12);
    }
}

TEST_CASE("log-spaced grids are monotone") {
    auto g = num::log_spaced(1e-2, 1e-5, 40);
    REQUIRE(g.size() == 40);
    CHECK(g.front() == doctest::Approx(1e-2));
    CHECK(g.back() == doctest::Approx(1e-5));
    for (size_t i = 1; i < g.size(); ++i) CHECK(g[i] < g[i - 1]);
}
