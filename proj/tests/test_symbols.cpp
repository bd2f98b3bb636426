#include <doctest.h>

#include <cmath>
#include <random>

#include "specho/symbols.hpp"

using namespace specho;

TEST_CASE("catalog ids and lookup") {
    CHECK(catalog_ids().size() == 5);
    CHECK_THROWS_WITH_AS(catalog_get("nosuch"),
                         doctest::Contains("unknown symbol id 'nosuch'"), NotFoundError);

    auto h = catalog_get("harmonic");
    CHECK(h.symbol.eval(1.0, 1.0) == doctest::Approx(1.0));
    CHECK(h.symbol.grad(1.0, 1.0).x() == doctest::Approx(1.0));
    CHECK(h.symbol.grad(1.0, 1.0).y() == doctest::Approx(1.0));

    auto d = catalog_get("dwell_asym");
    REQUIRE(d.symbol.schrodinger_form());
    CHECK(d.symbol.potential(0.0) == doctest::Approx(0.0));
    // V(1) from the closed form: 0.4+0.4+0.6-0.4-0.9+0.22
    CHECK(d.symbol.potential(1.0) == doctest::Approx(0.32));
}

TEST_CASE("gradients and hessians agree with finite differences") {
    std::mt19937 rng(42);
    for (const auto& id : catalog_ids()) {
        auto entry = catalog_get(id);
        const auto& s = entry.symbol;
        std::uniform_real_distribution<double> ux(entry.scan_box.x_lo, entry.scan_box.x_hi);
        std::uniform_real_distribution<double> uxi(entry.scan_box.xi_lo, entry.scan_box.xi_hi);
        for (int t = 0; t < 100; ++t) {
            const double x = ux(rng), xi = uxi(rng);
            const double h = 1e-5 * std::max(1.0, std::abs(x) + std::abs(xi));
            const Eigen::Vector2d g = s.grad(x, xi);
            const double gx_fd = (s.eval(x + h, xi) - s.eval(x - h, xi)) / (2 * h);
            const double gxi_fd = (s.eval(x, xi + h) - s.eval(x, xi - h)) / (2 * h);
            const double scale = std::max(1.0, g.norm());
            CHECK(std::abs(g.x() - gx_fd) / scale < 1e-6);
            CHECK(std::abs(g.y() - gxi_fd) / scale < 1e-6);

            const Eigen::Matrix2d H = s.hess(x, xi);
            const double hxx_fd =
                (s.eval(x + h, xi) - 2 * s.eval(x, xi) + s.eval(x - h, xi)) / (h * h);
            const double hxixi_fd =
                (s.eval(x, xi + h) - 2 * s.eval(x, xi) + s.eval(x, xi - h)) / (h * h);
            const double hscale = std::max(1.0, H.norm());
            CHECK(std::abs(H(0, 0) - hxx_fd) / hscale < 1e-4);
            CHECK(std::abs(H(1, 1) - hxixi_fd) / hscale < 1e-4);

            if (s.schrodinger_form())
                CHECK(s.eval(x, xi) ==
                      doctest::Approx(0.5 * xi * xi + s.potential(x)).epsilon(1e-12));
        }
    }
}

TEST_CASE("admissibility: harmonic window is proper") {
    auto rep = check_admissibility(catalog_get("harmonic"), {0.2, 1.0});
    CHECK(rep.admissible);
    CHECK_FALSE(rep.witness.has_value());
}

TEST_CASE("admissibility: p = xi is not proper") {
    Symbol s;
    s.id = "xi_shear";
    s.eval = [](double, double xi) { return xi; };
    s.grad = [](double, double) { return Eigen::Vector2d(0.0, 1.0); };
    s.hess = [](double, double) { return Eigen::Matrix2d::Zero().eval(); };
    auto rep = check_admissibility(s, Box2{-2, 2, -2, 2}, {0.0, 1.0});
    CHECK_FALSE(rep.admissible);
    REQUIRE(rep.witness.has_value());
    // the witness sits on the box boundary with p inside the enlarged window
    const double w = rep.witness->y();
    CHECK(w >= -0.06);
    CHECK(w <= 1.06);
}

TEST_CASE("admissibility: dwell_asym on [-0.2, 0.5] over a wide box") {
    auto entry = catalog_get("dwell_asym");
    entry.scan_box = {-3, 3, -3, 3};
    auto rep = check_admissibility(entry, {-0.2, 0.5});
    CHECK(rep.admissible);
}

TEST_CASE("admissibility is monotone under window shrinking") {
    auto entry = catalog_get("triple_well");
    auto outer = check_admissibility(entry, entry.declared_window);
    REQUIRE(outer.admissible);
    const auto& w = entry.declared_window;
    for (double frac : {0.25, 0.5, 0.75}) {
        Interval sub{w.lo + 0.1 * w.width(), w.lo + (0.1 + 0.8 * frac) * w.width()};
        CHECK(check_admissibility(entry, sub).admissible);
    }
}

TEST_CASE("declared windows scan as admissible for the whole catalog") {
    for (const auto& id : catalog_ids()) {
        auto entry = catalog_get(id);
        CHECK(check_admissibility(entry, entry.declared_window).admissible);
    }
}
