#include <doctest.h>

#include <cmath>

#include "specho/classical.hpp"

using namespace specho;

namespace {

// Test-side root oracle: dense scan plus bisection, independent of the
// Newton-based production path.
std::vector<double> bisect_roots(const std::function<double(double)>& f, double a, double b,
                                 int n = 20000) {
    std::vector<double> out;
    double x0 = a, f0 = f(a);
    for (int i = 1; i <= n; ++i) {
        const double x1 = a + (b - a) * i / n;
        const double f1 = f(x1);
        if (f0 * f1 < 0) {
            double lo = x0, hi = x1;
            for (int it = 0; it < 100; ++it) {
                const double m = 0.5 * (lo + hi);
                (f(lo) * f(m) <= 0 ? hi : lo) = m;
            }
            out.push_back(0.5 * (lo + hi));
        }
        x0 = x1;
        f0 = f1;
    }
    return out;
}

} // namespace

TEST_CASE("critical points: harmonic has a single elliptic minimum") {
    auto e = catalog_get("harmonic");
    auto pts = find_critical_points(e.symbol, e.scan_box);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].location.norm() < 1e-9);
    CHECK(pts[0].value == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(pts[0].kind == CriticalKind::elliptic);
    CHECK(e.symbol.grad(pts[0].location.x(), pts[0].location.y()).norm() <= 1e-10);
}

TEST_CASE("critical points: dwell_asym matches the polynomial root oracle") {
    auto e = catalog_get("dwell_asym");
    // V' of the catalog sextic, written out independently.
    auto Vp = [](double x) {
        return 2.4 * std::pow(x, 5) + 2.0 * std::pow(x, 4) + 2.4 * x * x * x - 1.2 * x * x -
               1.8 * x + 0.22;
    };
    auto xs = bisect_roots(Vp, -1.6, 1.6);
    REQUIRE(xs.size() == 3);
    auto pts = find_critical_points(e.symbol, e.scan_box);
    REQUIRE(pts.size() == 3);
    // production result sorted by value: min, second well, barrier
    std::vector<double> oracle_vals;
    for (double x : xs) oracle_vals.push_back(e.symbol.potential(x));
    std::sort(oracle_vals.begin(), oracle_vals.end());
    for (int i = 0; i < 3; ++i) CHECK(pts[i].value == doctest::Approx(oracle_vals[i]).epsilon(1e-10));
    CHECK(pts[0].kind == CriticalKind::elliptic);
    CHECK(pts[1].kind == CriticalKind::elliptic);
    CHECK(pts[2].kind == CriticalKind::hyperbolic);
    // catalog ground truth agrees
    const auto& known = e.known->critical_values;
    for (int i = 0; i < 3; ++i) CHECK(pts[i].value == doctest::Approx(known[i]).epsilon(1e-7));
}

TEST_CASE("critical points: dwell_sym closed form") {
    auto e = catalog_get("dwell_sym");
    auto pts = find_critical_points(e.symbol, e.scan_box);
    REQUIRE(pts.size() == 3);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(pts[0].value == doctest::Approx(-0.25).epsilon(1e-12));
    CHECK(pts[1].value == doctest::Approx(-0.25).epsilon(1e-12));
    CHECK(std::abs(std::abs(pts[0].location.x()) - s) < 1e-9);
    CHECK(pts[2].value == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(pts[2].kind == CriticalKind::hyperbolic);
}

TEST_CASE("critical points: degenerate Hessian is reported") {
    // quartic's minimum at the origin has V'' = 0
    auto e = catalog_get("quartic");
    CHECK_THROWS_AS(find_critical_points(e.symbol, e.scan_box, Interval{-1.0, 1.0}),
                    AssumptionError);
    // but with the value filter above zero it is silently skipped
    auto pts = find_critical_points(e.symbol, e.scan_box, Interval{0.4, 2.2});
    CHECK(pts.empty());
}

TEST_CASE("level components: harmonic circle") {
    auto e = catalog_get("harmonic");
    auto comps = extract_level_components(e.symbol, 0.5, e.scan_box);
    REQUIRE(comps.size() == 1);
    CHECK(comps[0].action == doctest::Approx(M_PI).epsilon(2e-4));
    CHECK(comps[0].period == doctest::Approx(2 * M_PI).epsilon(2e-4));
    // closed and on the circle of radius 1
    const auto& pts = comps[0].contour;
    CHECK((pts.front() - pts.back()).norm() < 1e-12);
    for (const auto& p : pts) CHECK(p.norm() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("level components: dwell_asym well counts") {
    auto e = catalog_get("dwell_asym");
    CHECK(extract_level_components(e.symbol, -0.1, e.scan_box).size() == 2);
    CHECK(extract_level_components(e.symbol, 0.5, e.scan_box).size() == 1);
    CHECK(extract_level_components(e.symbol, -0.2, e.scan_box).size() == 1);
}

TEST_CASE("level components: open contour rejects") {
    Symbol s;
    s.id = "xi_shear";
    s.eval = [](double, double xi) { return xi; };
    s.grad = [](double, double) { return Eigen::Vector2d(0.0, 1.0); };
    s.hess = [](double, double) { return Eigen::Matrix2d::Zero().eval(); };
    CHECK_THROWS_AS(extract_level_components(s, 0.5, Box2{-2, 2, -2, 2}, 128), AssumptionError);
}

TEST_CASE("action and period: harmonic exact values") {
    auto e = catalog_get("harmonic");
    auto ap = action_and_period(e.symbol, 0.5, 0, e.scan_box, 0.8);
    CHECK(ap.action == doctest::Approx(M_PI).epsilon(1e-10));
    CHECK(ap.period == doctest::Approx(2 * M_PI).epsilon(1e-10));
    CHECK(ap.period_diff == doctest::Approx(2 * M_PI).epsilon(1e-7));
}

TEST_CASE("action and period: quartic scaling law via the flow oracle") {
    auto e = catalog_get("quartic");
    auto ap1 = action_and_period(e.symbol, 1.0, 0, e.scan_box, 1.5);
    Box2 wide{-2.4, 2.4, -6.0, 6.0};
    auto ap16 = action_and_period(e.symbol, 16.0, 0, wide, 1.5);
    CHECK(ap16.period / ap1.period == doctest::Approx(0.5).epsilon(1e-9));

    // cross-check against direct Hamiltonian flow return time
    const double x_turn = std::pow(1.0, 0.25);
    const double t_flow = flow_return_time(e.symbol, {x_turn, 0.0});
    CHECK(ap1.period == doctest::Approx(t_flow).epsilon(1e-4));
}

TEST_CASE("periods: three routes agree on the catalog") {
    struct Probe {
        const char* id;
        double lambda;
        int comp;
    };
    for (const auto& pr : std::initializer_list<Probe>{
             {"harmonic", 0.63, 0}, {"quartic", 1.37, 0}, {"dwell_asym", -0.1, 0},
             {"dwell_asym", -0.1, 1}, {"dwell_asym", 0.21, 0}, {"triple_well", 0.05, 1}}) {
        auto e = catalog_get(pr.id);
        auto ap = action_and_period(e.symbol, pr.lambda, pr.comp, e.scan_box,
                                    e.declared_window.width());
        CHECK(ap.period > 0.0);
        CHECK(ap.period_diff == doctest::Approx(ap.period).epsilon(1e-6));
        // flow route: start from the right turning point of the component
        const auto ivs =
            allowed_intervals(e.symbol, pr.lambda, e.scan_box.x_lo, e.scan_box.x_hi);
        const double t_flow =
            flow_return_time(e.symbol, {0.5 * (ivs[pr.comp].first + ivs[pr.comp].second),
                                        std::sqrt(2.0 * (pr.lambda -
                                                         e.symbol.potential(
                                                             0.5 * (ivs[pr.comp].first +
                                                                    ivs[pr.comp].second))))});
        CHECK(t_flow == doctest::Approx(ap.period).epsilon(1e-4));
    }
}

TEST_CASE("period blows up near the hyperbolic value") {
    auto e = catalog_get("dwell_asym");
    const double c3 = e.known->critical_values[2];
    const double far = total_abs_period(e.symbol, c3 + 1e-2, e.scan_box);
    const double close = total_abs_period(e.symbol, c3 + 1e-4, e.scan_box);
    CHECK(close >= 1.5 * far / 2.0); // trunk period alone grows
    // isolate the trunk: above c3 there is only one component
    CHECK(close / far > 1.0);
    const double closer = total_abs_period(e.symbol, c3 + 1e-6, e.scan_box);
    CHECK(closer > close);
}

TEST_CASE("action is monotone on a band of constant period sign") {
    auto e = catalog_get("dwell_asym");
    double prev = -1e300;
    for (double lam = -0.15; lam < 0.0; lam += 0.02) {
        auto ap = action_and_period(e.symbol, lam, 0, e.scan_box, 0.8);
        CHECK(ap.action > prev);
        prev = ap.action;
    }
}

TEST_CASE("reference reeb graph: harmonic is a single open edge") {
    auto e = catalog_get("harmonic");
    auto g = build_reference_reeb_graph(e, {0.2, 1.0});
    CHECK(g.vertices.empty());
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edges[0].length == doctest::Approx(1.6 * M_PI).epsilon(1e-8));
    CHECK(g.edges[0].endpoint_lo == -1);
    CHECK(g.edges[0].endpoint_hi == -1);
}

TEST_CASE("reference reeb graph: dwell_asym full window") {
    auto e = catalog_get("dwell_asym");
    auto g = build_reference_reeb_graph(e, e.declared_window);
    REQUIRE(g.vertices.size() == 3);
    CHECK(g.vertices[0].kind == CriticalKind::elliptic);
    CHECK(g.vertices[1].kind == CriticalKind::elliptic);
    CHECK(g.vertices[2].kind == CriticalKind::hyperbolic);
    CHECK(g.edges.size() == 4);
    // trunk sits above the barrier
    const auto& hyp = g.vertices[2];
    REQUIRE(hyp.trunk_edge >= 0);
    CHECK(g.edges[hyp.trunk_edge].interval.lo == doctest::Approx(hyp.value));
    // 3 taylor records for the single bifurcation
    CHECK(g.taylor.size() == 3);
}

TEST_CASE("reference reeb graph: dwell_sym equal elliptic values error") {
    auto e = catalog_get("dwell_sym");
    CHECK_THROWS_AS(build_reference_reeb_graph(e, {-0.3, 0.3}), AssumptionError);
}

TEST_CASE("edge length equals action difference on regular-closed bands") {
    auto e = catalog_get("dwell_asym");
    // band strictly inside (c2, c3): integrate tau and compare with action difference
    const double lo = -0.15, hi = -0.05;
    for (int comp = 0; comp < 2; ++comp) {
        const double len = num::integrate(
            [&](double lam) {
                return action_and_period(e.symbol, lam, comp, e.scan_box, 0.8).period;
            },
            lo, hi, 1e-9);
        const double da = action_and_period(e.symbol, hi, comp, e.scan_box, 0.8).action -
                          action_and_period(e.symbol, lo, comp, e.scan_box, 0.8).action;
        CHECK(len == doctest::Approx(da).epsilon(1e-4));
    }
}

TEST_CASE("reference taylor invariants at the dwell_asym barrier") {
    auto e = catalog_get("dwell_asym");
    const double c3 = e.known->critical_values[2];
    auto ht = reference_taylor_invariants(e, c3);
    // leading f' equals 1/omega with omega^2 = |V''| at the saddle
    const double omega = std::sqrt(1.9667221);
    CHECK(ht.trunk.f_prime[0] == doctest::Approx(1.0 / omega).epsilon(1e-3));
    CHECK(ht.branch1.f_prime[0] == doctest::Approx(1.0 / omega).epsilon(1e-3));
    CHECK(ht.branch2.f_prime[0] == doctest::Approx(1.0 / omega).epsilon(1e-3));
    CHECK(ht.trunk.f_prime[0] > 0.0);
    // branch g series sum to the trunk g series at orders 0..1
    CHECK(ht.consistency_residual < 1e-2);
}

TEST_CASE("total absolute period matches the per-component sum") {
    auto e = catalog_get("dwell_asym");
    const double lam = -0.1;
    const double t0 = action_and_period(e.symbol, lam, 0, e.scan_box, 0.8).period;
    const double t1 = action_and_period(e.symbol, lam, 1, e.scan_box, 0.8).period;
    CHECK(total_abs_period(e.symbol, lam, e.scan_box) == doctest::Approx(t0 + t1).epsilon(1e-9));
}
