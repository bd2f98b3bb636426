#include <doctest.h>

#include <cmath>

#include "specho/classical.hpp"
#include "specho/density.hpp"

using namespace specho;

namespace {

// Shared ladders, built once. j = 0..7 is the default; classification uses a
// deeper tail for sharper brackets.
// Counting-grade accuracy: the classifier only needs eigenvalues located far
// more finely than the ball radius ħ^γ; 1e-8 is orders below any threshold in
// play and keeps the deep ladder rungs affordable.
MatrixOptions counting_grade(double accuracy = 1e-6) {
    MatrixOptions opts;
    opts.richardson_check = false;
    opts.accuracy = accuracy;
    return opts;
}

const std::vector<SpectrumWindow>& harmonic_ladder() {
    static const auto spectra =
        spectra_over_ladder(catalog_get("harmonic"), HbarLadder::geometric(0.1, 0.5, 8),
                            {0.2, 1.0}, counting_grade());
    return spectra;
}

const std::vector<SpectrumWindow>& dwell_ladder() {
    static const auto spectra =
        spectra_over_ladder(catalog_get("dwell_asym"), HbarLadder::geometric(0.1, 0.5, 9),
                            catalog_get("dwell_asym").declared_window, counting_grade());
    return spectra;
}

} // namespace

TEST_CASE("density: harmonic regular value gives rho = 2") {
    auto d = density_of_states(harmonic_ladder(), 0.6);
    CHECK_FALSE(d.infinite);
    CHECK(std::abs(d.limit - 2.0) <= 0.05 * 2.0);
}

TEST_CASE("density: regular-value formula rho = |tau|/pi across probes") {
    auto e = catalog_get("dwell_asym");
    for (double E : {-0.25, -0.12, 0.1, 0.3}) {
        auto d = density_of_states(dwell_ladder(), E);
        const double expect = total_abs_period(e.symbol, E, e.scan_box) / M_PI;
        CHECK_FALSE(d.infinite);
        CHECK(std::abs(d.limit - expect) <= 0.05 * expect);
    }
}

TEST_CASE("density: hyperbolic value flagged infinite") {
    auto e = catalog_get("dwell_asym");
    const double c3 = e.known->critical_values[2];
    auto d = density_of_states(dwell_ladder(), c3);
    CHECK(d.infinite);
    CHECK(d.growth_slope > 0.0);
    CHECK(d.growth_tstat > 4.0);
}

TEST_CASE("density: ball leaving the window is a window error") {
    CHECK_THROWS_AS(density_of_states(harmonic_ladder(), 0.205), UsageError);
}

TEST_CASE("classify: harmonic regular with small residual") {
    auto ec = classify_energy(harmonic_ladder(), 0.6);
    CHECK(ec.verdict == Verdict::regular);
    CHECK(ec.evidence.smooth_residual <= 0.02);
}

TEST_CASE("classify: lowest elliptic value of dwell_asym") {
    auto e = catalog_get("dwell_asym");
    const double c1 = e.known->critical_values[0];
    auto ec = classify_energy(dwell_ladder(), c1);
    CHECK(ec.verdict == Verdict::elliptic);
    CHECK(ec.evidence.jump > 0.2);

    // half-limit: on-value density is half the one-sided limit
    const double h_min = dwell_ladder().back().hbar;
    const double rho_on = rho_hbar(dwell_ladder().back(), c1);
    const double rho_side =
        density_of_states(dwell_ladder(), c1 + 4.0 * std::sqrt(h_min)).limit;
    CHECK(rho_on / rho_side > 0.35);
    CHECK(rho_on / rho_side < 0.65);
}

TEST_CASE("classify: hyperbolic value via log growth") {
    auto e = catalog_get("dwell_asym");
    auto ec = classify_energy(dwell_ladder(), e.known->critical_values[2]);
    CHECK(ec.verdict == Verdict::hyperbolic);
    CHECK(ec.evidence.tstat > 4.0);
}

TEST_CASE("classify: verdict stable under gamma variation") {
    auto e = catalog_get("dwell_asym");
    for (double gamma : {0.4, 0.5, 0.6}) {
        CHECK(classify_energy(dwell_ladder(), -0.25, gamma).verdict == Verdict::regular);
        CHECK(classify_energy(dwell_ladder(), e.known->critical_values[2], gamma).verdict ==
              Verdict::hyperbolic);
    }
}

TEST_CASE("classify: hyperbolic slope grows as probes approach the value") {
    auto e = catalog_get("dwell_asym");
    const double c3 = e.known->critical_values[2];
    double prev = -1e300;
    for (double dist : {0.08, 0.04, 0.0}) {
        const double slope = density_of_states(dwell_ladder(), c3 + dist).growth_slope;
        CHECK(slope > prev);
        prev = slope;
    }
}

TEST_CASE("classify: ladder too short") {
    std::vector<SpectrumWindow> three(harmonic_ladder().begin(), harmonic_ladder().begin() + 3);
    CHECK_THROWS_AS(classify_energy(three, 0.6), UsageError);
}

TEST_CASE("scan: harmonic window has no critical values") {
    auto res = scan_classify(harmonic_ladder(), {0.2, 1.0});
    CHECK(res.critical_values.empty());
    for (const auto& p : res.probes) CHECK(p.verdict == Verdict::regular);
}

TEST_CASE("scan: dwell_asym finds 2 elliptic + 1 hyperbolic") {
    auto e = catalog_get("dwell_asym");
    auto res = scan_classify(dwell_ladder(), e.declared_window);
    REQUIRE(res.critical_values.size() == 3);
    const double h_min = dwell_ladder().back().hbar;
    const double tol = 2.0 * std::sqrt(h_min);
    CHECK(res.critical_values[0].kind == CriticalKind::elliptic);
    CHECK(res.critical_values[1].kind == CriticalKind::elliptic);
    CHECK(res.critical_values[2].kind == CriticalKind::hyperbolic);
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(res.critical_values[i].value - e.known->critical_values[i]) <= tol);
}

TEST_CASE("scan: triple_well resolvable structure") {
    auto e = catalog_get("triple_well");
    auto spectra = spectra_over_ladder(e, HbarLadder::geometric(0.1, 0.5, 10),
                                       e.declared_window, counting_grade(1e-5));
    auto res = scan_classify(spectra, e.declared_window);
    const double h_min = spectra.back().hbar;
    const double tol = 2.0 * std::sqrt(h_min);
    // c2 and c3 sit 5e-4 apart: they merge into one elliptic estimate at any
    // reachable resolution, so four estimates cover the five critical values.
    REQUIRE(res.critical_values.size() == 4);
    CHECK(res.critical_values[0].kind == CriticalKind::elliptic);
    CHECK(res.critical_values[1].kind == CriticalKind::elliptic);
    CHECK(res.critical_values[2].kind == CriticalKind::hyperbolic);
    CHECK(res.critical_values[3].kind == CriticalKind::hyperbolic);
    // every true critical value is matched by an estimate of its kind
    for (size_t i = 0; i < e.known->critical_values.size(); ++i) {
        const double c = e.known->critical_values[i];
        const bool hyp = e.known->hyperbolic[i];
        bool matched = false;
        for (const auto& est : res.critical_values)
            if ((est.kind == CriticalKind::hyperbolic) == hyp &&
                std::abs(est.value - c) <= tol)
                matched = true;
        CHECK(matched);
    }
}
