#include "specho/symbols.hpp"

#include <cmath>
#include <sstream>

namespace specho {

namespace {

// Builds a Schrödinger-form symbol p = ξ²/2 + V(x) from polynomial potential
// coefficients (low to high degree).
Symbol polynomial_well(const std::string& id, std::vector<double> coeffs, double order_m,
                       double ellipticity_radius) {
    Symbol s;
    s.id = id;
    s.order_m = order_m;
    s.ellipticity_radius = ellipticity_radius;
    auto V = [coeffs](double x) {
        double v = 0.0;
        for (size_t i = coeffs.size(); i-- > 0;) v = v * x + coeffs[i];
        return v;
    };
    auto Vp = [coeffs](double x) {
        double v = 0.0;
        for (size_t i = coeffs.size(); i-- > 1;) v = v * x + i * coeffs[i];
        return v;
    };
    auto Vpp = [coeffs](double x) {
        double v = 0.0;
        for (size_t i = coeffs.size(); i-- > 2;) v = v * x + i * (i - 1) * coeffs[i];
        return v;
    };
    s.potential = V;
    s.potential_deriv = Vp;
    s.eval = [V](double x, double xi) { return 0.5 * xi * xi + V(x); };
    s.grad = [Vp](double x, double xi) { return Eigen::Vector2d(Vp(x), xi); };
    s.hess = [Vpp](double x, double) {
        Eigen::Matrix2d h;
        h << Vpp(x), 0.0, 0.0, 1.0;
        return h;
    };
    return s;
}

CatalogEntry make_harmonic() {
    Symbol s;
    s.id = "harmonic";
    s.order_m = 2.0;
    s.ellipticity_radius = 2.0;
    s.eval = [](double x, double xi) { return 0.5 * (x * x + xi * xi); };
    s.grad = [](double x, double xi) { return Eigen::Vector2d(x, xi); };
    s.hess = [](double, double) { return Eigen::Matrix2d::Identity().eval(); };
    s.potential = [](double x) { return 0.5 * x * x; };
    s.potential_deriv = [](double x) { return x; };
    CatalogEntry e;
    e.symbol = std::move(s);
    e.declared_window = {0.2, 1.0};
    e.scan_box = {-2.0, 2.0, -2.0, 2.0};
    e.known = KnownInvariants{{}, {}, {1}};
    return e;
}

CatalogEntry make_quartic() {
    CatalogEntry e;
    e.symbol = polynomial_well("quartic", {0, 0, 0, 0, 1}, 4.0, 2.5);
    e.declared_window = {0.5, 2.0};
    e.scan_box = {-1.6, 1.6, -2.4, 2.4};
    e.known = KnownInvariants{{}, {}, {1}};
    return e;
}

// Two wells of visibly different curvature, depths split by a tilt:
//   V = (x²-1/2)²(1 + 0.4x + 0.4x²) + 0.12x - 1/4
//     = 0.4x⁶ + 0.4x⁵ + 0.6x⁴ - 0.4x³ - 0.9x² + 0.22x.
// The quadratic factor keeps the two well periods ~20% apart at equal energy,
// which a quartic double well cannot do (its two period integrals are cycles
// of one elliptic curve and cancel against the residue at infinity, hence are
// exactly equal at every energy, however asymmetric the quartic looks).
CatalogEntry make_dwell_asym() {
    CatalogEntry e;
    e.symbol = polynomial_well("dwell_asym", {0, 0.22, -0.9, -0.4, 0.6, 0.4, 0.4}, 6.0, 2.2);
    e.declared_window = {-0.4, 0.4};
    e.scan_box = {-1.7, 1.7, -1.6, 1.6};
    KnownInvariants k;
    k.critical_values = {-0.33672152436, -0.16641617152, 0.01290341395};
    k.hyperbolic = {false, false, true};
    k.components_per_band = {1, 2, 1}; // (c1,c2), (c2,c3), (c3, hi)
    e.known = k;
    return e;
}

CatalogEntry make_dwell_sym() {
    CatalogEntry e;
    e.symbol = polynomial_well("dwell_sym", {0, 0, -1, 0, 1}, 4.0, 2.2);
    e.declared_window = {-0.3, 0.3};
    e.scan_box = {-1.6, 1.6, -1.4, 1.4};
    KnownInvariants k;
    k.critical_values = {-0.25, 0.0};
    k.hyperbolic = {false, true};
    k.components_per_band = {2, 1};
    e.known = k;
    return e;
}

CatalogEntry make_triple_well() {
    CatalogEntry e;
    e.symbol = polynomial_well("triple_well", {0, 0.05, 0.95, 0, -2, 0, 1}, 6.0, 2.2);
    e.declared_window = {-0.15, 0.35};
    e.scan_box = {-1.7, 1.7, -1.5, 1.5};
    KnownInvariants k;
    k.critical_values = {-0.10134978154, -0.00065885921, -0.00015529128, 0.10476707022,
                         0.16035982477};
    k.hyperbolic = {false, false, false, true, true};
    k.components_per_band = {1, 2, 3, 2, 1};
    e.known = k;
    return e;
}

} // namespace

std::vector<std::string> catalog_ids() {
    return {"harmonic", "quartic", "dwell_asym", "dwell_sym", "triple_well"};
}

CatalogEntry catalog_get(const std::string& id) {
    if (id == "harmonic") return make_harmonic();
    if (id == "quartic") return make_quartic();
    if (id == "dwell_asym") return make_dwell_asym();
    if (id == "dwell_sym") return make_dwell_sym();
    if (id == "triple_well") return make_triple_well();
    std::ostringstream msg;
    msg << "unknown symbol id '" << id << "'; valid ids:";
    for (const auto& known : catalog_ids()) msg << " " << known;
    throw NotFoundError(msg.str());
}

AdmissibilityReport check_admissibility(const Symbol& sym, const Box2& box, Interval window,
                                        int resolution) {
    if (window.empty()) throw UsageError("check_admissibility: empty window");
    AdmissibilityReport report;
    report.box = box;
    report.resolution = resolution;
    const double pad = 0.05 * window.width();
    report.window = {window.lo - pad, window.hi + pad}; // 10% total enlargement
    report.admissible = true;
    const int n = resolution;
    for (int i = 0; i < n && report.admissible; ++i) {
        const double x = box.x_lo + (box.x_hi - box.x_lo) * i / (n - 1);
        for (int j = 0; j < n; ++j) {
            const bool boundary = (i == 0 || i == n - 1 || j == 0 || j == n - 1);
            if (!boundary) continue;
            const double xi = box.xi_lo + (box.xi_hi - box.xi_lo) * j / (n - 1);
            if (report.window.contains(sym.eval(x, xi))) {
                report.admissible = false;
                report.witness = Eigen::Vector2d(x, xi);
                break;
            }
        }
    }
    return report;
}

AdmissibilityReport check_admissibility(const CatalogEntry& entry, Interval window,
                                        int resolution) {
    return check_admissibility(entry.symbol, entry.scan_box, window, resolution);
}

} // namespace specho
