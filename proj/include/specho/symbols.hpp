#pragma once

// Hamiltonian catalog: closed-form symbols p(x, ξ) with analytic gradients and
// Hessians, plus the admissibility (properness) guard used before any spectral
// work is attempted on an energy window.

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "specho/numerics.hpp"

namespace specho {

struct Box2 {
    double x_lo = 0.0, x_hi = 0.0;
    double xi_lo = 0.0, xi_hi = 0.0;

    bool contains(double x, double xi) const {
        return x >= x_lo && x <= x_hi && xi >= xi_lo && xi <= xi_hi;
    }
};

struct Symbol {
    std::string id;
    std::function<double(double, double)> eval;                  // p(x, ξ)
    std::function<Eigen::Vector2d(double, double)> grad;         // (∂p/∂x, ∂p/∂ξ)
    std::function<Eigen::Matrix2d(double, double)> hess;
    std::function<double(double)> potential;                     // set iff p = ξ²/2 + V(x)
    std::function<double(double)> potential_deriv;
    double order_m = 2.0;
    double ellipticity_radius = 2.0;

    bool schrodinger_form() const { return static_cast<bool>(potential); }
};

// Ground truth shipped with an entry, for test use. Values are re-derivable
// from the classical machinery; keeping them here lets tests cross-check the
// machinery itself.
struct KnownInvariants {
    std::vector<double> critical_values;          // sorted
    std::vector<bool> hyperbolic;                 // parallel to critical_values
    std::vector<int> components_per_band;         // regular bands of the declared window, low to high
};

struct CatalogEntry {
    Symbol symbol;
    Interval declared_window;
    Box2 scan_box; // bounds the declared window's preimage with margin
    std::optional<KnownInvariants> known;
};

// Registered ids: harmonic, quartic, dwell_asym, dwell_sym, triple_well.
CatalogEntry catalog_get(const std::string& id);
std::vector<std::string> catalog_ids();

struct AdmissibilityReport {
    bool admissible = false;
    Box2 box;
    Interval window;             // the enlarged window J actually scanned
    std::optional<Eigen::Vector2d> witness; // boundary point with p in J
    int resolution = 512;
};

// Grid guard for Assumption condition 3: scans p on box at resolution² and
// requires the preimage of the 10%-enlarged window to stay off the boundary ring.
AdmissibilityReport check_admissibility(const CatalogEntry& entry, Interval window,
                                        int resolution = 512);
AdmissibilityReport check_admissibility(const Symbol& sym, const Box2& box, Interval window,
                                        int resolution = 512);

} // namespace specho
