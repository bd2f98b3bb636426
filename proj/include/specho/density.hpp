#pragma once

// Density of states ρ_ħ(E) = ħ^{1-γ} #(Σ_ħ ∩ B(E, ħ^γ)) over an ħ-ladder, its
// ħ→0 limit estimate, and the spectra-only classification of probe energies as
// regular, elliptic critical, or hyperbolic critical.

#include <optional>
#include <string>
#include <vector>

#include "specho/forward.hpp"

namespace specho {

struct DensityEstimate {
    double E = 0.0;
    double gamma = 0.5;
    std::vector<std::pair<double, double>> per_hbar; // (ħ, ρ_ħ), usable rungs only
    double limit = 0.0;        // extrapolated ρ(E); not meaningful when infinite
    bool infinite = false;     // |ln ħ| growth detected
    double growth_slope = 0.0; // slope of ρ_ħ vs ln(1/ħ) over the ladder tail
    double growth_tstat = 0.0;
};

// Balls that leave the spectrum window are dropped; fewer than 3 usable rungs
// is a window error (UsageError).
DensityEstimate density_of_states(const std::vector<SpectrumWindow>& spectra, double E,
                                  double gamma = 0.5);

// Single-rung density (closed-ball count).
double rho_hbar(const SpectrumWindow& spectrum, double E, double gamma = 0.5);

enum class Verdict { regular, elliptic, hyperbolic };
inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::regular: return "regular";
        case Verdict::elliptic: return "elliptic";
        default: return "hyperbolic";
    }
}

struct EnergyClassification {
    double E = 0.0;
    Verdict verdict = Verdict::regular;
    struct Evidence {
        double smooth_residual = 0.0; // max relative deviation from a quadratic in E
        double jump = 0.0;            // relative one-sided density jump
        double slope = 0.0;           // |ln ħ| growth slope
        double tstat = 0.0;
    } evidence;
};

// Decision procedure: |ln ħ| growth (slope t-stat > 4, positive, still growing)
// → hyperbolic; else one-sided limits differing by > 20% → elliptic; else
// regular. Requires at least 4 usable ladder rungs (UsageError otherwise).
EnergyClassification classify_energy(const std::vector<SpectrumWindow>& spectra, double E,
                                     double gamma = 0.5);

struct CriticalEstimate {
    double value = 0.0;
    CriticalKind kind = CriticalKind::elliptic;
    double bracket = 0.0; // half-width of the final refinement bracket
};

struct ScanResult {
    std::vector<EnergyClassification> probes;
    std::vector<CriticalEstimate> critical_values; // sorted by value
    std::vector<std::string> warnings;
};

// Classifies a uniform probe grid over `window` (step >= 4·ħ_min^γ), clusters
// non-regular probes and refines each cluster: bisection on the half-filled
// ball level for elliptic values, ternary search on the growth slope for
// hyperbolic ones.
ScanResult scan_classify(const std::vector<SpectrumWindow>& spectra, Interval window,
                         double step = 0.0, double gamma = 0.5);

} // namespace specho
