#pragma once

// Forward spectra: Numerov matrix eigenvalues in a window for Schrödinger-form
// symbols, Bohr–Sommerfeld approximations on regular bands, and ladders of
// spectra over decreasing ħ.

#include <optional>
#include <string>
#include <vector>

#include "specho/classical.hpp"
#include "specho/symbols.hpp"

namespace specho {

enum class SpectrumSource { matrix, bohr_sommerfeld };

struct SpectrumMeta {
    Interval domain;       // spatial interval of the discretization
    int n_grid = 0;        // interior grid points
    double accuracy = 0.0; // requested per-eigenvalue bound
    int component = -1;    // BS spectra: component id
};

struct SpectrumWindow {
    double hbar = 0.0;
    Interval window;
    std::vector<double> eigenvalues; // sorted, multiplicities as repeats
    SpectrumSource source = SpectrumSource::matrix;
    SpectrumMeta meta;

    int count() const { return static_cast<int>(eigenvalues.size()); }
    // Number of eigenvalues in [lo, hi] (closed ball counting).
    int count_in(double lo, double hi) const;
};

struct HbarLadder {
    std::vector<double> values; // strictly decreasing, positive

    static HbarLadder geometric(double h0 = 0.1, double factor = 0.5, int count = 8);
    static HbarLadder arithmetic(double h0, double step, int count);
};

struct MatrixOptions {
    std::optional<Interval> domain; // auto-sized from turning points when absent
    int n_grid = 0;                 // 0: choose from accuracy target
    double accuracy = 0.0;          // 0: 1e-3·ħ² floored at 5e-14·scale
    bool richardson_check = true;   // validate the bound by grid doubling
};

// Eigenvalues of the Numerov discretization of -ħ²/2 d²/dx² + V in `window`.
// Preconditions follow the admissibility of the window; the classically
// allowed region must project strictly inside the domain with margin at least
// two turning-point widths (throws UsageError naming suggested bounds).
SpectrumWindow matrix_spectrum(const CatalogEntry& entry, double hbar, Interval window,
                               const MatrixOptions& opts = {});
SpectrumWindow matrix_spectrum(const Symbol& sym, const Box2& scan_box, double hbar,
                               Interval window, const MatrixOptions& opts = {});

// Bohr–Sommerfeld eigenvalues on a regular band for one component:
// g0(λ) = 2πħ(n + 1/2), i.e. the subprincipal term is the Maslov constant -π.
// The action g0 comes from the classical machinery of the same symbol.
SpectrumWindow bohr_sommerfeld_spectrum(const CatalogEntry& entry, double hbar, Interval band,
                                        int component);

std::vector<SpectrumWindow> spectra_over_ladder(const CatalogEntry& entry,
                                                const HbarLadder& ladder, Interval window,
                                                const MatrixOptions& opts = {});

// Count-doubling sanity of a ladder of spectra: count(ħ/2)/count(ħ) ∈ [1.5, 2.5].
bool ladder_counts_consistent(const std::vector<SpectrumWindow>& spectra);

} // namespace specho
