#pragma once

// Period lattice recovery from spectra: the windowed partition-function
// spectrogram |Z_w(λ,t)|, peak detection into lattice points, tracking into
// smooth period curves, and the minimal-height peeling that counts connected
// components and extracts fundamental periods.

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "specho/density.hpp"
#include "specho/forward.hpp"
#include "specho/numerics.hpp"

namespace specho {

struct Spectrogram {
    double hbar = 0.0;
    Eigen::VectorXd lambda_grid; // increasing
    Eigen::VectorXd t_grid;      // increasing, positive
    Eigen::MatrixXd magnitude;   // lambda_grid.size() x t_grid.size()
    double window_width = 0.0;   // Gaussian σ in energy
};

// magnitude(λ,t) = |Σ_E w((E-λ)/σ) e^{-itE/ħ}| / Σ_E w, w Gaussian truncated at
// 4σ. Fewer than 16 eigenvalues under any window is a statistics error.
Spectrogram windowed_partition(const SpectrumWindow& spectrum,
                               const Eigen::VectorXd& lambda_grid,
                               const Eigen::VectorXd& t_grid, double window_width);

struct LatticePoint {
    double lambda = 0.0;
    double t = 0.0;
    double weight = 0.0; // peak magnitude
};

// Per-column local maxima above threshold·(column median), refined by local
// parabolic interpolation in log-magnitude.
std::vector<LatticePoint> detect_lattice(const Spectrogram& sg, double threshold = 5.0);

struct PeriodCurve {
    std::vector<double> lambdas;
    std::vector<double> ts;
    std::optional<std::pair<int, int>> label; // (component k, multiple j) after peeling
    bool crossing_flag = false;               // ambiguous continuation encountered
    num::CubicSpline model;

    double at(double lam) const { return model(lam); }
    Interval support() const { return {lambdas.front(), lambdas.back()}; }
};

struct TrackOptions {
    double gate_rel = 0.02;     // matching gate relative to t
    double gate_abs_steps = 3.0; // … plus this many t-grid steps
    int max_gap = 2;            // columns a curve may skip
    double min_support = 0.8;   // fraction of spanned columns with points
};

std::vector<PeriodCurve> track_curves(const std::vector<LatticePoint>& points,
                                      const Eigen::VectorXd& lambda_grid, double t_step,
                                      const TrackOptions& opts = {});

struct ComponentCount {
    int N = 0;
    std::vector<PeriodCurve> fundamentals;  // labeled (k, 1)
    std::vector<PeriodCurve> labeled;       // all curves with labels
    Interval crossing_free;                 // the λ-interval actually used
    bool density_consistent = true;         // Σ τ̂_k vs π ρ̂ over the interval
    double density_ratio = 1.0;             // π ρ̂ / Σ τ̂_k
    std::vector<std::string> notes;
};

// Step-2 peeling: restrict to a crossing-free λ-subinterval and t ≤ R, then
// repeatedly take the lowest curve as a fundamental and delete its integer
// multiples (relative tolerance `multiple_tol`). `density_bound` R comes from
// π·max ρ̂; `rho_at` (when given) enables the equal-period consistency check,
// which throws AssumptionError on a symmetric/resonant system.
ComponentCount count_components(std::vector<PeriodCurve> curves, double t_max,
                                double density_bound,
                                const std::function<double(double)>& rho_at = {},
                                double multiple_tol = 1e-2);

struct Resonance {
    double lambda = 0.0;
    double t = 0.0;
    std::pair<int, int> first;  // (k, j)
    std::pair<int, int> second; // (k', j')
    int transversality_order = 0; // lowest derivative order separating the branches, ≤ 3
};

struct ResonanceReport {
    std::vector<Resonance> resonances;
    bool identical_curve_warning = false; // equal-period components suspected
    std::string note;
};

ResonanceReport resonance_report(const std::vector<PeriodCurve>& labeled_curves,
                                 double t_step = 0.0);

// Convenience: spectrogram grids for a band given the spectrum statistics.
struct LatticePlan {
    Eigen::VectorXd lambda_grid;
    Eigen::VectorXd t_grid;
    double window_width = 0.0;
    double t_max = 0.0;
};
LatticePlan plan_lattice(const SpectrumWindow& spectrum, Interval band, double rho_max,
                         double t_max = 0.0, int oversample = 6);

} // namespace specho
