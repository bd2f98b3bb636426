#pragma once

// Classical ground truth: critical points and types, level-set components,
// action integrals, periods (three independent routes), the reference weighted
// Reeb graph and the reference Taylor invariants at hyperbolic values.

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "specho/contours.hpp"
#include "specho/reeb_graph.hpp"
#include "specho/symbols.hpp"
#include "specho/taylor_fit.hpp"

namespace specho {

struct CriticalPoint {
    Eigen::Vector2d location;
    double value = 0.0;
    CriticalKind kind = CriticalKind::elliptic;
    double hessian_det = 0.0;
};

// Multi-start Newton on ∇p seeded from a grid over box, deduplicated, polished
// to |∇p| <= 1e-10. When value_filter is given, only critical points with value
// inside it are classified and returned; a degenerate Hessian (|det| <= 1e-8)
// inside the filter throws AssumptionError naming the point.
std::vector<CriticalPoint> find_critical_points(const Symbol& sym, const Box2& box,
                                                std::optional<Interval> value_filter = {},
                                                int seed_grid = 256);

struct LevelSetComponent {
    double energy = 0.0;
    int component_index = 0;
    std::vector<Eigen::Vector2d> contour; // closed polyline, positively oriented
    double action = 0.0;                  // ∮ ξ dx (polyline trapezoid)
    double period = 0.0;                  // action derivative route
};

// Marching-squares components of p = lambda, ordered by leftmost x.
// lambda must be a regular value (> 1e-6 away from critical values in the box).
std::vector<LevelSetComponent> extract_level_components(const Symbol& sym, double lambda,
                                                        const Box2& box, int resolution = 1024);

// Classically allowed x-intervals {V < lambda} for Schrödinger-form symbols.
std::vector<std::pair<double, double>> allowed_intervals(const Symbol& sym, double lambda,
                                                         double x_lo, double x_hi);

// Action 2∫√(2(λ-V)) dx and period 2∫dx/√(2(λ-V)) over one allowed interval,
// by turning-point quadrature (square-root endpoints removed analytically).
double well_action(const Symbol& sym, double lambda, const std::pair<double, double>& interval);
double well_period(const Symbol& sym, double lambda, const std::pair<double, double>& interval);

// High-precision action/period for one component. Schrödinger-form symbols use
// turning-point quadrature; general symbols fall back to refined contours.
// Component selection: for Schrödinger symbols `component` indexes the allowed
// x-intervals left to right.
struct ActionPeriod {
    double action = 0.0;
    double period = 0.0;          // d(action)/dλ, evaluated analytically under the integral
    double period_diff = 0.0;     // centered difference of the action (cross-check)
};
ActionPeriod action_and_period(const Symbol& sym, double lambda, int component, const Box2& box,
                               double window_width_hint = 1.0);

// Direct Hamiltonian-flow return time from a point of the component.
double flow_return_time(const Symbol& sym, const Eigen::Vector2d& start, double rel_tol = 1e-10);

// Sum over components of |τ_k(λ)|.
double total_abs_period(const Symbol& sym, double lambda, const Box2& box);

// Reference weighted Reeb graph over I. Requires all critical values in I
// nondegenerate and pairwise distinct (throws AssumptionError otherwise).
WeightedReebGraph build_reference_reeb_graph(const CatalogEntry& entry, Interval window);

// Fits the oracle period data on both sides of a hyperbolic critical value c to
// the log model and returns trunk and branch Taylor records.
struct HyperbolicTaylor {
    TaylorRecord trunk;
    TaylorRecord branch1, branch2; // ordered by leftmost x
    double consistency_residual = 0.0; // max rel deviation of g - (g1+g2), orders 0..1
};
HyperbolicTaylor reference_taylor_invariants(const CatalogEntry& entry, double c_hyp);

} // namespace specho
