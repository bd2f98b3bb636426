#pragma once

// Weighted Reeb graph of a one-degree-of-freedom Hamiltonian over an energy
// window. Vertices sit at critical values (bouts at elliptic ones, degree-3
// bifurcations at hyperbolic ones); edges are per-band component families with
// affine lengths; bifurcations carry truncated Taylor weights.
//
// Edges are cut at every critical value, so a component family passing a
// critical value untouched contributes one edge per band; such edges share a
// lineage id and have an open endpoint there instead of a vertex attachment.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "specho/numerics.hpp"
#include "specho/series.hpp"

namespace specho {

enum class CriticalKind { elliptic, hyperbolic };
enum class Provenance { oracle, reconstructed };
enum class TaylorRole { trunk, branch1, branch2 };

inline const char* to_string(CriticalKind k) {
    return k == CriticalKind::elliptic ? "elliptic" : "hyperbolic";
}
inline const char* to_string(TaylorRole r) {
    switch (r) {
        case TaylorRole::trunk: return "trunk";
        case TaylorRole::branch1: return "branch1";
        default: return "branch2";
    }
}

struct ReebVertex {
    double value = 0.0;
    CriticalKind kind = CriticalKind::elliptic;
    int trunk_edge = -1;                    // hyperbolic only
    std::array<int, 2> branch_edges{-1, -1}; // hyperbolic only
};

struct ReebEdge {
    int id = -1;
    Interval interval;   // energy band
    double length = 0.0;
    int lineage = -1;    // component family; consecutive-band edges of one family share it
    int endpoint_lo = -1; // vertex index, or -1 for open (window end / pass-through)
    int endpoint_hi = -1;
};

struct TaylorWeights {
    int vertex = -1;
    TaylorRole role = TaylorRole::trunk;
    series::Coeffs f_prime = series::Coeffs::Zero();
    series::Coeffs h = series::Coeffs::Zero();
    series::Coeffs g = series::Coeffs::Zero();
    bool flipped = false;   // true if the period was negated to make the leading log coefficient positive
    double residual = 0.0;  // relative fit residual
};

struct WeightedReebGraph {
    Provenance provenance = Provenance::oracle;
    Interval window;
    std::vector<ReebVertex> vertices; // sorted by value
    std::vector<ReebEdge> edges;      // sorted by (interval.lo, then leftmost lineage order)
    std::vector<TaylorWeights> taylor;

    int vertex_degree(int v) const;
    // Edges of the lineage chain containing edge id, ordered by band.
    std::vector<int> lineage_chain(int edge_id) const;
};

// Checks degree constraints, interval partitioning, positive finite lengths.
// Throws UsageError with a description on violation.
void validate_structure(const WeightedReebGraph& g);

// Per-order tolerances for Taylor weight comparison. Relative to the
// reference coefficient, with an absolute floor scaled off the leading one.
struct TaylorTolerance {
    std::array<double, 4> rel{0.02, 0.02, 0.10, -1.0}; // -1 disables the order
    double floor_frac = 0.05; // absolute floor = floor_frac * |leading| * scale^-m
    double scale = 0.1;       // expansion variable scale used for the floor
};

struct EquivalenceOptions {
    double length_rel_tol = 0.02;
    double vertex_value_tol = 0.05; // |c_A - c_B| allowed (classifier bracket width)
    TaylorTolerance taylor;
    bool compare_taylor = true;
};

struct EquivalenceResult {
    bool equivalent = false;
    std::string diff; // first mismatch, empty when equivalent
};

EquivalenceResult graphs_equivalent(const WeightedReebGraph& a, const WeightedReebGraph& b,
                                    const EquivalenceOptions& opts = {});

} // namespace specho
