#pragma once

// Marching-squares level-set extraction with per-edge root refinement.
// Produces closed polylines; an open chain hitting the scan box boundary is a
// properness violation and throws.

#include <Eigen/Dense>

#include <vector>

#include "specho/symbols.hpp"

namespace specho {

struct Contour {
    std::vector<Eigen::Vector2d> points; // closed: points.front() == points.back()
    double polyline_action = 0.0;        // ∮ ξ dx, oriented positive
};

// Extracts all closed contours of p = lambda inside box on a resolution² grid.
// Crossing points are refined by 1D root solves along grid edges.
std::vector<Contour> extract_contours(const Symbol& sym, double lambda, const Box2& box,
                                      int resolution);

// Trapezoid ∮ ξ dx around a closed polyline (positive orientation enforced by caller).
double polyline_action(const std::vector<Eigen::Vector2d>& pts);

// Arc-length integral ∮ ds / |∇p| around a closed polyline: the component period.
double polyline_period(const Symbol& sym, const std::vector<Eigen::Vector2d>& pts);

} // namespace specho
