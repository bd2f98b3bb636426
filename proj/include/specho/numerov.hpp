#pragma once

// Fourth-order Numerov discretization of -ħ²/2 ψ'' + V ψ = E ψ on a Dirichlet
// interval, as a symmetric generalized tridiagonal pencil (A, B), plus Sturm
// bisection restricted to an energy window. B is positive definite, so the
// LDLᵀ inertia count of A - E B gives the number of eigenvalues below E.

#include <Eigen/Dense>

#include <vector>

#include "specho/numerics.hpp"

namespace specho {

struct NumerovPencil {
    // A = -(ħ²/2) T/dx² + B∘V, B = tridiag(1,10,1)/12, T = tridiag(1,-2,1).
    Eigen::VectorXd a_diag, a_off;
    Eigen::VectorXd b_diag, b_off;
    double dx = 0.0;

    int size() const { return static_cast<int>(a_diag.size()); }
};

NumerovPencil numerov_pencil(const std::vector<double>& potential, double hbar, double dx);

// Number of eigenvalues of (A,B) strictly below E (LDLᵀ inertia).
int sturm_count(const NumerovPencil& p, double E);

// All eigenvalues in (lo, hi], each bisected to abs_tol. Multiple eigenvalues
// closer than cluster_tol are emitted as repeated values.
std::vector<double> eigenvalues_in_window(const NumerovPencil& p, double lo, double hi,
                                          double abs_tol, double cluster_tol = 1e-13);

} // namespace specho
