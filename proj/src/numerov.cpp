#include "specho/numerov.hpp"

#include <cmath>

#include "specho/errors.hpp"

namespace specho {

NumerovPencil numerov_pencil(const std::vector<double>& potential, double hbar, double dx) {
    const int n = static_cast<int>(potential.size());
    if (n < 3) throw UsageError("numerov_pencil: need at least 3 interior points");
    NumerovPencil p;
    p.dx = dx;
    p.a_diag.resize(n);
    p.a_off.resize(n - 1);
    p.b_diag.resize(n);
    p.b_off.resize(n - 1);
    const double kin = 0.5 * hbar * hbar / (dx * dx);
    // The raw Numerov potential term B·diag(V) is not symmetric; we use the
    // symmetrized bridge (V_i + V_{i+1})/24. The difference is the commutator
    // [V, T]/24 whose leading O(dx²) eigenvalue contribution integrates to zero
    // against the eigenfunction, so fourth-order accuracy survives and the
    // pencil stays symmetric-definite for inertia counting.
    for (int i = 0; i < n; ++i) {
        p.a_diag[i] = 2.0 * kin + 10.0 / 12.0 * potential[i];
        p.b_diag[i] = 10.0 / 12.0;
    }
    for (int i = 0; i + 1 < n; ++i) {
        p.a_off[i] = -kin + (potential[i] + potential[i + 1]) / 24.0;
        p.b_off[i] = 1.0 / 12.0;
    }
    return p;
}

int sturm_count(const NumerovPencil& p, double E) {
    const int n = p.size();
    int count = 0;
    double d_prev = 0.0;
    for (int i = 0; i < n; ++i) {
        double d = p.a_diag[i] - E * p.b_diag[i];
        if (i > 0) {
            const double c = p.a_off[i - 1] - E * p.b_off[i - 1];
            d -= c * c / d_prev;
        }
        if (d == 0.0) d = -1e-300;
        if (d < 0.0) ++count;
        d_prev = d;
    }
    return count;
}

std::vector<double> eigenvalues_in_window(const NumerovPencil& p, double lo, double hi,
                                          double abs_tol, double cluster_tol) {
    std::vector<double> out;
    const int n_lo = sturm_count(p, lo), n_hi = sturm_count(p, hi);
    if (n_hi <= n_lo) return out;

    struct Seg {
        double lo, hi;
        int c_lo, c_hi;
    };
    std::vector<Seg> stack{{lo, hi, n_lo, n_hi}};
    std::vector<std::pair<double, int>> isolated; // (value, multiplicity)
    while (!stack.empty()) {
        Seg s = stack.back();
        stack.pop_back();
        const int k = s.c_hi - s.c_lo;
        if (k == 0) continue;
        if (s.hi - s.lo <= std::max(abs_tol, cluster_tol)) {
            isolated.emplace_back(0.5 * (s.lo + s.hi), k);
            continue;
        }
        const double mid = 0.5 * (s.lo + s.hi);
        const int c_mid = sturm_count(p, mid);
        stack.push_back({s.lo, mid, s.c_lo, c_mid});
        stack.push_back({mid, s.hi, c_mid, s.c_hi});
    }
    std::sort(isolated.begin(), isolated.end());
    for (const auto& [val, mult] : isolated)
        for (int m = 0; m < mult; ++m) out.push_back(val);
    return out;
}

} // namespace specho
