#pragma once

// Degree-3 truncated power series in one variable. Enough structure to push
// the hyperbolic-vertex weight algebra through: products, composition with a
// series vanishing at 0, reversion, log(series/leading-term).

#include <Eigen/Dense>

#include <cmath>

#include "specho/errors.hpp"

namespace specho::series {

using Coeffs = Eigen::Vector4d; // c0 + c1 u + c2 u^2 + c3 u^3

inline Coeffs make(double c0, double c1 = 0.0, double c2 = 0.0, double c3 = 0.0) {
    return Coeffs(c0, c1, c2, c3);
}

inline Coeffs mul(const Coeffs& a, const Coeffs& b) {
    Coeffs r = Coeffs::Zero();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j + i < 4; ++j) r[i + j] += a[i] * b[j];
    return r;
}

inline double eval(const Coeffs& a, double u) {
    return ((a[3] * u + a[2]) * u + a[1]) * u + a[0];
}

// 1 / a, requires a[0] != 0.
inline Coeffs reciprocal(const Coeffs& a) {
    if (a[0] == 0.0) throw UsageError("series::reciprocal: zero constant term");
    Coeffs r = Coeffs::Zero();
    r[0] = 1.0 / a[0];
    for (int k = 1; k < 4; ++k) {
        double s = 0.0;
        for (int j = 1; j <= k; ++j) s += a[j] * r[k - j];
        r[k] = -s / a[0];
    }
    return r;
}

inline Coeffs divide(const Coeffs& a, const Coeffs& b) { return mul(a, reciprocal(b)); }

// a ∘ inner, where inner has zero constant term.
inline Coeffs compose(const Coeffs& a, const Coeffs& inner) {
    if (inner[0] != 0.0) throw UsageError("series::compose: inner series must vanish at 0");
    Coeffs r = make(a[0]);
    Coeffs p = make(1.0); // inner^k
    for (int k = 1; k < 4; ++k) {
        p = mul(p, inner);
        r += a[k] * p;
    }
    return r;
}

// Reversion of q = f(u) = a1 u + a2 u^2 + a3 u^3 (f[0] must be 0, a1 != 0):
// returns u(q) with zero constant term.
inline Coeffs revert(const Coeffs& f) {
    if (f[0] != 0.0) throw UsageError("series::revert: series must vanish at 0");
    const double a1 = f[1], a2 = f[2], a3 = f[3];
    if (a1 == 0.0) throw UsageError("series::revert: vanishing linear term");
    Coeffs u = Coeffs::Zero();
    u[1] = 1.0 / a1;
    u[2] = -a2 / (a1 * a1 * a1);
    u[3] = (2.0 * a2 * a2 - a1 * a3) / (a1 * a1 * a1 * a1 * a1);
    return u;
}

// log(a) - log(a0) as a series, i.e. log(a / a[0]); requires a[0] > 0 or < 0 (uses |.|).
inline Coeffs log_of_normalized(const Coeffs& a) {
    if (a[0] == 0.0) throw UsageError("series::log_of_normalized: zero constant term");
    Coeffs z = a / a[0];
    z[0] = 0.0; // z = a/a0 - 1
    // log(1+z) = z - z^2/2 + z^3/3
    const Coeffs z2 = mul(z, z), z3 = mul(z2, z);
    return z - 0.5 * z2 + (1.0 / 3.0) * z3;
}

// Antiderivative with zero constant term, truncated to degree 3
// (the u^3 input coefficient would feed u^4 and is dropped).
inline Coeffs integrate(const Coeffs& a) {
    return make(0.0, a[0], a[1] / 2.0, a[2] / 3.0);
}

inline Coeffs derivative(const Coeffs& a) {
    return make(a[1], 2.0 * a[2], 3.0 * a[3], 0.0);
}

} // namespace specho::series
