#pragma once

// Small numerical kernels shared across the library: adaptive quadrature,
// bracketed root finding, natural cubic splines, weighted polynomial least
// squares and simple regression statistics. Everything is deterministic;
// Eigen supplies the linear algebra.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "specho/errors.hpp"

namespace specho {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double x) const { return x >= lo && x <= hi; }
    bool empty() const { return !(lo < hi); }
};

namespace num {

// ---------------------------------------------------------------------------
// Gauss–Kronrod 15(7) adaptive quadrature.
// ---------------------------------------------------------------------------

namespace detail {
// Nodes/weights on [-1,1]; Gauss-7 is embedded in Kronrod-15.
inline constexpr double gk_nodes[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,                0.207784955007898,
    0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
inline constexpr double gk_wk[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
inline constexpr double gk_wg[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870};
} // namespace detail

template <typename F>
std::pair<double, double> gauss_kronrod_15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double kron = 0.0, gauss = 0.0;
    for (int i = 0; i < 15; ++i) {
        const double v = f(c + h * detail::gk_nodes[i]);
        kron += detail::gk_wk[i] * v;
        if (i % 2 == 1) gauss += detail::gk_wg[i / 2] * v;
    }
    kron *= h;
    gauss *= h;
    return {kron, std::abs(kron - gauss)};
}

// Adaptive bisection on the GK error estimate. Throws PrecisionError if the
// requested tolerance is unreachable within the depth limit.
template <typename F>
double integrate(const F& f, double a, double b, double rel_tol = 1e-11,
                 double abs_tol = 1e-14, int max_depth = 48) {
    struct Seg {
        double a, b, val, err;
        int depth;
    };
    auto [v0, e0] = gauss_kronrod_15(f, a, b);
    std::vector<Seg> stack{{a, b, v0, e0, 0}};
    double total = 0.0, total_err = 0.0, rough = std::abs(v0);
    while (!stack.empty()) {
        Seg s = stack.back();
        stack.pop_back();
        const double tol =
            std::max(abs_tol, rel_tol * std::max(rough, std::abs(s.val))) *
            std::max(1e-3, (s.b - s.a) / std::max(b - a, 1e-300));
        if (s.err <= tol || s.depth >= max_depth) {
            if (s.depth >= max_depth && s.err > 1e3 * tol)
                throw PrecisionError("integrate: refinement limit reached without convergence");
            total += s.val;
            total_err += s.err;
            continue;
        }
        const double m = 0.5 * (s.a + s.b);
        auto [vl, el] = gauss_kronrod_15(f, s.a, m);
        auto [vr, er] = gauss_kronrod_15(f, m, s.b);
        rough = std::max(rough, std::abs(vl) + std::abs(vr));
        stack.push_back({s.a, m, vl, el, s.depth + 1});
        stack.push_back({m, s.b, vr, er, s.depth + 1});
    }
    (void)total_err;
    return total;
}

// ---------------------------------------------------------------------------
// Root finding.
// ---------------------------------------------------------------------------

// Brent's method on a sign-changing bracket.
template <typename F>
double brent(const F& f, double a, double b, double xtol = 1e-14, int max_iter = 200) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw UsageError("brent: endpoints do not bracket a root");
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * xtol;
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= tol || fb == 0.0) return b;
        if (std::abs(e) < tol || std::abs(fa) <= std::abs(fb)) {
            d = e = m;
        } else {
            double p, q, r, s = fb / fa;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                r = fb / fc;
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = e = m;
            }
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol) ? d : (m > 0 ? tol : -tol);
        fb = f(b);
        if ((fb > 0) == (fc > 0)) {
            c = a; fc = fa; d = e = b - a;
        }
    }
    return b;
}

// Scans [a,b] on n points and returns one root per sign change.
template <typename F>
std::vector<double> roots_on_grid(const F& f, double a, double b, int n, double xtol = 1e-14) {
    std::vector<double> out;
    double x0 = a, f0 = f(a);
    for (int i = 1; i <= n; ++i) {
        const double x1 = a + (b - a) * i / n;
        const double f1 = f(x1);
        if (f0 == 0.0) out.push_back(x0);
        else if (f0 * f1 < 0.0) out.push_back(brent(f, x0, x1, xtol));
        x0 = x1;
        f0 = f1;
    }
    if (f0 == 0.0) out.push_back(b);
    return out;
}

// ---------------------------------------------------------------------------
// Natural cubic spline with derivatives up to order 3.
// ---------------------------------------------------------------------------

class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> x, std::vector<double> y) { fit(std::move(x), std::move(y)); }

    void fit(std::vector<double> x, std::vector<double> y) {
        if (x.size() != y.size() || x.size() < 2)
            throw UsageError("CubicSpline: need at least two samples");
        for (size_t i = 1; i < x.size(); ++i)
            if (!(x[i] > x[i - 1])) throw UsageError("CubicSpline: abscissae must increase");
        x_ = std::move(x);
        y_ = std::move(y);
        const int n = static_cast<int>(x_.size());
        m_.assign(n, 0.0);
        if (n == 2) return;
        // Second derivatives from the natural-spline tridiagonal system.
        Eigen::VectorXd diag(n - 2), rhs(n - 2), lower(n - 2), upper(n - 2);
        for (int i = 1; i < n - 1; ++i) {
            const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
            diag[i - 1] = 2.0 * (h0 + h1);
            lower[i - 1] = h0;
            upper[i - 1] = h1;
            rhs[i - 1] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
        }
        // Thomas algorithm.
        for (int i = 1; i < n - 2; ++i) {
            const double w = lower[i] / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        Eigen::VectorXd sol(n - 2);
        sol[n - 3] = rhs[n - 3] / diag[n - 3];
        for (int i = n - 4; i >= 0; --i) sol[i] = (rhs[i] - upper[i] * sol[i + 1]) / diag[i];
        for (int i = 1; i < n - 1; ++i) m_[i] = sol[i - 1];
    }

    double min_x() const { return x_.front(); }
    double max_x() const { return x_.back(); }
    const std::vector<double>& knots() const { return x_; }
    const std::vector<double>& values() const { return y_; }

    // deriv = 0..3. Evaluation outside the knot range extends the end cubic.
    double operator()(double x, int deriv = 0) const {
        const int n = static_cast<int>(x_.size());
        int i = static_cast<int>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
        i = std::clamp(i, 0, n - 2);
        const double h = x_[i + 1] - x_[i];
        const double A = (x_[i + 1] - x) / h, B = (x - x_[i]) / h;
        switch (deriv) {
            case 0:
                return A * y_[i] + B * y_[i + 1] +
                       ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6.0;
            case 1:
                return (y_[i + 1] - y_[i]) / h -
                       (3.0 * A * A - 1.0) / 6.0 * h * m_[i] +
                       (3.0 * B * B - 1.0) / 6.0 * h * m_[i + 1];
            case 2:
                return A * m_[i] + B * m_[i + 1];
            case 3:
                return (m_[i + 1] - m_[i]) / h;
            default:
                throw UsageError("CubicSpline: derivative order must be 0..3");
        }
    }

private:
    std::vector<double> x_, y_;
    std::vector<double> m_; // second derivatives at knots
};

// ---------------------------------------------------------------------------
// Least squares and regression statistics.
// ---------------------------------------------------------------------------

struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double slope_stderr = 0.0;
    double t_stat = 0.0; // slope / stderr
    double rms_residual = 0.0;
};

inline LinearFit linear_fit(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const int n = static_cast<int>(x.size());
    if (n < 3) throw UsageError("linear_fit: need at least 3 points");
    const double xm = x.mean(), ym = y.mean();
    const double sxx = (x.array() - xm).square().sum();
    const double sxy = ((x.array() - xm) * (y.array() - ym)).sum();
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = ym - fit.slope * xm;
    const Eigen::ArrayXd res = y.array() - fit.intercept - fit.slope * x.array();
    const double s2 = res.square().sum() / (n - 2);
    fit.rms_residual = std::sqrt(res.square().mean());
    fit.slope_stderr = std::sqrt(std::max(s2 / sxx, 1e-300));
    fit.t_stat = fit.slope / fit.slope_stderr;
    return fit;
}

// Weighted least squares y ~ basis columns; returns coefficients. Condition
// number of the weighted design matrix is written to *condition when given.
inline Eigen::VectorXd weighted_lsq(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                                    const Eigen::VectorXd& w, double* condition = nullptr) {
    Eigen::MatrixXd A = w.asDiagonal() * design;
    Eigen::VectorXd b = w.asDiagonal() * y;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (condition) {
        const auto& sv = svd.singularValues();
        *condition = sv(0) / std::max(sv(sv.size() - 1), 1e-300);
    }
    return svd.solve(b);
}

// Polynomial fit of given degree, plain or weighted; coefficients low-to-high.
inline Eigen::VectorXd polyfit(const Eigen::VectorXd& x, const Eigen::VectorXd& y, int degree,
                               const Eigen::VectorXd* w = nullptr) {
    Eigen::MatrixXd design(x.size(), degree + 1);
    for (int j = 0; j <= degree; ++j)
        design.col(j) = (j == 0) ? Eigen::VectorXd::Ones(x.size()).eval()
                                 : (design.col(j - 1).array() * x.array()).matrix().eval();
    Eigen::VectorXd weights = w ? *w : Eigen::VectorXd::Ones(x.size());
    return weighted_lsq(design, y, weights);
}

inline double polyval(const Eigen::VectorXd& coeffs, double x) {
    double v = 0.0;
    for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i) v = v * x + coeffs[i];
    return v;
}

// Log-spaced grid from a down to b (a > b > 0), n points.
inline std::vector<double> log_spaced(double a, double b, int n) {
    std::vector<double> out(n);
    const double la = std::log(a), lb = std::log(b);
    for (int i = 0; i < n; ++i) out[i] = std::exp(la + (lb - la) * i / (n - 1));
    return out;
}

} // namespace num
} // namespace specho
