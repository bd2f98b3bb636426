#include "specho/taylor_fit.hpp"

#include <cmath>

#include "specho/errors.hpp"
#include "specho/numerics.hpp"

namespace specho {

LogModelFit fit_log_model(const std::vector<double>& u, const std::vector<double>& tau,
                          const std::vector<double>* weights) {
    const int n = static_cast<int>(u.size());
    if (n < 10 || tau.size() != u.size())
        throw UsageError("fit_log_model: need at least 10 matched samples");

    double u_scale = 0.0;
    for (double v : u) u_scale = std::max(u_scale, std::abs(v));
    if (u_scale == 0.0) throw UsageError("fit_log_model: degenerate abscissae");

    // Scaled variable keeps the Vandermonde part conditioned; coefficients are
    // unscaled afterwards. ln|u| = ln|u/s| + ln s mixes the a-basis into b,
    // so fit in scaled coordinates and unmix analytically.
    Eigen::MatrixXd design(n, 8);
    Eigen::VectorXd y(n), w(n);
    for (int i = 0; i < n; ++i) {
        const double us = u[i] / u_scale;
        const double L = std::log(std::abs(us));
        double p = 1.0;
        for (int m = 0; m < 4; ++m) {
            design(i, m) = p * L;
            design(i, 4 + m) = p;
            p *= us;
        }
        y[i] = tau[i];
        w[i] = weights ? (*weights)[i] : 1.0;
    }
    double condition = 0.0;
    Eigen::VectorXd coef = num::weighted_lsq(design, y, w, &condition);
    if (condition > 1e10)
        throw PrecisionError("fit_log_model: design matrix condition exceeds 1e10; "
                             "widen the sample distance range");

    LogModelFit fit;
    fit.condition = condition;
    const double ls = std::log(u_scale);
    for (int m = 0; m < 4; ++m) {
        const double scale_m = std::pow(u_scale, m);
        const double a_m = coef[m] / scale_m;
        fit.log_coeffs[m] = a_m;
        fit.smooth_coeffs[m] = coef[4 + m] / scale_m - a_m * ls;
    }

    double ss = 0.0, sy = 0.0;
    for (int i = 0; i < n; ++i) {
        const double L = std::log(std::abs(u[i]));
        const double model =
            series::eval(fit.log_coeffs, u[i]) * L + series::eval(fit.smooth_coeffs, u[i]);
        ss += w[i] * (tau[i] - model) * (tau[i] - model);
        sy += w[i] * tau[i] * tau[i];
    }
    fit.residual = std::sqrt(ss / std::max(sy, 1e-300));

    if (fit.log_coeffs[0] < 0.0) {
        fit.flipped = true;
        fit.log_coeffs = -fit.log_coeffs;
        fit.smooth_coeffs = -fit.smooth_coeffs;
    }
    return fit;
}

TaylorRecord taylor_from_fit(const LogModelFit& fit, double factor) {
    if (factor <= 0.0) throw UsageError("taylor_from_fit: factor must be positive");
    TaylorRecord rec;
    rec.flipped = fit.flipped;
    rec.residual = fit.residual;
    rec.f_prime = fit.log_coeffs / factor;
    rec.h = fit.smooth_coeffs;
    const double alpha = rec.f_prime[0];
    if (alpha <= 0.0)
        throw PrecisionError("taylor_from_fit: leading f' not positive after normalization");

    // f(u) = ∫ f' with f(0) = 0; f/u keeps all four coefficients.
    const auto& fp = rec.f_prime;
    const series::Coeffs f_over_u =
        series::make(fp[0], fp[1] / 2.0, fp[2] / 3.0, fp[3] / 4.0);
    series::Coeffs log_fu = series::log_of_normalized(f_over_u);
    log_fu[0] += std::log(std::abs(alpha));

    // g∘f = h / f' - factor · ln|f/u|
    const series::Coeffs g_of_f = series::divide(rec.h, fp) - factor * log_fu;

    // Invert q = f(u): g(q) = (g∘f)(u(q)).
    series::Coeffs f_series = series::make(0.0, fp[0], fp[1] / 2.0, fp[2] / 3.0);
    const series::Coeffs u_of_q = series::revert(f_series);
    rec.g = series::compose(g_of_f, u_of_q);
    return rec;
}

TaylorRecord extract_taylor(const std::vector<double>& u, const std::vector<double>& tau,
                            double factor, const std::vector<double>* weights) {
    return taylor_from_fit(fit_log_model(u, tau, weights), factor);
}

} // namespace specho
