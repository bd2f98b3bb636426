#pragma once

// Log-model fitting at hyperbolic critical values, shared by the classical
// reference fit and the spectral reconstruction:
//
//   τ(λ) = factor · f'(λ) ln|λ-c| + h(λ),   factor = 2 (trunk), 1 (branch)
//
// with f', h polynomials of degree 3 in u = λ-c. The smooth weight g is
// recovered from (f', h) through h = factor·f'·ln|f(λ)/u| + f'·(g∘f) and
// series reversion of f.

#include <vector>

#include "specho/reeb_graph.hpp"
#include "specho/series.hpp"

namespace specho {

struct LogModelFit {
    series::Coeffs log_coeffs = series::Coeffs::Zero();    // a: coefficient series of ln|u|
    series::Coeffs smooth_coeffs = series::Coeffs::Zero(); // b
    bool flipped = false;     // data was negated so that a[0] > 0
    double residual = 0.0;    // RMS residual relative to RMS(τ)
    double condition = 0.0;   // condition number of the scaled design matrix
};

// Weighted least squares on basis {u^m ln|u|} ∪ {u^m}, m = 0..3. u values are
// signed offsets λ-ĉ (all one side, or mixed). Throws PrecisionError when the
// design matrix condition exceeds 1e10.
LogModelFit fit_log_model(const std::vector<double>& u, const std::vector<double>& tau,
                          const std::vector<double>* weights = nullptr);

struct TaylorRecord {
    series::Coeffs f_prime = series::Coeffs::Zero();
    series::Coeffs h = series::Coeffs::Zero();
    series::Coeffs g = series::Coeffs::Zero();
    bool flipped = false;
    double residual = 0.0;
};

// factor = 2 for the trunk model, 1 for a branch model.
TaylorRecord taylor_from_fit(const LogModelFit& fit, double factor);

TaylorRecord extract_taylor(const std::vector<double>& u, const std::vector<double>& tau,
                            double factor, const std::vector<double>* weights = nullptr);

} // namespace specho
