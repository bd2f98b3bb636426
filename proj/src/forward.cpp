#include "specho/forward.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "specho/errors.hpp"
#include "specho/numerov.hpp"

namespace specho {

int SpectrumWindow::count_in(double lo, double hi) const {
    const auto a = std::lower_bound(eigenvalues.begin(), eigenvalues.end(), lo);
    const auto b = std::upper_bound(eigenvalues.begin(), eigenvalues.end(), hi);
    return static_cast<int>(b - a);
}

HbarLadder HbarLadder::geometric(double h0, double factor, int count) {
    if (!(h0 > 0) || !(factor > 0) || factor >= 1.0 || count < 1)
        throw UsageError("HbarLadder::geometric: need h0>0, factor in (0,1), count>=1");
    HbarLadder l;
    double h = h0;
    for (int i = 0; i < count; ++i, h *= factor) l.values.push_back(h);
    return l;
}

HbarLadder HbarLadder::arithmetic(double h0, double step, int count) {
    if (!(h0 > 0) || !(step > 0) || count < 1 || h0 - (count - 1) * step <= 0)
        throw UsageError("HbarLadder::arithmetic: ladder must stay positive");
    HbarLadder l;
    for (int i = 0; i < count; ++i) l.values.push_back(h0 - i * step);
    return l;
}

namespace {

// Spatial extent of {V <= level} inside the scan box.
Interval allowed_extent(const Symbol& sym, const Box2& box, double level) {
    const auto& V = sym.potential;
    const int n = 8192;
    double lo = 1e300, hi = -1e300;
    double x_prev = box.x_lo, f_prev = V(x_prev) - level;
    for (int i = 1; i <= n; ++i) {
        const double x = box.x_lo + (box.x_hi - box.x_lo) * i / n;
        const double f = V(x) - level;
        if (f <= 0) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        if (f_prev * f < 0) {
            const double r = num::brent([&](double t) { return V(t) - level; }, x_prev, x, 1e-13);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        x_prev = x;
        f_prev = f;
    }
    if (lo > hi) throw UsageError("matrix_spectrum: window lies entirely below the potential");
    return {lo, hi};
}

double turning_point_width(const Symbol& sym, double x_turn, double hbar) {
    const double slope = std::max(std::abs(sym.potential_deriv(x_turn)), 1e-2);
    return std::cbrt(hbar * hbar / (2.0 * slope));
}

} // namespace

SpectrumWindow matrix_spectrum(const Symbol& sym, const Box2& scan_box, double hbar,
                               Interval window, const MatrixOptions& opts) {
    if (!sym.schrodinger_form())
        throw UsageError("matrix_spectrum: symbol is not of Schrödinger form");
    if (window.empty()) throw UsageError("matrix_spectrum: empty window");
    if (!(hbar > 0) || hbar > 1.0) throw UsageError("matrix_spectrum: hbar must be in (0, 1]");

    const double level = window.hi + 0.1 * window.width();
    const Interval allowed = allowed_extent(sym, scan_box, level);

    Interval domain;
    if (opts.domain) {
        domain = *opts.domain;
        const double need = 2.0 * std::max(turning_point_width(sym, allowed.lo, hbar),
                                           turning_point_width(sym, allowed.hi, hbar));
        if (allowed.lo - domain.lo < need || domain.hi - allowed.hi < need) {
            const double pad = std::max(0.3 * allowed.width(), 3.0 * need);
            std::ostringstream msg;
            msg << "matrix_spectrum: domain [" << domain.lo << ", " << domain.hi
                << "] leaves less than two turning-point widths around the allowed region ["
                << allowed.lo << ", " << allowed.hi << "]; suggested domain ["
                << allowed.lo - pad << ", " << allowed.hi + pad << "]";
            throw UsageError(msg.str());
        }
    } else {
        const double need = 2.0 * std::max(turning_point_width(sym, allowed.lo, hbar),
                                           turning_point_width(sym, allowed.hi, hbar));
        const double pad = std::max(0.3 * allowed.width(), 3.0 * need);
        domain = {allowed.lo - pad, allowed.hi + pad};
    }

    // Per-eigenvalue accuracy target and the grid that achieves it: Numerov
    // eigenvalue error ~ (k dx)^4 E / 240 with k the largest local wavenumber.
    double v_min = sym.potential(domain.lo);
    {
        const int m = 4096;
        for (int i = 0; i <= m; ++i)
            v_min = std::min(v_min, sym.potential(domain.lo + domain.width() * i / m));
    }
    const double e_span = std::max({window.hi - v_min, 1e-6});
    const double accuracy = opts.accuracy > 0
                                ? opts.accuracy
                                : std::max(1e-3 * hbar * hbar, 5e-14 * std::max(1.0, e_span));
    const double k_max = std::sqrt(2.0 * e_span) / hbar;
    double dx = 0.7 * std::pow(240.0 * accuracy / e_span, 0.25) / k_max;
    dx = std::min(dx, 2.0 * M_PI * hbar / (32.0 * std::sqrt(2.0 * e_span))); // 32 per wavelength
    int n_grid = opts.n_grid > 0 ? opts.n_grid
                                 : std::max(64, static_cast<int>(std::ceil(domain.width() / dx)));
    if (n_grid > 8'000'000)
        throw PrecisionError("matrix_spectrum: accuracy target requires an infeasible grid");

    auto solve = [&](int n) {
        const double step = domain.width() / (n + 1);
        std::vector<double> pot(n);
        for (int i = 0; i < n; ++i) pot[i] = sym.potential(domain.lo + step * (i + 1));
        NumerovPencil pencil = numerov_pencil(pot, hbar, step);
        // full-accuracy runs keep bisection noise well under the discretization
        // budget; counting runs can afford coarser roots
        const double tol = std::max(accuracy / (opts.richardson_check ? 20.0 : 5.0),
                                    1e-15 * std::max(1.0, e_span));
        return eigenvalues_in_window(pencil, window.lo - 1e-14 * std::max(1.0, e_span),
                                     window.hi, tol);
    };

    std::vector<double> eigs = solve(n_grid);
    if (opts.richardson_check) {
        const std::vector<double> fine = solve(2 * n_grid);
        if (fine.size() == eigs.size()) {
            double worst = 0.0;
            for (size_t i = 0; i < eigs.size(); ++i)
                worst = std::max(worst, std::abs(eigs[i] - fine[i]) / (1.0 - 1.0 / 16.0));
            if (worst > accuracy) {
                std::ostringstream msg;
                msg << "matrix_spectrum: Richardson check failed: estimated error " << worst
                    << " exceeds target " << accuracy;
                throw PrecisionError(msg.str());
            }
        }
        // boundary straddlers may differ by one entry; the finer grid wins
        eigs = fine;
    }

    SpectrumWindow sw;
    sw.hbar = hbar;
    sw.window = window;
    sw.eigenvalues = std::move(eigs);
    sw.source = SpectrumSource::matrix;
    sw.meta.domain = domain;
    sw.meta.n_grid = n_grid;
    sw.meta.accuracy = accuracy;
    return sw;
}

SpectrumWindow matrix_spectrum(const CatalogEntry& entry, double hbar, Interval window,
                               const MatrixOptions& opts) {
    return matrix_spectrum(entry.symbol, entry.scan_box, hbar, window, opts);
}

SpectrumWindow bohr_sommerfeld_spectrum(const CatalogEntry& entry, double hbar, Interval band,
                                        int component) {
    const Symbol& sym = entry.symbol;
    if (!sym.schrodinger_form())
        throw UsageError("bohr_sommerfeld_spectrum: Schrödinger-form symbols only");
    if (band.empty()) throw UsageError("bohr_sommerfeld_spectrum: empty band");
    {
        auto crits = find_critical_points(sym, entry.scan_box, band);
        if (!crits.empty()) {
            std::ostringstream msg;
            msg << "bohr_sommerfeld_spectrum: band contains the critical value "
                << crits.front().value << "; split the band";
            throw UsageError(msg.str());
        }
    }

    // Track the component's interval by a representative point fixed at the
    // band midpoint, then spline the action over the band.
    const auto mid_ivs = allowed_intervals(sym, band.mid(), entry.scan_box.x_lo,
                                           entry.scan_box.x_hi);
    if (component < 0 || component >= static_cast<int>(mid_ivs.size()))
        throw UsageError("bohr_sommerfeld_spectrum: component index out of range");
    double x_rep = 0.5 * (mid_ivs[component].first + mid_ivs[component].second);
    {
        // the potential minimum is stable across the whole band
        const auto& iv = mid_ivs[component];
        const int m = 512;
        double best_v = sym.potential(x_rep);
        for (int i = 0; i <= m; ++i) {
            const double x = iv.first + (iv.second - iv.first) * i / m;
            if (sym.potential(x) < best_v) {
                best_v = sym.potential(x);
                x_rep = x;
            }
        }
    }

    auto component_interval = [&](double lam) -> std::pair<double, double> {
        for (const auto& iv :
             allowed_intervals(sym, lam, entry.scan_box.x_lo, entry.scan_box.x_hi))
            if (x_rep >= iv.first && x_rep <= iv.second) return iv;
        throw UsageError("bohr_sommerfeld_spectrum: component vanishes inside the band");
    };

    const int n_nodes = 96;
    std::vector<double> lams(n_nodes), acts(n_nodes), periods(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
        const double lam = band.lo + band.width() * i / (n_nodes - 1);
        const auto iv = component_interval(lam);
        lams[i] = lam;
        acts[i] = well_action(sym, lam, iv);
        periods[i] = well_period(sym, lam, iv);
    }
    for (int i = 1; i < n_nodes; ++i)
        if (periods[i] * periods[0] <= 0)
            throw UsageError("bohr_sommerfeld_spectrum: period changes sign on the band; "
                             "split the band");
    num::CubicSpline g0(lams, acts);

    SpectrumWindow sw;
    sw.hbar = hbar;
    sw.window = band;
    sw.source = SpectrumSource::bohr_sommerfeld;
    sw.meta.component = component;
    const double two_pi_h = 2.0 * M_PI * hbar;
    const double g_lo = std::min(acts.front(), acts.back());
    const double g_hi = std::max(acts.front(), acts.back());
    const long n_min = std::lround(std::ceil(g_lo / two_pi_h - 0.5));
    const long n_max = std::lround(std::floor(g_hi / two_pi_h - 0.5));
    for (long n = n_min; n <= n_max; ++n) {
        const double target = two_pi_h * (n + 0.5);
        if (target < g_lo || target > g_hi) continue;
        double lam = num::brent([&](double l) { return g0(l) - target; }, band.lo, band.hi, 1e-13);
        // polish on the exact quadrature
        for (int it = 0; it < 3; ++it) {
            const auto iv = component_interval(lam);
            const double g = well_action(sym, lam, iv);
            const double tau = well_period(sym, lam, iv);
            lam -= (g - target) / tau;
        }
        if (band.contains(lam)) sw.eigenvalues.push_back(lam);
    }
    std::sort(sw.eigenvalues.begin(), sw.eigenvalues.end());
    return sw;
}

std::vector<SpectrumWindow> spectra_over_ladder(const CatalogEntry& entry,
                                                const HbarLadder& ladder, Interval window,
                                                const MatrixOptions& opts) {
    std::vector<SpectrumWindow> out;
    out.reserve(ladder.values.size());
    for (double h : ladder.values) out.push_back(matrix_spectrum(entry, h, window, opts));
    return out;
}

bool ladder_counts_consistent(const std::vector<SpectrumWindow>& spectra) {
    for (size_t i = 1; i < spectra.size(); ++i) {
        const double ratio_h = spectra[i - 1].hbar / spectra[i].hbar;
        if (std::abs(ratio_h - 2.0) > 1e-9) continue; // only check halving steps
        if (spectra[i - 1].count() == 0) return false;
        const double r = static_cast<double>(spectra[i].count()) / spectra[i - 1].count();
        if (r < 1.5 || r > 2.5) return false;
    }
    return true;
}

} // namespace specho
