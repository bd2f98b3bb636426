#include "specho/density.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "specho/errors.hpp"

namespace specho {

double rho_hbar(const SpectrumWindow& spectrum, double E, double gamma) {
    const double r = std::pow(spectrum.hbar, gamma);
    return std::pow(spectrum.hbar, 1.0 - gamma) * spectrum.count_in(E - r, E + r);
}

namespace {

// Rungs whose ball fits inside the window, sorted by decreasing ħ.
std::vector<const SpectrumWindow*> usable_rungs(const std::vector<SpectrumWindow>& spectra,
                                                double E, double gamma) {
    std::vector<const SpectrumWindow*> out;
    for (const auto& s : spectra) {
        const double r = std::pow(s.hbar, gamma);
        if (E - r >= s.window.lo && E + r <= s.window.hi) out.push_back(&s);
    }
    std::sort(out.begin(), out.end(),
              [](const SpectrumWindow* a, const SpectrumWindow* b) { return a->hbar > b->hbar; });
    return out;
}

} // namespace

DensityEstimate density_of_states(const std::vector<SpectrumWindow>& spectra, double E,
                                  double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw UsageError("density_of_states: gamma must be in (0,1)");
    auto rungs = usable_rungs(spectra, E, gamma);
    if (rungs.size() < 3) {
        std::ostringstream msg;
        msg << "density_of_states: ball B(" << E << ", hbar^" << gamma
            << ") leaves the window on all but " << rungs.size() << " rungs";
        throw UsageError(msg.str());
    }

    DensityEstimate d;
    d.E = E;
    d.gamma = gamma;
    for (const auto* s : rungs) d.per_hbar.emplace_back(s->hbar, rho_hbar(*s, E, gamma));

    // Growth against ln(1/ħ) over the ladder tail.
    const int tail = std::min<int>(5, d.per_hbar.size());
    Eigen::VectorXd x(tail), y(tail);
    for (int i = 0; i < tail; ++i) {
        const auto& [h, rho] = d.per_hbar[d.per_hbar.size() - tail + i];
        x[i] = std::log(1.0 / h);
        y[i] = rho;
    }
    const auto fit = num::linear_fit(x, y);
    d.growth_slope = fit.slope;
    d.growth_tstat = fit.t_stat;
    const double rho_last = d.per_hbar.back().second;
    const double still_growing =
        (tail >= 2) ? (y[tail - 1] - y[tail - 2]) - 0.8 * fit.slope * (x[tail - 1] - x[tail - 2])
                    : 0.0;
    d.infinite = fit.t_stat > 4.0 && fit.slope > 0.08 * std::max(rho_last, 1.0) &&
                 still_growing > -0.25 * fit.slope * (x[tail - 1] - x[tail - 2]);

    // Limit: least squares against the ħ^{min(γ,1-γ)} correction term.
    const double expo = std::min(gamma, 1.0 - gamma);
    const int m = std::min<int>(4, d.per_hbar.size());
    Eigen::VectorXd hx(m), hy(m);
    for (int i = 0; i < m; ++i) {
        const auto& [h, rho] = d.per_hbar[d.per_hbar.size() - m + i];
        hx[i] = std::pow(h, expo);
        hy[i] = rho;
    }
    d.limit = (m >= 3) ? num::linear_fit(hx, hy).intercept : hy.mean();
    return d;
}

EnergyClassification classify_energy(const std::vector<SpectrumWindow>& spectra, double E,
                                     double gamma) {
    if (spectra.size() < 4)
        throw UsageError("classify_energy: ladder too short (need at least 4 rungs)");
    auto rungs = usable_rungs(spectra, E, gamma);
    if (rungs.size() < 4)
        throw UsageError("classify_energy: fewer than 4 usable rungs at this energy");

    EnergyClassification ec;
    ec.E = E;

    const auto base = density_of_states(spectra, E, gamma);
    ec.evidence.slope = base.growth_slope;
    ec.evidence.tstat = base.growth_tstat;
    if (base.infinite) {
        ec.verdict = Verdict::hyperbolic;
        return ec;
    }

    // One-sided limits from probes at ±{1,2,4}·ħ_min^γ, linearly extrapolated.
    const double h_min = rungs.back()->hbar;
    const double delta = std::pow(h_min, gamma);
    auto one_sided = [&](double sign) {
        Eigen::VectorXd dx(3), dy(3);
        int k = 0;
        for (double mult : {1.0, 2.0, 4.0}) {
            const double probe = E + sign * mult * delta;
            dx[k] = mult * delta;
            dy[k] = density_of_states(spectra, probe, gamma).limit;
            ++k;
        }
        return num::linear_fit(dx, dy).intercept;
    };
    const double rho_below = one_sided(-1.0);
    const double rho_above = one_sided(+1.0);
    ec.evidence.jump =
        std::abs(rho_above - rho_below) / std::max({rho_above, rho_below, 0.1});
    if (ec.evidence.jump > 0.2) {
        ec.verdict = Verdict::elliptic;
        return ec;
    }

    // Smoothness residual of the 7-probe quadratic fit.
    Eigen::VectorXd px(7), py(7);
    int k = 0;
    for (double mult : {-4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0}) {
        px[k] = mult * delta;
        py[k] = density_of_states(spectra, E + mult * delta, gamma).limit;
        ++k;
    }
    const Eigen::VectorXd q = num::polyfit(px, py, 2);
    double resid = 0.0;
    for (int i = 0; i < 7; ++i)
        resid = std::max(resid, std::abs(py[i] - num::polyval(q, px[i])) /
                                    std::max(1.0, std::abs(py[i])));
    ec.evidence.smooth_residual = resid;
    ec.verdict = Verdict::regular;
    return ec;
}

namespace {

double tail_rho(const std::vector<SpectrumWindow>& spectra, double E, double gamma) {
    // average of the two smallest usable rungs: low-jitter local density
    auto rungs = usable_rungs(spectra, E, gamma);
    if (rungs.empty()) throw UsageError("tail_rho: no usable rungs");
    double acc = 0.0;
    int n = 0;
    for (size_t i = rungs.size() >= 2 ? rungs.size() - 2 : 0; i < rungs.size(); ++i) {
        acc += rho_hbar(*rungs[i], E, gamma);
        ++n;
    }
    return acc / n;
}

double growth_slope_at(const std::vector<SpectrumWindow>& spectra, double E, double gamma) {
    return density_of_states(spectra, E, gamma).growth_slope;
}

} // namespace

ScanResult scan_classify(const std::vector<SpectrumWindow>& spectra, Interval window,
                         double step, double gamma) {
    if (spectra.size() < 4) throw UsageError("scan_classify: ladder too short");
    std::vector<double> hbars;
    for (const auto& s : spectra) hbars.push_back(s.hbar);
    std::sort(hbars.begin(), hbars.end());
    const double h_min = hbars.front();
    const double delta_min = std::pow(h_min, gamma);
    if (step <= 0.0) step = 4.0 * delta_min;
    if (step < 4.0 * delta_min)
        throw UsageError("scan_classify: step below 4·hbar_min^gamma");

    // Probes need their ±4δ sub-probes usable on at least 4 rungs.
    const double h4 = hbars.size() >= 4 ? hbars[3] : hbars.back();
    const double margin = 4.0 * delta_min + std::pow(h4, gamma) + 1e-12;

    ScanResult res;
    std::vector<int> flags; // 0 regular, 1 elliptic, 2 hyperbolic
    std::vector<double> probe_energies;
    for (double E = window.lo + margin; E <= window.hi - margin + 1e-15; E += step) {
        auto ec = classify_energy(spectra, E, gamma);
        probe_energies.push_back(E);
        flags.push_back(ec.verdict == Verdict::regular ? 0
                        : ec.verdict == Verdict::elliptic ? 1 : 2);
        res.probes.push_back(ec);
    }

    // Cluster consecutive non-regular probes; hyperbolic evidence dominates
    // (a hyperbolic value surrounded by strong density change can flag a
    // neighbouring probe elliptic).
    size_t i = 0;
    while (i < flags.size()) {
        if (flags[i] == 0) {
            ++i;
            continue;
        }
        size_t j = i;
        bool any_hyp = false;
        while (j < flags.size() && flags[j] != 0) {
            any_hyp = any_hyp || flags[j] == 2;
            ++j;
        }
        const double lo = probe_energies[i] - step;
        const double hi = probe_energies[j - 1] + step;

        CriticalEstimate est;
        if (any_hyp) {
            est.kind = CriticalKind::hyperbolic;
            // ternary search of the growth slope
            double a = lo, b = hi;
            for (int it = 0; it < 48 && (b - a) > 0.5 * delta_min; ++it) {
                const double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
                if (growth_slope_at(spectra, m1, gamma) < growth_slope_at(spectra, m2, gamma))
                    a = m1;
                else
                    b = m2;
            }
            est.value = 0.5 * (a + b);
            est.bracket = std::max(0.5 * (b - a), delta_min);
        } else {
            est.kind = CriticalKind::elliptic;
            // bisection on the half-filled ball level
            const double rho_lo = density_of_states(spectra, lo, gamma).limit;
            const double rho_hi = density_of_states(spectra, hi, gamma).limit;
            const double mid_level = 0.5 * (rho_lo + rho_hi);
            const double sgn = rho_hi > rho_lo ? 1.0 : -1.0;
            double a = lo, b = hi;
            for (int it = 0; it < 60 && (b - a) > 0.02 * delta_min; ++it) {
                const double m = 0.5 * (a + b);
                if (sgn * (tail_rho(spectra, m, gamma) - mid_level) < 0.0)
                    a = m;
                else
                    b = m;
            }
            est.value = 0.5 * (a + b);
            est.bracket = std::max(0.5 * (b - a), 0.25 * delta_min);
        }
        res.critical_values.push_back(est);
        i = j;
    }

    std::sort(res.critical_values.begin(), res.critical_values.end(),
              [](const CriticalEstimate& a, const CriticalEstimate& b) {
                  return a.value < b.value;
              });
    for (size_t k = 1; k < res.critical_values.size(); ++k) {
        const auto &a = res.critical_values[k - 1], &b = res.critical_values[k];
        if (a.kind == b.kind && (b.value - a.value) < 2.0 * std::max(a.bracket, b.bracket)) {
            std::ostringstream msg;
            msg << "two " << to_string(a.kind) << " critical values at " << a.value << " and "
                << b.value << " fall inside one bracket: cannot be resolved";
            res.warnings.push_back(msg.str());
        }
    }
    return res;
}

} // namespace specho
