#include "specho/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "specho/errors.hpp"

namespace specho {

Spectrogram windowed_partition(const SpectrumWindow& spectrum,
                               const Eigen::VectorXd& lambda_grid,
                               const Eigen::VectorXd& t_grid, double window_width) {
    if (lambda_grid.size() < 1 || t_grid.size() < 2)
        throw UsageError("windowed_partition: degenerate grids");
    const double sigma = window_width;
    if (!(sigma > 0)) throw UsageError("windowed_partition: window width must be positive");
    const auto& evs = spectrum.eigenvalues;

    Spectrogram sg;
    sg.hbar = spectrum.hbar;
    sg.lambda_grid = lambda_grid;
    sg.t_grid = t_grid;
    sg.window_width = sigma;
    sg.magnitude.resize(lambda_grid.size(), t_grid.size());

    const double t0 = t_grid[0];
    const double dt = t_grid[1] - t_grid[0];
    const int nt = static_cast<int>(t_grid.size());
    Eigen::VectorXcd acc(nt);

    for (int c = 0; c < lambda_grid.size(); ++c) {
        const double lam = lambda_grid[c];
        const auto lo = std::lower_bound(evs.begin(), evs.end(), lam - 4.0 * sigma);
        const auto hi = std::upper_bound(evs.begin(), evs.end(), lam + 4.0 * sigma);
        const int count = static_cast<int>(hi - lo);
        if (count < 16) {
            std::ostringstream msg;
            msg << "windowed_partition: only " << count << " eigenvalues under the window at λ="
                << lam << " (need 16)";
            throw PrecisionError(msg.str());
        }
        acc.setZero();
        double wsum = 0.0;
        for (auto it = lo; it != hi; ++it) {
            const double E = *it;
            const double z = (E - lam) / sigma;
            const double w = std::exp(-0.5 * z * z);
            wsum += w;
            // phase recurrence over the uniform t grid
            const std::complex<double> phase0 =
                std::polar(w, -t0 * E / spectrum.hbar);
            const std::complex<double> step = std::polar(1.0, -dt * E / spectrum.hbar);
            std::complex<double> ph = phase0;
            for (int k = 0; k < nt; ++k) {
                acc[k] += ph;
                ph *= step;
            }
        }
        for (int k = 0; k < nt; ++k) sg.magnitude(c, k) = std::abs(acc[k]) / wsum;
    }
    return sg;
}

std::vector<LatticePoint> detect_lattice(const Spectrogram& sg, double threshold) {
    std::vector<LatticePoint> out;
    const int nt = static_cast<int>(sg.t_grid.size());
    const double dt = sg.t_grid[1] - sg.t_grid[0];
    std::vector<double> column(nt);
    for (int c = 0; c < sg.lambda_grid.size(); ++c) {
        for (int k = 0; k < nt; ++k) column[k] = sg.magnitude(c, k);
        std::vector<double> med = column;
        std::nth_element(med.begin(), med.begin() + nt / 2, med.end());
        const double gate = threshold * std::max(med[nt / 2], 1e-12);
        for (int k = 1; k + 1 < nt; ++k) {
            const double m = column[k];
            if (m < gate) continue;
            if (m < column[k - 1] || m < column[k + 1]) continue;
            if (m == column[k - 1] && m == column[k + 1]) continue;
            // parabolic refinement on log magnitude
            const double l0 = std::log(std::max(column[k - 1], 1e-300));
            const double l1 = std::log(std::max(m, 1e-300));
            const double l2 = std::log(std::max(column[k + 1], 1e-300));
            const double denom = l0 - 2.0 * l1 + l2;
            double shift = 0.0;
            if (denom < -1e-12) shift = 0.5 * (l0 - l2) / denom;
            shift = std::clamp(shift, -0.5, 0.5);
            out.push_back({sg.lambda_grid[c], sg.t_grid[k] + shift * dt, m});
        }
    }
    return out;
}

std::vector<PeriodCurve> track_curves(const std::vector<LatticePoint>& points,
                                      const Eigen::VectorXd& lambda_grid, double t_step,
                                      const TrackOptions& opts) {
    const int ncol = static_cast<int>(lambda_grid.size());
    if (ncol < 2) throw UsageError("track_curves: need at least 16 columns of points");
    // bucket points by column
    std::vector<std::vector<LatticePoint>> cols(ncol);
    for (const auto& p : points) {
        int best = 0;
        double bd = 1e300;
        for (int c = 0; c < ncol; ++c) {
            const double d = std::abs(lambda_grid[c] - p.lambda);
            if (d < bd) {
                bd = d;
                best = c;
            }
        }
        cols[best].push_back(p);
    }
    for (auto& c : cols)
        std::sort(c.begin(), c.end(),
                  [](const LatticePoint& a, const LatticePoint& b) { return a.t < b.t; });

    struct Track {
        std::vector<int> col_idx;
        std::vector<double> ts;
        int last_col = -1;
        bool flagged = false;
        bool open = true;

        double predict(const Eigen::VectorXd& grid, int col) const {
            const int n = static_cast<int>(ts.size());
            if (n == 1) return ts.back();
            const double slope = (ts[n - 1] - ts[n - 2]) /
                                 (grid[col_idx[n - 1]] - grid[col_idx[n - 2]]);
            return ts.back() + slope * (grid[col] - grid[col_idx[n - 1]]);
        }
    };
    std::vector<Track> tracks;

    for (int c = 0; c < ncol; ++c) {
        std::vector<bool> claimed(cols[c].size(), false);
        // longer tracks match first
        std::vector<int> order;
        for (size_t t = 0; t < tracks.size(); ++t)
            if (tracks[t].open) order.push_back(static_cast<int>(t));
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return tracks[a].ts.size() > tracks[b].ts.size();
        });
        for (int ti : order) {
            Track& tr = tracks[ti];
            if (c - tr.last_col > opts.max_gap + 1) {
                tr.open = false;
                continue;
            }
            const double pred = tr.predict(lambda_grid, c);
            const double gate = opts.gate_rel * std::abs(pred) + opts.gate_abs_steps * t_step;
            int best = -1, second = -1;
            double bd = 1e300;
            for (size_t p = 0; p < cols[c].size(); ++p) {
                if (claimed[p]) continue;
                const double d = std::abs(cols[c][p].t - pred);
                if (d > gate) continue;
                if (d < bd) {
                    second = best;
                    bd = d;
                    best = static_cast<int>(p);
                } else if (second < 0) {
                    second = static_cast<int>(p);
                }
            }
            if (best < 0) continue;
            if (second >= 0) tr.flagged = true; // near-resonant ambiguity
            claimed[best] = true;
            tr.col_idx.push_back(c);
            tr.ts.push_back(cols[c][best].t);
            tr.last_col = c;
        }
        for (size_t p = 0; p < cols[c].size(); ++p) {
            if (claimed[p]) continue;
            Track tr;
            tr.col_idx.push_back(c);
            tr.ts.push_back(cols[c][p].t);
            tr.last_col = c;
            tracks.push_back(std::move(tr));
        }
    }

    std::vector<PeriodCurve> out;
    for (auto& tr : tracks) {
        const int span = tr.col_idx.back() - tr.col_idx.front() + 1;
        const int support_cols = static_cast<int>(tr.col_idx.size());
        if (support_cols < 4) continue;
        if (support_cols < opts.min_support * span) continue;
        if (support_cols < opts.min_support * 0.5 * ncol) continue;
        PeriodCurve pc;
        for (size_t i = 0; i < tr.col_idx.size(); ++i) {
            pc.lambdas.push_back(lambda_grid[tr.col_idx[i]]);
            pc.ts.push_back(tr.ts[i]);
        }
        pc.crossing_flag = tr.flagged;
        pc.model.fit(pc.lambdas, pc.ts);
        out.push_back(std::move(pc));
    }
    std::sort(out.begin(), out.end(), [](const PeriodCurve& a, const PeriodCurve& b) {
        const double ma = a.model(0.5 * (a.lambdas.front() + a.lambdas.back()));
        const double mb = b.model(0.5 * (b.lambdas.front() + b.lambdas.back()));
        return ma < mb;
    });
    return out;
}

ComponentCount count_components(std::vector<PeriodCurve> curves, double t_max,
                                double density_bound,
                                const std::function<double(double)>& rho_at,
                                double multiple_tol) {
    ComponentCount res;
    if (curves.empty()) {
        res.N = 0;
        return res;
    }
    (void)t_max;

    // Common λ range of all curves.
    double lo = -1e300, hi = 1e300;
    for (const auto& c : curves) {
        lo = std::max(lo, c.lambdas.front());
        hi = std::min(hi, c.lambdas.back());
    }
    if (!(hi > lo))
        throw PrecisionError("count_components: curves share no common λ interval");

    // Crossing-free subinterval: longest run of probe columns where all curve
    // pairs stay separated.
    const int nprobe = 128;
    double min_mean = 1e300;
    for (const auto& c : curves) min_mean = std::min(min_mean, c.model(0.5 * (lo + hi)));
    const double sep_tol = 0.03 * min_mean;
    std::vector<bool> clear(nprobe, true);
    for (int i = 0; i < nprobe; ++i) {
        const double lam = lo + (hi - lo) * i / (nprobe - 1);
        for (size_t a = 0; a < curves.size() && clear[i]; ++a)
            for (size_t b = a + 1; b < curves.size(); ++b) {
                if (std::abs(curves[a].model(lam) - curves[b].model(lam)) < sep_tol) {
                    clear[i] = false;
                    break;
                }
            }
    }
    int best_start = -1, best_len = 0, run_start = 0, run_len = 0;
    for (int i = 0; i < nprobe; ++i) {
        if (clear[i]) {
            if (run_len == 0) run_start = i;
            ++run_len;
            if (run_len > best_len) {
                best_len = run_len;
                best_start = run_start;
            }
        } else {
            run_len = 0;
        }
    }
    if (best_len < nprobe / 8)
        throw AssumptionError(
            "count_components: no crossing-free λ-subinterval found; period curves overlap "
            "everywhere (resonant or symmetric system)");
    const double ilo = lo + (hi - lo) * best_start / (nprobe - 1);
    const double ihi = lo + (hi - lo) * (best_start + best_len - 1) / (nprobe - 1);
    res.crossing_free = {ilo, ihi};

    auto mean_over = [&](const PeriodCurve& c) {
        double acc = 0.0;
        const int m = 33;
        for (int i = 0; i < m; ++i) acc += c.model(ilo + (ihi - ilo) * i / (m - 1));
        return acc / m;
    };

    // Restrict to (0, R].
    std::vector<PeriodCurve> pool;
    for (auto& c : curves)
        if (mean_over(c) <= density_bound * 1.02) pool.push_back(std::move(c));
    if (pool.empty())
        throw PrecisionError("count_components: no curves below the density bound");

    // Peel: lowest curve is a fundamental; delete integer multiples.
    int next_k = 0;
    while (!pool.empty()) {
        int mi = 0;
        double mv = 1e300;
        for (size_t i = 0; i < pool.size(); ++i) {
            const double m = mean_over(pool[i]);
            if (m < mv) {
                mv = m;
                mi = static_cast<int>(i);
            }
        }
        PeriodCurve fund = std::move(pool[mi]);
        pool.erase(pool.begin() + mi);
        fund.label = {next_k, 1};
        res.fundamentals.push_back(fund);
        res.labeled.push_back(fund);

        for (auto it = pool.begin(); it != pool.end();) {
            const double ratio = mean_over(*it) / mv;
            const long j = std::lround(ratio);
            if (j >= 1 && std::abs(ratio - j) <= multiple_tol * j * 3.0) {
                // verify pointwise against j·fundamental
                double worst = 0.0;
                const int m = 33;
                for (int i = 0; i < m; ++i) {
                    const double lam = ilo + (ihi - ilo) * i / (m - 1);
                    const double expect = j * fund.model(lam);
                    worst = std::max(worst, std::abs(it->model(lam) - expect) / expect);
                }
                if (worst <= multiple_tol) {
                    if (j == 1)
                        throw AssumptionError(
                            "count_components: two distinct curves carry identical periods; "
                            "resonant or symmetric system");
                    it->label = {next_k, static_cast<int>(j)};
                    res.labeled.push_back(*it);
                    it = pool.erase(it);
                    continue;
                }
            }
            ++it;
        }
        ++next_k;
    }
    res.N = next_k;

    // Density cross-check: π ρ̂ should equal Σ_k τ̂_k on the interval.
    if (rho_at) {
        double acc = 0.0;
        const int m = 9;
        for (int i = 0; i < m; ++i) {
            const double lam = ilo + (ihi - ilo) * i / (m - 1);
            double sum_tau = 0.0;
            for (const auto& f : res.fundamentals) sum_tau += std::abs(f.model(lam));
            acc += M_PI * rho_at(lam) / sum_tau;
        }
        res.density_ratio = acc / m;
        res.density_consistent = std::abs(res.density_ratio - 1.0) <= 0.15;
        if (!res.density_consistent) {
            const long mult = std::lround(res.density_ratio);
            std::ostringstream msg;
            if (mult >= 2 && std::abs(res.density_ratio - mult) <= 0.2) {
                msg << "count_components: labeled periods account for 1/" << mult
                    << " of the spectral density; " << mult
                    << " components with equal periods are indistinguishable "
                       "(resonance assumption violated)";
                throw AssumptionError(msg.str());
            }
            msg << "count_components: spectral density mismatch (ratio " << res.density_ratio
                << "); detection artifact suspected";
            throw PrecisionError(msg.str());
        }
    }
    return res;
}

ResonanceReport resonance_report(const std::vector<PeriodCurve>& labeled_curves, double t_step) {
    ResonanceReport rep;
    for (size_t a = 0; a < labeled_curves.size(); ++a) {
        for (size_t b = a + 1; b < labeled_curves.size(); ++b) {
            const auto& A = labeled_curves[a];
            const auto& B = labeled_curves[b];
            if (!A.label || !B.label) continue;
            if (A.label->first == B.label->first) continue; // same component family
            const double lo = std::max(A.lambdas.front(), B.lambdas.front());
            const double hi = std::min(A.lambdas.back(), B.lambdas.back());
            if (!(hi > lo)) continue;
            const double span = hi - lo;
            const double noise = t_step > 0 ? t_step : 1e-3;
            // identical curves over the whole overlap
            double max_diff = 0.0;
            const int m = 65;
            for (int i = 0; i < m; ++i) {
                const double lam = lo + span * i / (m - 1);
                max_diff = std::max(max_diff, std::abs(A.model(lam) - B.model(lam)));
            }
            if (max_diff < 3.0 * noise) {
                rep.identical_curve_warning = true;
                rep.note = "two labeled curves coincide within detection noise: equal-period "
                           "components (assumption violated)";
                continue;
            }
            // transversal crossings
            double prev_lam = lo, prev_d = A.model(lo) - B.model(lo);
            for (int i = 1; i < m; ++i) {
                const double lam = lo + span * i / (m - 1);
                const double d = A.model(lam) - B.model(lam);
                if (prev_d * d < 0) {
                    const double root = num::brent(
                        [&](double l) { return A.model(l) - B.model(l); }, prev_lam, lam, 1e-12);
                    Resonance r;
                    r.lambda = root;
                    r.t = A.model(root);
                    r.first = *A.label;
                    r.second = *B.label;
                    r.transversality_order = 0;
                    for (int order = 1; order <= 3; ++order) {
                        const double diff =
                            std::abs(A.model(root, order) - B.model(root, order));
                        const double scale = 10.0 * noise * std::pow(2.0 / span, order);
                        if (diff > scale) {
                            r.transversality_order = order;
                            break;
                        }
                    }
                    rep.resonances.push_back(r);
                }
                prev_lam = lam;
                prev_d = d;
            }
        }
    }
    return rep;
}

LatticePlan plan_lattice(const SpectrumWindow& spectrum, Interval band, double rho_max,
                         double t_max, int oversample) {
    LatticePlan plan;
    const int in_band = spectrum.count_in(band.lo, band.hi);
    if (in_band < 32) throw PrecisionError("plan_lattice: too few eigenvalues in the band");
    const double spacing = band.width() / in_band;
    double sigma = std::min(6.0 * spacing, band.width() / 10.0);
    sigma = std::max(sigma, 2.0 * spacing);
    plan.window_width = sigma;

    const double margin = 3.0 * sigma;
    const double lo = band.lo + margin, hi = band.hi - margin;
    if (!(hi > lo)) throw PrecisionError("plan_lattice: band too narrow for the window margins");
    const double lstep = std::max(0.5 * sigma, 1.5 * spacing);
    const int ncol = std::min(256, std::max(8, static_cast<int>(std::floor((hi - lo) / lstep)) + 1));
    plan.lambda_grid.resize(ncol);
    for (int i = 0; i < ncol; ++i)
        plan.lambda_grid[i] = lo + (hi - lo) * i / std::max(1, ncol - 1);

    const double sigma_t = spectrum.hbar / sigma;
    plan.t_max = t_max > 0 ? t_max : 3.25 * M_PI * rho_max;
    const double t_min = 5.0 * sigma_t;
    const double tstep = sigma_t / oversample;
    const int nt = std::min(20000, static_cast<int>(std::ceil((plan.t_max - t_min) / tstep)) + 1);
    plan.t_grid.resize(nt);
    for (int k = 0; k < nt; ++k) plan.t_grid[k] = t_min + k * tstep;
    return plan;
}

} // namespace specho
