#include "specho/classical.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "specho/errors.hpp"

namespace specho {

namespace {

constexpr double kGradTol = 1e-10;
constexpr double kDedupeDist = 1e-6;
constexpr double kDegenerateDet = 1e-8;

bool point_in_polygon(const std::vector<Eigen::Vector2d>& poly, const Eigen::Vector2d& q) {
    bool inside = false;
    for (size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const auto &a = poly[i], &b = poly[j];
        if ((a.y() > q.y()) != (b.y() > q.y())) {
            const double t = (q.y() - a.y()) / (b.y() - a.y());
            if (q.x() < a.x() + t * (b.x() - a.x())) inside = !inside;
        }
    }
    return inside;
}

} // namespace

std::vector<CriticalPoint> find_critical_points(const Symbol& sym, const Box2& box,
                                                std::optional<Interval> value_filter,
                                                int seed_grid) {
    std::vector<Eigen::Vector2d> found;
    const int n = seed_grid;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            Eigen::Vector2d z(box.x_lo + (box.x_hi - box.x_lo) * (i + 0.5) / n,
                              box.xi_lo + (box.xi_hi - box.xi_lo) * (j + 0.5) / n);
            // Newton converges linearly near degenerate points, so run it until
            // the step itself dies out; otherwise the Hessian-determinant test
            // below would see a point still far from the true critical point.
            bool runaway = false;
            for (int it = 0; it < 120; ++it) {
                const Eigen::Vector2d g = sym.grad(z.x(), z.y());
                if (g.norm() < 1e-15) break;
                const Eigen::Matrix2d H = sym.hess(z.x(), z.y());
                if (std::abs(H.determinant()) < 1e-300) break;
                const Eigen::Vector2d step = H.inverse() * g;
                z -= step;
                const double mx = (box.x_hi - box.x_lo), mxi = (box.xi_hi - box.xi_lo);
                if (z.x() < box.x_lo - 0.2 * mx || z.x() > box.x_hi + 0.2 * mx ||
                    z.y() < box.xi_lo - 0.2 * mxi || z.y() > box.xi_hi + 0.2 * mxi) {
                    runaway = true;
                    break;
                }
                if (step.norm() < 1e-16 * std::max(1.0, z.norm())) break;
            }
            const bool converged = !runaway && sym.grad(z.x(), z.y()).norm() <= kGradTol;
            if (!converged || !box.contains(z.x(), z.y())) continue;
            bool dup = false;
            for (const auto& p : found)
                if ((p - z).norm() < kDedupeDist) {
                    dup = true;
                    break;
                }
            if (!dup) found.push_back(z);
        }
    }

    std::vector<CriticalPoint> out;
    for (const auto& z : found) {
        const double value = sym.eval(z.x(), z.y());
        if (value_filter && !value_filter->contains(value)) continue;
        const double det = sym.hess(z.x(), z.y()).determinant();
        if (std::abs(det) <= kDegenerateDet) {
            std::ostringstream msg;
            msg << "degenerate critical point at (" << z.x() << ", " << z.y()
                << "), value " << value << ", |det Hess| = " << std::abs(det);
            throw AssumptionError(msg.str());
        }
        CriticalPoint cp;
        cp.location = z;
        cp.value = value;
        cp.hessian_det = det;
        cp.kind = det > 0 ? CriticalKind::elliptic : CriticalKind::hyperbolic;
        out.push_back(cp);
    }
    std::sort(out.begin(), out.end(),
              [](const CriticalPoint& a, const CriticalPoint& b) { return a.value < b.value; });
    return out;
}

std::vector<std::pair<double, double>> allowed_intervals(const Symbol& sym, double lambda,
                                                         double x_lo, double x_hi) {
    if (!sym.schrodinger_form()) throw UsageError("allowed_intervals: symbol not Schrödinger form");
    const auto& V = sym.potential;
    const int n = 8192;
    std::vector<std::pair<double, double>> out;
    auto f = [&](double x) { return V(x) - lambda; };
    if (f(x_lo) < 0 || f(x_hi) < 0)
        throw AssumptionError("allowed_intervals: allowed region reaches domain edge");

    // Sign tracking that survives samples landing exactly on a turning point.
    int prev_sign = f(x_lo) > 0 ? 1 : 0;
    double prev_x = x_lo;
    std::optional<double> zero_at; // grid sample that hit the level exactly
    std::optional<double> open;
    if (prev_sign == 0) zero_at = x_lo;
    auto transition = [&](int new_sign, double crossing) {
        if (new_sign < 0 && !open)
            open = crossing;
        else if (new_sign > 0 && open) {
            out.emplace_back(*open, crossing);
            open.reset();
        }
    };
    for (int i = 1; i <= n; ++i) {
        const double x1 = x_lo + (x_hi - x_lo) * i / n;
        const double f1 = f(x1);
        const int s1 = f1 > 0 ? 1 : (f1 < 0 ? -1 : 0);
        if (s1 == 0) {
            zero_at = x1;
            continue;
        }
        if (prev_sign == 0) {
            prev_sign = s1; // level is tangent at the domain edge; treat as that side
            prev_x = x1;
            zero_at.reset();
            continue;
        }
        if (s1 != prev_sign) {
            const double crossing = zero_at ? *zero_at : num::brent(f, prev_x, x1, 1e-15);
            transition(s1, crossing);
        }
        zero_at.reset();
        prev_sign = s1;
        prev_x = x1;
    }
    if (open || prev_sign < 0)
        throw AssumptionError("allowed_intervals: allowed region reaches domain edge");
    return out;
}

namespace {

// θ-substituted turning-point quadrature: x = m - r cos θ removes the
// square-root endpoint singularities for both the action and period integrands.
struct WellQuadrature {
    const Symbol* sym;
    double lambda, xm, xp, m, r;

    double G(double theta) const {
        const double x = m - r * std::cos(theta);
        const double s2 = (x - xm) * (xp - x);
        const double scale = 1e-12 * r;
        if (x - xm < scale)
            return std::max(-sym->potential_deriv(xm) * 2.0 / (xp - xm), 1e-300);
        if (xp - x < scale)
            return std::max(sym->potential_deriv(xp) * 2.0 / (xp - xm), 1e-300);
        const double val = 2.0 * (lambda - sym->potential(x));
        return std::max(val / s2, 1e-300);
    }

    double period() const {
        return 2.0 * num::integrate([this](double t) { return 1.0 / std::sqrt(G(t)); }, 0.0,
                                    M_PI, 1e-11, 1e-14);
    }
    double action() const {
        return 2.0 * num::integrate(
                         [this](double t) {
                             const double s = std::sin(t);
                             return r * r * s * s * std::sqrt(G(t));
                         },
                         0.0, M_PI, 1e-12, 1e-15);
    }
};

WellQuadrature make_quadrature(const Symbol& sym, double lambda,
                               const std::pair<double, double>& iv) {
    return WellQuadrature{&sym, lambda, iv.first, iv.second, 0.5 * (iv.first + iv.second),
                          0.5 * (iv.second - iv.first)};
}

double schrodinger_period(const Symbol& sym, double lambda, const std::pair<double, double>& iv) {
    return make_quadrature(sym, lambda, iv).period();
}
double schrodinger_action(const Symbol& sym, double lambda, const std::pair<double, double>& iv) {
    return make_quadrature(sym, lambda, iv).action();
}

// Allowed interval at `lambda` containing x_rep.
std::optional<std::pair<double, double>> interval_containing(const Symbol& sym, double lambda,
                                                             double x_lo, double x_hi,
                                                             double x_rep) {
    for (const auto& iv : allowed_intervals(sym, lambda, x_lo, x_hi))
        if (x_rep >= iv.first && x_rep <= iv.second) return iv;
    return std::nullopt;
}

} // namespace

double well_action(const Symbol& sym, double lambda, const std::pair<double, double>& interval) {
    return schrodinger_action(sym, lambda, interval);
}

double well_period(const Symbol& sym, double lambda, const std::pair<double, double>& interval) {
    return schrodinger_period(sym, lambda, interval);
}

std::vector<LevelSetComponent> extract_level_components(const Symbol& sym, double lambda,
                                                        const Box2& box, int resolution) {
    auto contours = extract_contours(sym, lambda, box, resolution);
    std::vector<LevelSetComponent> out;
    int k = 0;
    for (auto& c : contours) {
        LevelSetComponent comp;
        comp.energy = lambda;
        comp.component_index = k++;
        comp.action = c.polyline_action;
        // ∮ ds/|∇p| equals d(area)/dλ by the coarea formula: this is the
        // action-derivative period evaluated on the contour itself.
        comp.period = polyline_period(sym, c.points);
        comp.contour = std::move(c.points);
        out.push_back(std::move(comp));
    }
    return out;
}

ActionPeriod action_and_period(const Symbol& sym, double lambda, int component, const Box2& box,
                               double window_width_hint) {
    ActionPeriod ap;
    const double delta = 1e-4 * window_width_hint;
    if (sym.schrodinger_form()) {
        const auto ivs = allowed_intervals(sym, lambda, box.x_lo, box.x_hi);
        if (component < 0 || component >= static_cast<int>(ivs.size()))
            throw UsageError("action_and_period: component index out of range");
        const auto iv = ivs[component];
        ap.action = schrodinger_action(sym, lambda, iv);
        ap.period = schrodinger_period(sym, lambda, iv);
        const double x_rep = 0.5 * (iv.first + iv.second);
        const auto lo = interval_containing(sym, lambda - delta, box.x_lo, box.x_hi, x_rep);
        const auto hi = interval_containing(sym, lambda + delta, box.x_lo, box.x_hi, x_rep);
        if (lo && hi) {
            const double a_lo = schrodinger_action(sym, lambda - delta, *lo);
            const double a_hi = schrodinger_action(sym, lambda + delta, *hi);
            ap.period_diff = (a_hi - a_lo) / (2.0 * delta);
        } else {
            ap.period_diff = ap.period;
        }
        return ap;
    }
    const auto comps = extract_level_components(sym, lambda, box, 1024);
    if (component < 0 || component >= static_cast<int>(comps.size()))
        throw UsageError("action_and_period: component index out of range");
    const auto& comp = comps[component];
    ap.action = comp.action;
    ap.period = comp.period;
    // Centered difference on matched components.
    Eigen::Vector2d probe = comp.contour.front();
    // a point inside: walk inward along the gradient of p
    const Eigen::Vector2d g = sym.grad(probe.x(), probe.y()).normalized();
    const double shrink = 1e-3 * std::max(box.x_hi - box.x_lo, box.xi_hi - box.xi_lo);
    const Eigen::Vector2d inner = probe - shrink * g * (sym.eval(probe.x(), probe.y()) > lambda ? 1.0 : -1.0);
    auto action_at = [&](double lam) -> std::optional<double> {
        for (const auto& c : extract_level_components(sym, lam, box, 1024))
            if (point_in_polygon(c.contour, inner)) return c.action;
        return std::nullopt;
    };
    const auto a_lo = action_at(lambda - delta), a_hi = action_at(lambda + delta);
    ap.period_diff = (a_lo && a_hi) ? (*a_hi - *a_lo) / (2.0 * delta) : ap.period;
    return ap;
}

double flow_return_time(const Symbol& sym, const Eigen::Vector2d& start, double rel_tol) {
    auto deriv = [&](const Eigen::Vector2d& z) {
        const Eigen::Vector2d g = sym.grad(z.x(), z.y());
        return Eigen::Vector2d(g.y(), -g.x());
    };
    const Eigen::Vector2d v0 = deriv(start);
    if (v0.norm() < 1e-12) throw UsageError("flow_return_time: start point is (nearly) critical");
    const Eigen::Vector2d n = v0.normalized();
    auto section = [&](const Eigen::Vector2d& z) { return n.dot(z - start); };

    // Dormand–Prince 5(4) with step control.
    auto rk_step = [&](const Eigen::Vector2d& z, double h, Eigen::Vector2d& out) {
        const Eigen::Vector2d k1 = deriv(z);
        const Eigen::Vector2d k2 = deriv(z + h * (0.2 * k1));
        const Eigen::Vector2d k3 = deriv(z + h * (3.0 / 40 * k1 + 9.0 / 40 * k2));
        const Eigen::Vector2d k4 = deriv(z + h * (44.0 / 45 * k1 - 56.0 / 15 * k2 + 32.0 / 9 * k3));
        const Eigen::Vector2d k5 = deriv(z + h * (19372.0 / 6561 * k1 - 25360.0 / 2187 * k2 +
                                                  64448.0 / 6561 * k3 - 212.0 / 729 * k4));
        const Eigen::Vector2d k6 = deriv(z + h * (9017.0 / 3168 * k1 - 355.0 / 33 * k2 +
                                                  46732.0 / 5247 * k3 + 49.0 / 176 * k4 -
                                                  5103.0 / 18656 * k5));
        out = z + h * (35.0 / 384 * k1 + 500.0 / 1113 * k3 + 125.0 / 192 * k4 -
                       2187.0 / 6784 * k5 + 11.0 / 84 * k6);
        const Eigen::Vector2d k7 = deriv(out);
        const Eigen::Vector2d z4 = z + h * (5179.0 / 57600 * k1 + 7571.0 / 16695 * k3 +
                                            393.0 / 640 * k4 - 92097.0 / 339200 * k5 +
                                            187.0 / 2100 * k6 + 1.0 / 40 * k7);
        return (out - z4).norm();
    };

    double t = 0.0, h = 1e-3 / std::max(v0.norm(), 1e-6);
    Eigen::Vector2d z = start;
    double s_prev = 0.0;
    bool armed = false;
    const double scale = std::max(1.0, start.norm());
    for (int it = 0; it < 2000000; ++it) {
        Eigen::Vector2d z_next;
        const double err = rk_step(z, h, z_next);
        const double tol = rel_tol * scale * std::max(1.0, h);
        if (err > tol && h > 1e-12) {
            h *= std::max(0.2, 0.9 * std::pow(tol / (err + 1e-300), 0.2));
            continue;
        }
        const double s_next = section(z_next);
        const bool near_start = (z_next - start).norm() < 0.5 * scale + 1.0;
        if (!armed && s_next > 1e-6 * scale) armed = true;
        if (armed && s_prev < 0.0 && s_next >= 0.0 && near_start &&
            deriv(z_next).dot(n) > 0.0) {
            // bisect the crossing inside [t, t+h]
            double ha = 0.0, hb = h;
            for (int b = 0; b < 80; ++b) {
                const double hm = 0.5 * (ha + hb);
                Eigen::Vector2d zm;
                rk_step(z, hm, zm);
                if (section(zm) < 0.0)
                    ha = hm;
                else
                    hb = hm;
            }
            return t + 0.5 * (ha + hb);
        }
        t += h;
        z = z_next;
        s_prev = s_next;
        if (err > 1e-300) h *= std::min(5.0, 0.9 * std::pow(tol / err, 0.2));
    }
    throw PrecisionError("flow_return_time: no return detected");
}

double total_abs_period(const Symbol& sym, double lambda, const Box2& box) {
    double sum = 0.0;
    if (sym.schrodinger_form()) {
        for (const auto& iv : allowed_intervals(sym, lambda, box.x_lo, box.x_hi))
            sum += std::abs(schrodinger_period(sym, lambda, iv));
        return sum;
    }
    for (const auto& c : extract_level_components(sym, lambda, box, 1024))
        sum += std::abs(c.period);
    return sum;
}

// ---------------------------------------------------------------------------
// Reference Reeb graph
// ---------------------------------------------------------------------------

namespace {

struct BandComponents {
    // per component: allowed x-interval (Schrödinger path)
    std::vector<std::pair<double, double>> intervals;
};

BandComponents components_at(const Symbol& sym, double lambda, const Box2& box) {
    BandComponents bc;
    bc.intervals = allowed_intervals(sym, lambda, box.x_lo, box.x_hi);
    return bc;
}

bool overlaps(const std::pair<double, double>& a, const std::pair<double, double>& b) {
    return a.first < b.second && b.first < a.second;
}

// Period of the component of `lambda` containing x_rep.
double period_at(const Symbol& sym, double lambda, const Box2& box, double x_rep) {
    const auto iv = interval_containing(sym, lambda, box.x_lo, box.x_hi, x_rep);
    if (!iv) throw PrecisionError("period_at: component lost while tracking a band");
    return schrodinger_period(sym, lambda, *iv);
}

// Integrated period over [lo, hi] with endpoint treatment:
//   kind 0: regular end (integrate to the end),
//   kind 1: elliptic end (τ stays finite; stop 1e-9·W short),
//   kind 2: hyperbolic end (log-divergent; truncate at 1e-6·W and add the
//           fitted a·ln u + b tail, verified under ε-halving).
double edge_length_integral(const Symbol& sym, const Box2& box, double x_rep, Interval band,
                            int kind_lo, int kind_hi, double window_width) {
    const double W = window_width;
    auto tau = [&](double lam) { return period_at(sym, lam, box, x_rep); };

    auto shrink = [&](double end, int kind, bool is_lo) -> std::pair<double, double> {
        // returns (integration endpoint, tail contribution)
        if (kind == 0) return {end, 0.0};
        const double sgn = is_lo ? 1.0 : -1.0;
        if (kind == 1) {
            const double eps = 1e-9 * W;
            return {end + sgn * eps, 0.0};
        }
        auto tail_at = [&](double eps0) {
            // local 2-parameter log fit on u in [eps0, 10 eps0]
            std::vector<double> us = num::log_spaced(10.0 * eps0, eps0, 6);
            Eigen::VectorXd L(6), y(6);
            for (int i = 0; i < 6; ++i) {
                L[i] = std::log(us[i]);
                y[i] = tau(end + sgn * us[i]);
            }
            const auto fit = num::linear_fit(L, y);
            // ∫_0^eps0 (a ln u + b) du = eps0 (a (ln eps0 - 1) + b)
            return eps0 * (fit.slope * (std::log(eps0) - 1.0) + fit.intercept);
        };
        const double eps0 = 1e-6 * W;
        const double tail = tail_at(eps0), tail_half = tail_at(0.5 * eps0);
        const double probe = tau(end + sgn * 0.5 * eps0);
        const double refined = tail_half + 0.5 * eps0 * probe; // crude composite for comparison
        if (std::abs(tail - refined) > 1e-4 * std::max(1.0, std::abs(tail)) + 1e-7)
            throw PrecisionError("edge length: hyperbolic tail estimate not converged");
        return {end + sgn * eps0, tail};
    };

    const auto [lo_pt, tail_lo] = shrink(band.lo, kind_lo, true);
    const auto [hi_pt, tail_hi] = shrink(band.hi, kind_hi, false);
    const double interior = num::integrate(tau, lo_pt, hi_pt, 1e-9, 1e-12);
    return interior + tail_lo + tail_hi;
}

} // namespace

WeightedReebGraph build_reference_reeb_graph(const CatalogEntry& entry, Interval window) {
    const Symbol& sym = entry.symbol;
    if (!sym.schrodinger_form())
        throw UsageError("build_reference_reeb_graph: implemented for Schrödinger-form symbols");
    const Box2& box = entry.scan_box;
    const double W = window.width();

    Interval filter{window.lo - 1e-9 * W, window.hi + 1e-9 * W};
    auto crits = find_critical_points(sym, box, filter);
    for (size_t i = 1; i < crits.size(); ++i)
        if (crits[i].value - crits[i - 1].value < 1e-9) {
            std::ostringstream msg;
            msg << "two critical points share the value " << crits[i].value
                << " within 1e-9: same-image degeneracy";
            throw AssumptionError(msg.str());
        }

    WeightedReebGraph g;
    g.provenance = Provenance::oracle;
    g.window = window;
    for (const auto& cp : crits) g.vertices.push_back({cp.value, cp.kind, -1, {-1, -1}});

    std::vector<double> bounds{window.lo};
    for (const auto& cp : crits) bounds.push_back(cp.value);
    bounds.push_back(window.hi);

    // Components per band sampled at the midpoint; lineage by x-interval overlap
    // across each critical value, sampled just below/above it.
    struct EdgeDraft {
        Interval band;
        std::pair<double, double> mid_interval;
        double x_rep;
        int lineage = -1;
        int endpoint_lo = -1, endpoint_hi = -1;
        int kind_lo = 0, kind_hi = 0; // 0 regular end, 1 elliptic, 2 hyperbolic
    };
    std::vector<std::vector<EdgeDraft>> bands(bounds.size() - 1);
    for (size_t bi = 0; bi + 1 < bounds.size(); ++bi) {
        const Interval band{bounds[bi], bounds[bi + 1]};
        if (band.width() < 1e-12) continue;
        const double mid = band.mid();
        for (const auto& iv : components_at(sym, mid, box).intervals) {
            EdgeDraft d;
            d.band = band;
            d.mid_interval = iv;
            // representative x: the potential minimum inside the interval
            const int nscan = 512;
            double best_x = iv.first, best_v = sym.potential(iv.first);
            for (int i = 0; i <= nscan; ++i) {
                const double x = iv.first + (iv.second - iv.first) * i / nscan;
                const double v = sym.potential(x);
                if (v < best_v) {
                    best_v = v;
                    best_x = x;
                }
            }
            d.x_rep = best_x;
            bands[bi].push_back(d);
        }
    }

    // Lineage assignment and vertex wiring.
    int next_lineage = 0;
    if (!bands.empty())
        for (auto& d : bands[0]) d.lineage = next_lineage++;

    for (size_t ci = 0; ci < crits.size(); ++ci) {
        const size_t below = ci, above = ci + 1;
        const double c = crits[ci].value;
        const double link_delta = 1e-4 * W;
        auto lo_comps = (bounds[below + 1] - bounds[below] > 2 * link_delta && !bands[below].empty())
                            ? components_at(sym, c - link_delta, box).intervals
                            : std::vector<std::pair<double, double>>{};
        auto hi_comps = (bounds[above + 1] - bounds[above] > 2 * link_delta && !bands[above].empty())
                            ? components_at(sym, c + link_delta, box).intervals
                            : std::vector<std::pair<double, double>>{};
        // match band drafts to the link samples by x_rep membership
        auto draft_for = [&](std::vector<EdgeDraft>& drafts,
                             const std::pair<double, double>& iv) -> EdgeDraft* {
            for (auto& d : drafts)
                if (d.x_rep >= iv.first && d.x_rep <= iv.second) return &d;
            return nullptr;
        };

        struct Link {
            EdgeDraft* lo = nullptr;
            EdgeDraft* hi = nullptr;
        };
        // bipartite overlap between lo_comps and hi_comps
        std::vector<int> lo_match(lo_comps.size(), -1), hi_match(hi_comps.size(), -1);
        std::vector<int> lo_degree(lo_comps.size(), 0), hi_degree(hi_comps.size(), 0);
        for (size_t a = 0; a < lo_comps.size(); ++a)
            for (size_t b = 0; b < hi_comps.size(); ++b)
                if (overlaps(lo_comps[a], hi_comps[b])) {
                    ++lo_degree[a];
                    ++hi_degree[b];
                    lo_match[a] = static_cast<int>(b);
                    hi_match[b] = static_cast<int>(a);
                }

        const auto vkind = crits[ci].kind;
        std::vector<EdgeDraft*> attached;
        for (size_t a = 0; a < lo_comps.size(); ++a) {
            EdgeDraft* dl = draft_for(bands[below], lo_comps[a]);
            if (!dl) continue;
            if (lo_degree[a] == 1 && hi_degree[lo_match[a]] == 1) {
                // pass-through: propagate lineage upward
                EdgeDraft* dh = draft_for(bands[above], hi_comps[lo_match[a]]);
                if (dh && dl->lineage >= 0) dh->lineage = dl->lineage;
            } else {
                dl->endpoint_hi = static_cast<int>(ci);
                dl->kind_hi = vkind == CriticalKind::elliptic ? 1 : 2;
                attached.push_back(dl);
            }
        }
        for (size_t b = 0; b < hi_comps.size(); ++b) {
            EdgeDraft* dh = draft_for(bands[above], hi_comps[b]);
            if (!dh) continue;
            if (hi_degree[b] == 1 && lo_degree[hi_match[b]] == 1) continue;
            dh->endpoint_lo = static_cast<int>(ci);
            dh->kind_lo = vkind == CriticalKind::elliptic ? 1 : 2;
            attached.push_back(dh);
        }
        const int expected = vkind == CriticalKind::elliptic ? 1 : 3;
        if (static_cast<int>(attached.size()) != expected) {
            std::ostringstream msg;
            msg << "vertex at value " << c << " has " << attached.size()
                << " incident component families, expected " << expected;
            throw AssumptionError(msg.str());
        }
        for (auto* d : attached)
            if (d->lineage < 0) d->lineage = next_lineage++;
        for (auto& d : bands[above])
            if (d.lineage < 0) d.lineage = next_lineage++;
    }
    if (!bands.empty())
        for (auto& d : bands.back())
            if (d.lineage < 0) d.lineage = next_lineage++;

    // Emit edges with lengths; wire hyperbolic vertex roles.
    for (auto& band : bands) {
        std::sort(band.begin(), band.end(),
                  [](const EdgeDraft& a, const EdgeDraft& b) { return a.x_rep < b.x_rep; });
        for (auto& d : band) {
            ReebEdge e;
            e.id = static_cast<int>(g.edges.size());
            e.interval = d.band;
            e.lineage = d.lineage;
            e.endpoint_lo = d.endpoint_lo;
            e.endpoint_hi = d.endpoint_hi;
            e.length = edge_length_integral(sym, box, d.x_rep, d.band, d.kind_lo, d.kind_hi, W);
            g.edges.push_back(e);
        }
    }
    for (auto& v : g.vertices) {
        if (v.kind != CriticalKind::hyperbolic) continue;
        const int vi = static_cast<int>(&v - g.vertices.data());
        std::vector<int> lo_side, hi_side;
        for (const auto& e : g.edges) {
            if (e.endpoint_hi == vi) lo_side.push_back(e.id);
            if (e.endpoint_lo == vi) hi_side.push_back(e.id);
        }
        if (lo_side.size() == 2 && hi_side.size() == 1) {
            v.trunk_edge = hi_side[0];
            v.branch_edges = {lo_side[0], lo_side[1]};
        } else if (lo_side.size() == 1 && hi_side.size() == 2) {
            v.trunk_edge = lo_side[0];
            v.branch_edges = {hi_side[0], hi_side[1]};
        } else {
            throw AssumptionError("hyperbolic vertex without a 2-vs-1 side split");
        }
    }

    // Taylor weights at hyperbolic vertices.
    for (size_t ci = 0; ci < crits.size(); ++ci) {
        if (crits[ci].kind != CriticalKind::hyperbolic) continue;
        const auto ht = reference_taylor_invariants(entry, crits[ci].value);
        const int vi = static_cast<int>(ci);
        TaylorWeights tw;
        tw.vertex = vi;
        tw.role = TaylorRole::trunk;
        tw.f_prime = ht.trunk.f_prime;
        tw.h = ht.trunk.h;
        tw.g = ht.trunk.g;
        tw.flipped = ht.trunk.flipped;
        tw.residual = ht.trunk.residual;
        g.taylor.push_back(tw);
        tw.role = TaylorRole::branch1;
        tw.f_prime = ht.branch1.f_prime;
        tw.h = ht.branch1.h;
        tw.g = ht.branch1.g;
        tw.flipped = ht.branch1.flipped;
        tw.residual = ht.branch1.residual;
        g.taylor.push_back(tw);
        tw.role = TaylorRole::branch2;
        tw.f_prime = ht.branch2.f_prime;
        tw.h = ht.branch2.h;
        tw.g = ht.branch2.g;
        tw.flipped = ht.branch2.flipped;
        tw.residual = ht.branch2.residual;
        g.taylor.push_back(tw);
    }

    validate_structure(g);
    return g;
}

HyperbolicTaylor reference_taylor_invariants(const CatalogEntry& entry, double c_hyp) {
    const Symbol& sym = entry.symbol;
    if (!sym.schrodinger_form())
        throw UsageError("reference_taylor_invariants: Schrödinger-form symbols only");
    const Box2& box = entry.scan_box;

    auto crits = find_critical_points(sym, box);
    const CriticalPoint* cp = nullptr;
    double prev_c = -1e300, next_c = 1e300;
    for (const auto& c : crits) {
        if (std::abs(c.value - c_hyp) < 1e-8)
            cp = &c;
        else if (c.value < c_hyp)
            prev_c = std::max(prev_c, c.value);
        else
            next_c = std::min(next_c, c.value);
    }
    if (!cp || cp->kind != CriticalKind::hyperbolic)
        throw UsageError("reference_taylor_invariants: value is not a hyperbolic critical value");
    const double c = cp->value;
    const double xb = cp->location.x();

    const double room_below = std::min(1e-2, 0.45 * (c - prev_c));
    const double room_above = std::min(1e-2, 0.45 * (next_c - c));
    const int n_samples = 48;

    // Which side has two components touching the saddle: sample and look for
    // intervals with an endpoint or interior at xb.
    auto side_count = [&](double lam) {
        int cnt = 0;
        for (const auto& iv : allowed_intervals(sym, lam, box.x_lo, box.x_hi)) {
            const double reach = 0.2 * (iv.second - iv.first);
            if (iv.first - reach <= xb && xb <= iv.second + reach) ++cnt;
        }
        return cnt;
    };
    const int below_n = side_count(c - room_below);
    const int above_n = side_count(c + room_above);
    double trunk_sign, branch_sign;
    if (below_n == 2 && above_n == 1) {
        branch_sign = -1.0;
        trunk_sign = +1.0;
    } else if (below_n == 1 && above_n == 2) {
        branch_sign = +1.0;
        trunk_sign = -1.0;
    } else {
        throw AssumptionError("reference_taylor_invariants: saddle sides are not 2-vs-1");
    }

    auto sample_side = [&](double sign, double room, double x_rep, std::vector<double>& us,
                           std::vector<double>& taus) {
        const auto dists = num::log_spaced(room, 1e-5, n_samples);
        for (double d : dists) {
            const double lam = c + sign * d;
            const auto iv = interval_containing(sym, lam, box.x_lo, box.x_hi, x_rep);
            if (!iv) continue;
            us.push_back(sign * d);
            taus.push_back(schrodinger_period(sym, lam, *iv));
        }
    };

    HyperbolicTaylor out;
    {
        std::vector<double> us, taus;
        // the trunk component contains the saddle x
        sample_side(trunk_sign, trunk_sign > 0 ? room_above : room_below, xb, us, taus);
        const auto fit = fit_log_model(us, taus);
        if (fit.residual > 1e-3)
            throw PrecisionError("reference_taylor_invariants: trunk fit residual exceeds 1e-3");
        out.trunk = taylor_from_fit(fit, 2.0);
    }
    {
        // branch representatives: the two components on the branch side
        const double lam = c + branch_sign * (branch_sign > 0 ? room_above : room_below);
        std::vector<std::pair<double, double>> branch_ivs;
        for (const auto& iv : allowed_intervals(sym, lam, box.x_lo, box.x_hi)) {
            const double reach = 0.2 * (iv.second - iv.first);
            if (iv.first - reach <= xb && xb <= iv.second + reach) branch_ivs.push_back(iv);
        }
        if (branch_ivs.size() != 2)
            throw AssumptionError("reference_taylor_invariants: expected two branch components");
        std::sort(branch_ivs.begin(), branch_ivs.end());
        for (int b = 0; b < 2; ++b) {
            std::vector<double> us, taus;
            const double x_rep = 0.5 * (branch_ivs[b].first + branch_ivs[b].second);
            sample_side(branch_sign, branch_sign > 0 ? room_above : room_below, x_rep, us, taus);
            const auto fit = fit_log_model(us, taus);
            if (fit.residual > 1e-3)
                throw PrecisionError("reference_taylor_invariants: branch fit residual exceeds 1e-3");
            (b == 0 ? out.branch1 : out.branch2) = taylor_from_fit(fit, 1.0);
        }
    }
    double worst = 0.0;
    for (int m = 0; m <= 1; ++m) {
        const double sum = out.branch1.g[m] + out.branch2.g[m];
        const double ref = std::max({std::abs(out.trunk.g[m]), std::abs(sum), 1e-6});
        worst = std::max(worst, std::abs(out.trunk.g[m] - sum) / ref);
    }
    out.consistency_residual = worst;
    return out;
}

} // namespace specho
