#include "specho/contours.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "specho/errors.hpp"
#include "specho/numerics.hpp"

namespace specho {

double polyline_action(const std::vector<Eigen::Vector2d>& pts) {
    double acc = 0.0;
    for (size_t i = 0; i + 1 < pts.size(); ++i)
        acc += 0.5 * (pts[i].y() + pts[i + 1].y()) * (pts[i + 1].x() - pts[i].x());
    return acc;
}

double polyline_period(const Symbol& sym, const std::vector<Eigen::Vector2d>& pts) {
    double acc = 0.0;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        const Eigen::Vector2d mid = 0.5 * (pts[i] + pts[i + 1]);
        const double ds = (pts[i + 1] - pts[i]).norm();
        const double gn = sym.grad(mid.x(), mid.y()).norm();
        if (gn > 0.0) acc += ds / gn;
    }
    return acc;
}

namespace {

// Key for a grid-edge crossing: cell corner (i,j) plus direction (0: to i+1, 1: to j+1).
struct EdgeKey {
    int i, j, dir;
    bool operator<(const EdgeKey& o) const {
        return std::tie(i, j, dir) < std::tie(o.i, o.j, o.dir);
    }
};

} // namespace

std::vector<Contour> extract_contours(const Symbol& sym, double lambda, const Box2& box,
                                      int resolution) {
    const int n = resolution;
    const double dx = (box.x_hi - box.x_lo) / (n - 1);
    const double dxi = (box.xi_hi - box.xi_lo) / (n - 1);
    auto X = [&](int i) { return box.x_lo + i * dx; };
    auto Xi = [&](int j) { return box.xi_lo + j * dxi; };

    Eigen::MatrixXd f(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) f(i, j) = sym.eval(X(i), Xi(j)) - lambda;

    // Refined crossing points, one per sign-changing grid edge.
    std::map<EdgeKey, Eigen::Vector2d> crossings;
    auto refine = [&](const EdgeKey& k) -> const Eigen::Vector2d& {
        auto it = crossings.find(k);
        if (it != crossings.end()) return it->second;
        Eigen::Vector2d pt;
        if (k.dir == 0) {
            const double xi = Xi(k.j);
            const double x = num::brent(
                [&](double t) { return sym.eval(t, xi) - lambda; }, X(k.i), X(k.i + 1), 1e-13);
            pt = {x, xi};
        } else {
            const double x = X(k.i);
            const double xi = num::brent(
                [&](double t) { return sym.eval(x, t) - lambda; }, Xi(k.j), Xi(k.j + 1), 1e-13);
            pt = {x, xi};
        }
        return crossings.emplace(k, pt).first->second;
    };

    // Cell segments as pairs of edge keys; standard 16-case table with the
    // ambiguous saddles split by the cell-center sample.
    std::map<EdgeKey, std::vector<std::pair<EdgeKey, int>>> adjacency; // key -> (other key, seg id)
    std::vector<std::pair<EdgeKey, EdgeKey>> segments;
    auto add_segment = [&](const EdgeKey& a, const EdgeKey& b) {
        const int id = static_cast<int>(segments.size());
        segments.emplace_back(a, b);
        adjacency[a].push_back({b, id});
        adjacency[b].push_back({a, id});
    };

    for (int i = 0; i + 1 < n; ++i) {
        for (int j = 0; j + 1 < n; ++j) {
            const bool s00 = f(i, j) > 0, s10 = f(i + 1, j) > 0;
            const bool s01 = f(i, j + 1) > 0, s11 = f(i + 1, j + 1) > 0;
            const int code = (s00 ? 1 : 0) | (s10 ? 2 : 0) | (s11 ? 4 : 0) | (s01 ? 8 : 0);
            if (code == 0 || code == 15) continue;
            const EdgeKey bottom{i, j, 0}, top{i, j + 1, 0};
            const EdgeKey left{i, j, 1}, right{i + 1, j, 1};
            switch (code) {
                case 1: case 14: add_segment(bottom, left); break;
                case 2: case 13: add_segment(bottom, right); break;
                case 3: case 12: add_segment(left, right); break;
                case 4: case 11: add_segment(top, right); break;
                case 6: case 9:  add_segment(bottom, top); break;
                case 7: case 8:  add_segment(top, left); break;
                case 5: case 10: {
                    const double center =
                        sym.eval(X(i) + 0.5 * dx, Xi(j) + 0.5 * dxi) - lambda;
                    const bool center_pos = center > 0;
                    if ((code == 5) == center_pos) {
                        add_segment(bottom, right);
                        add_segment(top, left);
                    } else {
                        add_segment(bottom, left);
                        add_segment(top, right);
                    }
                    break;
                }
                default: break;
            }
        }
    }

    // Chain segments into loops. Every edge key must have exactly two incident
    // segments, otherwise the contour escapes the box.
    for (const auto& [key, incident] : adjacency) {
        if (incident.size() != 2) {
            const Eigen::Vector2d pt = refine(key);
            std::ostringstream msg;
            msg << "level set p=" << lambda << " reaches the scan box boundary near ("
                << pt.x() << ", " << pt.y() << "): properness violation";
            throw AssumptionError(msg.str());
        }
    }

    std::vector<Contour> out;
    std::vector<bool> used(segments.size(), false);
    for (size_t start = 0; start < segments.size(); ++start) {
        if (used[start]) continue;
        std::vector<EdgeKey> loop_keys;
        EdgeKey current = segments[start].first;
        int seg = static_cast<int>(start);
        auto same = [](const EdgeKey& a, const EdgeKey& b) { return !(a < b) && !(b < a); };
        while (true) {
            used[seg] = true;
            loop_keys.push_back(current);
            const auto& [a, b] = segments[seg];
            const EdgeKey other = same(current, a) ? b : a;
            const auto& inc = adjacency[other];
            const int next_seg = (inc[0].second == seg) ? inc[1].second : inc[0].second;
            current = other;
            seg = next_seg;
            if (used[seg]) {
                loop_keys.push_back(current);
                break;
            }
        }
        Contour c;
        c.points.reserve(loop_keys.size() + 1);
        for (const auto& k : loop_keys) c.points.push_back(refine(k));
        c.points.push_back(c.points.front());
        double act = polyline_action(c.points);
        if (act < 0) {
            std::reverse(c.points.begin(), c.points.end());
            act = -act;
        }
        c.polyline_action = act;
        out.push_back(std::move(c));
    }

    // Order components by leftmost x.
    std::sort(out.begin(), out.end(), [](const Contour& a, const Contour& b) {
        auto lm = [](const Contour& c) {
            double m = c.points.front().x();
            for (const auto& p : c.points) m = std::min(m, p.x());
            return m;
        };
        return lm(a) < lm(b);
    });
    return out;
}

} // namespace specho
