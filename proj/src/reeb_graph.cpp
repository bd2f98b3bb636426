#include "specho/reeb_graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "specho/errors.hpp"

namespace specho {

int WeightedReebGraph::vertex_degree(int v) const {
    int d = 0;
    for (const auto& e : edges) d += (e.endpoint_lo == v) + (e.endpoint_hi == v);
    return d;
}

std::vector<int> WeightedReebGraph::lineage_chain(int edge_id) const {
    std::vector<int> chain;
    const int lin = edges[edge_id].lineage;
    for (const auto& e : edges)
        if (e.lineage == lin) chain.push_back(e.id);
    std::sort(chain.begin(), chain.end(), [this](int a, int b) {
        return edges[a].interval.lo < edges[b].interval.lo;
    });
    return chain;
}

void validate_structure(const WeightedReebGraph& g) {
    for (size_t i = 1; i < g.vertices.size(); ++i)
        if (!(g.vertices[i].value > g.vertices[i - 1].value))
            throw UsageError("reeb graph: vertices not sorted by value");
    for (const auto& v : g.vertices) {
        const int vi = static_cast<int>(&v - g.vertices.data());
        const int deg = g.vertex_degree(vi);
        const int expected = v.kind == CriticalKind::elliptic ? 1 : 3;
        if (deg != expected) {
            std::ostringstream msg;
            msg << "reeb graph: vertex " << vi << " (value " << v.value << ", "
                << to_string(v.kind) << ") has degree " << deg << ", expected " << expected;
            throw UsageError(msg.str());
        }
    }
    for (const auto& e : g.edges) {
        if (!(e.length > 0.0) || !std::isfinite(e.length))
            throw UsageError("reeb graph: edge length not finite and positive");
        if (e.interval.empty()) throw UsageError("reeb graph: empty edge interval");
    }
    // Edge intervals must tile the regular bands: within one band all edges share
    // the same interval, and band boundaries are window ends or vertex values.
    std::vector<double> bounds{g.window.lo};
    for (const auto& v : g.vertices) bounds.push_back(v.value);
    bounds.push_back(g.window.hi);
    for (const auto& e : g.edges) {
        bool lo_ok = false, hi_ok = false;
        for (double b : bounds) {
            lo_ok = lo_ok || std::abs(e.interval.lo - b) < 1e-9 * std::max(1.0, std::abs(b));
            hi_ok = hi_ok || std::abs(e.interval.hi - b) < 1e-9 * std::max(1.0, std::abs(b));
        }
        if (!lo_ok || !hi_ok)
            throw UsageError("reeb graph: edge interval does not align with band boundaries");
    }
}

namespace {

struct EdgeSignature {
    // role: 0 free/open at both ends edge, 1 attaches to elliptic below, 2 elliptic above,
    // combined with hyperbolic attachment roles; enough to disambiguate within a band.
    int lo_vertex_kind; // -1 open, 0 elliptic, 1 hyp-trunk, 2 hyp-branch
    int hi_vertex_kind;
};

int attachment_code(const WeightedReebGraph& g, const ReebEdge& e, bool lo_end) {
    const int v = lo_end ? e.endpoint_lo : e.endpoint_hi;
    if (v < 0) return -1;
    const auto& vert = g.vertices[v];
    if (vert.kind == CriticalKind::elliptic) return 0;
    if (vert.trunk_edge == e.id) return 1;
    return 2;
}

const TaylorWeights* find_taylor(const WeightedReebGraph& g, int vertex, TaylorRole role) {
    for (const auto& t : g.taylor)
        if (t.vertex == vertex && t.role == role) return &t;
    return nullptr;
}

// Order m matches when |a_m - b_m| <= rel_m · max(|a_m|, |b_m|, floor_m).
// The floor keeps near-zero coefficients from demanding absurd relative accuracy:
// floor_m scales the leading coefficient by the expansion-variable scale.
bool coeffs_match(const series::Coeffs& a, const series::Coeffs& b, const TaylorTolerance& tol,
                  std::string* why) {
    const double lead = std::max(std::abs(a[0]), std::abs(b[0]));
    for (int m = 0; m < 4; ++m) {
        if (tol.rel[m] < 0) continue;
        const double floor_m = tol.floor_frac * lead / std::pow(tol.scale, m);
        const double diff = std::abs(a[m] - b[m]);
        if (diff > tol.rel[m] * std::max({std::abs(a[m]), std::abs(b[m]), floor_m})) {
            if (why) {
                std::ostringstream msg;
                msg << "order " << m << ": " << a[m] << " vs " << b[m];
                *why = msg.str();
            }
            return false;
        }
    }
    return true;
}

} // namespace

EquivalenceResult graphs_equivalent(const WeightedReebGraph& a, const WeightedReebGraph& b,
                                    const EquivalenceOptions& opts) {
    EquivalenceResult res;
    auto fail = [&](const std::string& msg) {
        res.equivalent = false;
        res.diff = msg;
        return res;
    };

    if (a.vertices.size() != b.vertices.size()) {
        std::ostringstream msg;
        msg << "vertex count differs: " << a.vertices.size() << " vs " << b.vertices.size();
        return fail(msg.str());
    }
    if (a.edges.size() != b.edges.size()) {
        std::ostringstream msg;
        msg << "edge count differs: " << a.edges.size() << " vs " << b.edges.size();
        return fail(msg.str());
    }
    // Vertices match by sorted order; values must agree within the bracket.
    for (size_t i = 0; i < a.vertices.size(); ++i) {
        const auto &va = a.vertices[i], &vb = b.vertices[i];
        if (va.kind != vb.kind) {
            std::ostringstream msg;
            msg << "vertex " << i << " kind differs at value " << va.value;
            return fail(msg.str());
        }
        if (std::abs(va.value - vb.value) > opts.vertex_value_tol) {
            std::ostringstream msg;
            msg << "vertex " << i << " value differs: " << va.value << " vs " << vb.value;
            return fail(msg.str());
        }
    }

    // Band-by-band edge matching. Bands correspond by order; within a band,
    // match by attachment signature, then by closest length among the leftovers.
    auto band_key = [](const WeightedReebGraph& g, const ReebEdge& e) {
        int idx = 0;
        for (const auto& v : g.vertices)
            if (v.value <= e.interval.lo + 1e-12) ++idx;
        return idx;
    };
    std::map<int, std::vector<const ReebEdge*>> bands_a, bands_b;
    for (const auto& e : a.edges) bands_a[band_key(a, e)].push_back(&e);
    for (const auto& e : b.edges) bands_b[band_key(b, e)].push_back(&e);
    if (bands_a.size() != bands_b.size()) return fail("band structure differs");

    for (auto& [band, ea] : bands_a) {
        auto it = bands_b.find(band);
        if (it == bands_b.end() || it->second.size() != ea.size()) {
            std::ostringstream msg;
            msg << "component count differs in band " << band;
            return fail(msg.str());
        }
        auto& eb = it->second;
        std::vector<bool> taken(eb.size(), false);
        for (const ReebEdge* pa : ea) {
            const int lo_code = attachment_code(a, *pa, true);
            const int hi_code = attachment_code(a, *pa, false);
            int best = -1;
            double best_len_diff = 1e300;
            for (size_t j = 0; j < eb.size(); ++j) {
                if (taken[j]) continue;
                if (attachment_code(b, *eb[j], true) != lo_code) continue;
                if (attachment_code(b, *eb[j], false) != hi_code) continue;
                const double d = std::abs(eb[j]->length - pa->length);
                if (d < best_len_diff) {
                    best_len_diff = d;
                    best = static_cast<int>(j);
                }
            }
            if (best < 0) {
                std::ostringstream msg;
                msg << "no counterpart for edge " << pa->id << " (band " << band
                    << ", attachments " << lo_code << "/" << hi_code << ")";
                return fail(msg.str());
            }
            taken[best] = true;
            const double rel =
                std::abs(eb[best]->length - pa->length) / std::max(pa->length, 1e-12);
            if (rel > opts.length_rel_tol) {
                std::ostringstream msg;
                msg << "edge " << pa->id << " length differs: " << pa->length << " vs "
                    << eb[best]->length << " (rel " << rel << " > " << opts.length_rel_tol << ")";
                return fail(msg.str());
            }
        }
    }

    if (opts.compare_taylor) {
        for (size_t i = 0; i < a.vertices.size(); ++i) {
            if (a.vertices[i].kind != CriticalKind::hyperbolic) continue;
            for (TaylorRole role : {TaylorRole::trunk, TaylorRole::branch1, TaylorRole::branch2}) {
                const TaylorWeights* ta = find_taylor(a, static_cast<int>(i), role);
                const TaylorWeights* tb = find_taylor(b, static_cast<int>(i), role);
                if (!ta || !tb) {
                    std::ostringstream msg;
                    msg << "missing Taylor record at vertex " << i << " role " << to_string(role);
                    return fail(msg.str());
                }
                // Branch labels may be swapped between the two graphs.
                if (role == TaylorRole::branch1 || role == TaylorRole::branch2) {
                    const TaylorWeights* tb_alt = find_taylor(
                        b, static_cast<int>(i),
                        role == TaylorRole::branch1 ? TaylorRole::branch2 : TaylorRole::branch1);
                    std::string why;
                    if (!coeffs_match(ta->f_prime, tb->f_prime, opts.taylor, &why) && tb_alt &&
                        coeffs_match(ta->f_prime, tb_alt->f_prime, opts.taylor, nullptr))
                        tb = tb_alt;
                }
                std::string why;
                if (!coeffs_match(ta->f_prime, tb->f_prime, opts.taylor, &why)) {
                    std::ostringstream msg;
                    msg << "f' series differ at vertex " << i << " role " << to_string(role)
                        << " (" << why << ")";
                    return fail(msg.str());
                }
                if (!coeffs_match(ta->g, tb->g, opts.taylor, &why)) {
                    std::ostringstream msg;
                    msg << "g series differ at vertex " << i << " role " << to_string(role) << " ("
                        << why << ")";
                    return fail(msg.str());
                }
            }
        }
    }

    res.equivalent = true;
    return res;
}

} // namespace specho
