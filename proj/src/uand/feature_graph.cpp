#include "sbmlp/feature_graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sbmlp::uand {

FeatureGraph::FeatureGraph(std::uint32_t vertex_count, std::vector<Edge> edges)
    : vertices_(vertex_count) {
    for (auto& [a, b] : edges) {
        if (a == b) throw std::invalid_argument("FeatureGraph: self-loop");
        if (a > b) std::swap(a, b);
        if (b >= vertex_count) throw std::invalid_argument("FeatureGraph: vertex out of range");
    }
    std::sort(edges.begin(), edges.end());
    auto dup = std::adjacent_find(edges.begin(), edges.end());
    if (dup != edges.end()) throw std::invalid_argument("FeatureGraph: duplicate edge");
    edges_ = std::move(edges);
}

std::vector<std::uint32_t> FeatureGraph::degrees() const {
    std::vector<std::uint32_t> deg(vertices_, 0);
    for (auto [a, b] : edges_) {
        ++deg[a];
        ++deg[b];
    }
    return deg;
}

std::uint32_t FeatureGraph::max_degree() const {
    auto deg = degrees();
    return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

FeatureGraph FeatureGraph::complete(std::uint32_t n) {
    std::vector<Edge> edges;
    for (std::uint32_t a = 0; a + 1 < n; ++a)
        for (std::uint32_t b = a + 1; b < n; ++b) edges.push_back({a, b});
    return FeatureGraph(n, std::move(edges));
}

FeatureGraph FeatureGraph::star(std::uint32_t n) {
    std::vector<Edge> edges;
    for (std::uint32_t b = 1; b < n; ++b) edges.push_back({0, b});
    return FeatureGraph(n, std::move(edges));
}

namespace {

std::uint32_t self_balanced_bound(std::size_t edge_count) {
    if (edge_count < 3) return 2;
    double l = std::log(static_cast<double>(edge_count));
    return static_cast<std::uint32_t>(std::ceil(l * l));
}

BalancedPiece make_bipartite_piece(std::uint32_t vertices, std::vector<Edge> edges,
                                   const std::vector<char>& on_v0) {
    BalancedPiece p;
    std::vector<std::uint32_t> d0(vertices, 0), d1(vertices, 0);
    std::vector<char> seen0(vertices, 0), seen1(vertices, 0);
    for (auto [a, b] : edges) {
        std::uint32_t lo = on_v0[a] ? a : b;
        std::uint32_t hi = on_v0[a] ? b : a;
        ++d0[lo];
        ++d1[hi];
        seen0[lo] = 1;
        seen1[hi] = 1;
    }
    for (std::uint32_t v = 0; v < vertices; ++v) {
        if (seen0[v]) {
            p.v0.push_back(v);
            p.degree_bound_v0 = std::max(p.degree_bound_v0, d0[v]);
        }
        if (seen1[v]) {
            p.v1.push_back(v);
            p.degree_bound_v1 = std::max(p.degree_bound_v1, d1[v]);
        }
    }
    p.graph = FeatureGraph(vertices, std::move(edges));
    p.self_balanced = false;
    return p;
}

} // namespace

std::vector<BalancedPiece> balance_partition(const FeatureGraph& g) {
    std::vector<BalancedPiece> pieces;
    if (g.edge_count() == 0) return pieces;
    const std::uint32_t bound = self_balanced_bound(g.edge_count());
    const std::uint32_t n_vertices = g.vertices();

    std::vector<std::vector<Edge>> work;
    work.push_back(g.edges());

    while (!work.empty()) {
        std::vector<Edge> edges = std::move(work.back());
        work.pop_back();
        if (edges.empty()) continue;

        std::vector<std::uint32_t> deg(n_vertices, 0);
        for (auto [a, b] : edges) {
            ++deg[a];
            ++deg[b];
        }
        std::uint32_t maxdeg = 0;
        for (auto d : deg) maxdeg = std::max(maxdeg, d);

        if (maxdeg <= bound) {
            BalancedPiece p;
            p.graph = FeatureGraph(n_vertices, std::move(edges));
            p.self_balanced = true;
            p.degree_bound = bound;
            pieces.push_back(std::move(p));
            continue;
        }

        // Dyadic levels: level l holds vertices with degree in
        // (maxdeg/2^{l+1}, maxdeg/2^l]; vertices at or below the self-balanced
        // bound form the residual level.
        std::vector<double> thresholds;
        for (double hi = static_cast<double>(maxdeg); hi > bound; hi /= 2.0)
            thresholds.push_back(hi);
        const int residual = static_cast<int>(thresholds.size());
        std::vector<int> level(n_vertices, residual);
        for (std::uint32_t v = 0; v < n_vertices; ++v) {
            if (deg[v] == 0 || deg[v] <= bound) continue;
            for (std::size_t l = 0; l < thresholds.size(); ++l) {
                if (static_cast<double>(deg[v]) <= thresholds[l] &&
                    static_cast<double>(deg[v]) > thresholds[l] / 2.0) {
                    level[v] = static_cast<int>(l);
                    break;
                }
            }
        }

        std::vector<std::vector<Edge>> cross(thresholds.size());
        std::vector<std::vector<Edge>> internal(thresholds.size());
        std::vector<Edge> residual_edges;
        for (auto e : edges) {
            int la = level[e.first], lb = level[e.second];
            int l = std::min(la, lb);
            if (l == residual) residual_edges.push_back(e);
            else if (la == lb) internal[static_cast<std::size_t>(l)].push_back(e);
            else cross[static_cast<std::size_t>(l)].push_back(e);
        }

        for (std::size_t l = 0; l < thresholds.size(); ++l) {
            if (!cross[l].empty()) {
                // V0 = the level-l endpoints, V1 = strictly lower-degree
                // endpoints; disjoint since levels differ.
                std::vector<char> on_v0(n_vertices, 0);
                for (auto [a, b] : cross[l])
                    on_v0[level[a] == static_cast<int>(l) ? a : b] = 1;
                pieces.push_back(make_bipartite_piece(n_vertices, cross[l], on_v0));
            }
            if (!internal[l].empty()) {
                // 2-color the level's vertices by rank parity; cross-color
                // edges form a bipartite piece, same-color edges recurse.
                std::vector<std::uint32_t> members;
                for (std::uint32_t v = 0; v < n_vertices; ++v)
                    if (level[v] == static_cast<int>(l)) members.push_back(v);
                std::vector<char> color(n_vertices, 0);
                for (std::size_t i = 0; i < members.size(); ++i)
                    color[members[i]] = static_cast<char>(i % 2);
                std::vector<Edge> bip, rest0, rest1;
                for (auto e : internal[l]) {
                    if (color[e.first] != color[e.second]) bip.push_back(e);
                    else if (color[e.first] == 0) rest0.push_back(e);
                    else rest1.push_back(e);
                }
                if (!bip.empty()) {
                    std::vector<char> on_v0(n_vertices, 0);
                    for (auto [a, b] : bip) on_v0[color[a] == 0 ? a : b] = 1;
                    pieces.push_back(make_bipartite_piece(n_vertices, bip, on_v0));
                }
                // Same-color classes recurse separately so their member sets
                // halve and the ranking re-separates them.
                if (!rest0.empty()) work.push_back(std::move(rest0));
                if (!rest1.empty()) work.push_back(std::move(rest1));
            }
        }
        if (!residual_edges.empty()) {
            BalancedPiece p;
            p.graph = FeatureGraph(n_vertices, std::move(residual_edges));
            p.self_balanced = true;
            p.degree_bound = bound;
            pieces.push_back(std::move(p));
        }
    }
    return pieces;
}

} // namespace sbmlp::uand
