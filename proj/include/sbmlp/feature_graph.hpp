#pragma once
#include <cstdint>
#include <vector>

#include "sbmlp/boolean_vector.hpp"

namespace sbmlp::uand {

using Edge = std::pair<std::uint32_t, std::uint32_t>; // unordered, stored (lo, hi)

// Simple undirected graph on feature vertices; no self-loops or duplicates.
class FeatureGraph {
public:
    FeatureGraph() = default;
    FeatureGraph(std::uint32_t vertex_count, std::vector<Edge> edges);

    std::uint32_t vertices() const { return vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }
    std::size_t edge_count() const { return edges_.size(); }

    std::vector<std::uint32_t> degrees() const;
    std::uint32_t max_degree() const;

    static FeatureGraph complete(std::uint32_t n);
    static FeatureGraph star(std::uint32_t n); // center 0, leaves 1..n-1

private:
    std::uint32_t vertices_ = 0;
    std::vector<Edge> edges_;
};

// A piece of a balanced partition, with its certified degree bounds.
struct BalancedPiece {
    FeatureGraph graph;
    bool self_balanced = false;
    // Self-balanced certificate: max degree <= degree_bound.
    // Bipartite certificate: sides v0/v1, every v0 degree <= degree_bound_v0
    // and every v1 degree <= degree_bound_v1 (realized bounds; the (a,b) form
    // c*m/a holds with slack factor <= 4 from the dyadic bucketing).
    std::vector<std::uint32_t> v0, v1;
    std::uint32_t degree_bound = 0;
    std::uint32_t degree_bound_v0 = 0;
    std::uint32_t degree_bound_v1 = 0;
};

// Dyadic degree-peeling partition: edge-disjoint pieces whose union is the
// input; each piece is self-balanced (max degree <= ceil(ln^2 |E|)) or
// bipartite with certified per-side degree bounds. Piece count is at most
// log2(max degree) + 1.
std::vector<BalancedPiece> balance_partition(const FeatureGraph& g);

} // namespace sbmlp::uand
