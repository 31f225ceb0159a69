#include "sbmlp/targeted_uand.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "sbmlp/kernels.hpp"

namespace sbmlp::uand {

std::vector<double> TargetedUand::eval(const features::BooleanVector& b) const {
    if (b.length() != m()) throw std::invalid_argument("targeted eval: width mismatch");
    std::vector<double> pre(d(), -1.0);
    for (auto k : b.active()) kernels::axpy(1.0, win_t_.row(k), pre.data(), d());
    kernels::relu_inplace(pre.data(), pre.size());
    return pre;
}

std::optional<double> TargetedUand::readoff_edge(const std::vector<double>& activation,
                                                 Edge e) const {
    if (e.first > e.second) std::swap(e.first, e.second);
    auto it = edge_sets_.find(e);
    if (it == edge_sets_.end())
        throw std::invalid_argument("readoff_edge: edge not in the targeted graph");
    const auto& out = it->second.sigma_out;
    if (out.empty()) return std::nullopt;
    double s = 0.0;
    for (auto i : out) s += activation[i];
    return s / static_cast<double>(out.size());
}

core::MlpNetwork TargetedUand::as_mlp() const {
    core::MlpNetwork net;
    net.add_layer({win_, std::vector<double>(d(), -1.0), core::ActivationKind::relu()});
    return net;
}

namespace {

// Uniform size-k subset of {0..n-1} via partial Fisher-Yates on a scratch pad.
std::vector<std::uint32_t> random_subset(std::uint32_t n, std::uint32_t k,
                                         std::vector<std::uint32_t>& scratch,
                                         core::RngStream& rng) {
    if (scratch.size() != n) {
        scratch.resize(n);
        for (std::uint32_t i = 0; i < n; ++i) scratch[i] = i;
    }
    std::vector<std::uint32_t> out(k);
    for (std::uint32_t i = 0; i < k; ++i) {
        std::uint32_t j = i + static_cast<std::uint32_t>(rng.next_below(n - i));
        std::swap(scratch[i], scratch[j]);
        out[i] = scratch[i];
    }
    std::sort(out.begin(), out.end());
    // restore scratch to identity lazily: full reset is O(n) but n is small
    for (std::uint32_t i = 0; i < n; ++i) scratch[i] = i;
    return out;
}

} // namespace

TargetedUand build_targeted_uand(const FeatureGraph& g, std::size_t d, std::size_t s,
                                 core::RngStream& rng) {
    const std::size_t m = g.vertices();
    if (m < 2) throw std::invalid_argument("build_targeted_uand: need >= 2 vertices");
    double lg = std::log(static_cast<double>(std::max<std::size_t>(m, 3)));
    if (g.edge_count() > m * static_cast<std::size_t>(std::ceil(lg * lg)))
        throw std::invalid_argument("build_targeted_uand: edge count beyond the targeted guard");

    auto partition = balance_partition(g);
    TargetedUand t;
    t.graph_ = g;
    t.win_ = core::DenseMatrix(d, m, 0.0);
    if (partition.empty()) {
        t.win_t_ = t.win_.transposed();
        return t;
    }

    const std::size_t d_piece = std::max<std::size_t>(1, d / partition.size());

    std::size_t offset = 0;
    for (std::size_t pi = 0; pi < partition.size(); ++pi) {
        const BalancedPiece& piece = partition[pi];
        const std::size_t width = std::min(d_piece, d - offset);
        if (width == 0) throw std::invalid_argument("build_targeted_uand: d too small for pieces");
        core::RngStream prng = rng.derive(pi);

        TargetedUand::PieceInfo info;
        info.neuron_offset = offset;
        info.width = width;
        info.self_balanced = piece.self_balanced;

        // Subset size A: sqrt(d/s) on self-balanced pieces; nested cell subsets
        // on bipartite pieces use sqrt(d)/s capped by the cell size.
        std::uint32_t subset = 0;
        std::vector<std::uint32_t> cell_of; // balanced path: neuron -> anchor cell
        std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> cells;
        if (piece.self_balanced) {
            subset = static_cast<std::uint32_t>(std::lround(
                std::sqrt(static_cast<double>(width) / static_cast<double>(std::max<std::size_t>(1, s)))));
            subset = std::max<std::uint32_t>(1, std::min<std::uint32_t>(subset, width));
        } else {
            const std::size_t a = std::max<std::size_t>(1, piece.v0.size());
            std::uint32_t cell_target = static_cast<std::uint32_t>(std::max<std::size_t>(1, width / a));
            subset = static_cast<std::uint32_t>(std::lround(
                std::sqrt(static_cast<double>(width)) / static_cast<double>(std::max<std::size_t>(1, s))));
            subset = std::max<std::uint32_t>(1, std::min(subset, cell_target));
            // Random near-equal partition of the piece's neurons into anchor cells.
            cell_of.resize(width);
            std::vector<std::uint32_t> perm(width);
            for (std::uint32_t i = 0; i < width; ++i) perm[i] = i;
            for (std::uint32_t i = static_cast<std::uint32_t>(width); i > 1; --i)
                std::swap(perm[i - 1], perm[prng.next_below(i)]);
            for (std::uint32_t i = 0; i < width; ++i) {
                std::uint32_t anchor_idx = i % static_cast<std::uint32_t>(a);
                cells[piece.v0[anchor_idx]].push_back(perm[i]);
            }
            for (auto& [anchor, neurons] : cells) std::sort(neurons.begin(), neurons.end());
        }
        info.subset_size = subset;
        t.pieces_.push_back(info);

        // Draw Sigma_{kl} per edge (sorted edge order fixes RNG consumption).
        std::vector<std::uint32_t> scratch;
        std::map<std::uint32_t, std::vector<std::uint32_t>> sigma_v; // vertex -> sorted neurons
        for (const Edge& e : piece.graph.edges()) {
            std::vector<std::uint32_t> local;
            if (piece.self_balanced) {
                local = random_subset(static_cast<std::uint32_t>(width), subset, scratch, prng);
            } else {
                // anchor = the V0 endpoint
                bool first_is_anchor =
                    std::binary_search(piece.v0.begin(), piece.v0.end(), e.first);
                std::uint32_t anchor = first_is_anchor ? e.first : e.second;
                const auto& cell = cells[anchor];
                std::uint32_t k = std::min<std::uint32_t>(subset,
                                                          static_cast<std::uint32_t>(cell.size()));
                std::vector<std::uint32_t> scratch_cell;
                auto pick = random_subset(static_cast<std::uint32_t>(cell.size()),
                                          std::max<std::uint32_t>(1, k), scratch_cell, prng);
                local.reserve(pick.size());
                for (auto idx : pick) local.push_back(cell[idx]);
                std::sort(local.begin(), local.end());
            }
            TargetedUand::EdgeSets es;
            es.sigma.reserve(local.size());
            for (auto i : local) es.sigma.push_back(static_cast<std::uint32_t>(offset) + i);
            for (auto gi : es.sigma) {
                auto& sv1 = sigma_v[e.first];
                auto& sv2 = sigma_v[e.second];
                sv1.push_back(gi);
                sv2.push_back(gi);
            }
            t.edge_sets_[e] = std::move(es);
        }
        for (auto& [v, neurons] : sigma_v) {
            std::sort(neurons.begin(), neurons.end());
            neurons.erase(std::unique(neurons.begin(), neurons.end()), neurons.end());
        }
        // Signs per (vertex, neuron), ascending order for determinism.
        std::map<std::uint32_t, std::unordered_map<std::uint32_t, double>> sign_of;
        for (auto& [v, neurons] : sigma_v) {
            auto& signs = sign_of[v];
            for (auto gi : neurons) {
                double sgn = prng.next_bernoulli(0.5) ? 1.0 : -1.0;
                signs[gi] = sgn;
                t.win_.at(gi, v) = sgn;
            }
        }
        // Realized Sigma_out per edge of this piece.
        for (const Edge& e : piece.graph.edges()) {
            auto& es = t.edge_sets_[e];
            const auto& s1 = sign_of[e.first];
            const auto& s2 = sign_of[e.second];
            for (auto gi : es.sigma)
                if (s1.at(gi) > 0.0 && s2.at(gi) > 0.0) es.sigma_out.push_back(gi);
            if (es.sigma_out.empty()) t.empty_edges_.push_back(e);
        }
        offset += width;
    }
    t.win_.check_finite("targeted win");
    t.win_t_ = t.win_.transposed();
    return t;
}

} // namespace sbmlp::uand
