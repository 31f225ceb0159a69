#pragma once
#include <map>
#include <optional>

#include "sbmlp/feature_graph.hpp"
#include "sbmlp/mlp_network.hpp"
#include "sbmlp/uand.hpp"

namespace sbmlp::uand {

// Targeted superpositional AND over the edges of a feature graph. Each
// partition piece gets an equal slice of neurons; per edge a random subset
// Sigma_{kl} (nested in the anchor's cell on balanced pieces) carries
// random-signed features, and the edge's read-off averages the neurons of
// Sigma_out = {i in Sigma_{kl} : both signs +1}. Evaluation is
// ReLU(W_in b - 1); the nominal 4/A output scale is folded into the realized
// read-off normalization.
class TargetedUand {
public:
    struct EdgeSets {
        std::vector<std::uint32_t> sigma;     // Sigma_{kl}, global neuron ids
        std::vector<std::uint32_t> sigma_out; // both-signs-positive subset
    };
    struct PieceInfo {
        std::size_t neuron_offset = 0;
        std::size_t width = 0;
        std::size_t subset_size = 0; // A
        bool self_balanced = false;
    };

    std::size_t m() const { return win_.cols(); }
    std::size_t d() const { return win_.rows(); }
    const core::DenseMatrix& win() const { return win_; }
    const FeatureGraph& graph() const { return graph_; }
    const std::vector<PieceInfo>& pieces() const { return pieces_; }
    const std::map<Edge, EdgeSets>& edge_sets() const { return edge_sets_; }
    const std::vector<Edge>& empty_edges() const { return empty_edges_; }

    // Post-ReLU activations on a basis-aligned boolean input.
    std::vector<double> eval(const features::BooleanVector& b) const;

    // Mean activation over the realized Sigma_out; nullopt for edges of the
    // graph whose Sigma_out came out empty; throws for absent edges.
    std::optional<double> readoff_edge(const std::vector<double>& activation, Edge e) const;

    core::MlpNetwork as_mlp() const; // single ReLU layer, bias -1

    friend TargetedUand build_targeted_uand(const FeatureGraph& g, std::size_t d, std::size_t s,
                                            core::RngStream& rng);

private:
    core::DenseMatrix win_;   // d x m signed indicator columns
    core::DenseMatrix win_t_; // m x d, contiguous columns for evaluation
    FeatureGraph graph_;
    std::vector<PieceInfo> pieces_;
    std::map<Edge, EdgeSets> edge_sets_;
    std::vector<Edge> empty_edges_;
};

// pre: |E| <= m * ceil(ln^2 m) (targeted regime guard).
TargetedUand build_targeted_uand(const FeatureGraph& g, std::size_t d, std::size_t s,
                                 core::RngStream& rng);

} // namespace sbmlp::uand
