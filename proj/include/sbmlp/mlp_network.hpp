#pragma once
#include <string>
#include <vector>

#include "sbmlp/activations.hpp"
#include "sbmlp/dense_matrix.hpp"

namespace sbmlp::core {

// Sequence of affine-plus-nonlinearity layers. Layer widths may vary.
class MlpNetwork {
public:
    struct Layer {
        DenseMatrix win;          // out_dim x in_dim
        std::vector<double> bias; // out_dim
        ActivationKind act;
    };

    void add_layer(Layer l);
    std::size_t depth() const { return layers_.size(); }
    const Layer& layer(std::size_t i) const { return layers_[i]; }
    std::vector<Layer>& layers() { return layers_; }
    const std::vector<Layer>& layers() const { return layers_; }

    std::size_t input_dim() const { return layers_.empty() ? 0 : layers_.front().win.cols(); }
    std::size_t output_dim() const { return layers_.empty() ? 0 : layers_.back().win.rows(); }

    std::vector<double> eval(const std::vector<double>& x) const;
    // Columns of x are inputs; returns output_dim x batch.
    DenseMatrix eval_batch(const DenseMatrix& x_cols) const;

private:
    std::vector<Layer> layers_;
};

// Rewrites every staircase layer as its 4a-ReLU unit bank, folding the
// recombination into the next layer's weights (or into `final_matrix` for a
// trailing staircase layer). Output network is pure ReLU with the same depth
// and the same input/output behavior up to float64 noise.
MlpNetwork expand_staircase_layers(const MlpNetwork& net, DenseMatrix* final_matrix = nullptr);

} // namespace sbmlp::core
