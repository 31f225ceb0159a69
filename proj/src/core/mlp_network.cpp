#include "sbmlp/mlp_network.hpp"

#include <optional>
#include <stdexcept>

#include "sbmlp/kernels.hpp"

namespace sbmlp::core {

void MlpNetwork::add_layer(Layer l) {
    if (l.win.rows() != l.bias.size())
        throw std::invalid_argument("mlp layer: bias length must match rows");
    if (!layers_.empty() && layers_.back().win.rows() != l.win.cols())
        throw std::invalid_argument("mlp layer: width mismatch with previous layer");
    layers_.push_back(std::move(l));
}

std::vector<double> MlpNetwork::eval(const std::vector<double>& x) const {
    std::vector<double> cur = x;
    for (const Layer& l : layers_) {
        std::vector<double> next = matvec(l.win, cur);
        for (std::size_t i = 0; i < next.size(); ++i) next[i] += l.bias[i];
        apply_activation(l.act, next.data(), next.size());
        cur = std::move(next);
    }
    return cur;
}

MlpNetwork expand_staircase_layers(const MlpNetwork& net, DenseMatrix* final_matrix) {
    MlpNetwork out;
    // Pending recombination from an expanded staircase layer: the next affine
    // map must consume unit activations via coeff[j] on block j.
    std::optional<StaircaseRelus> pending;
    auto fold_columns = [&](const DenseMatrix& w) {
        // columns of w correspond to the pre-expansion staircase outputs; the
        // expanded layer exposes blocks of 4a units per output.
        const StaircaseRelus& s = *pending;
        const std::size_t units = s.coeff.size();
        DenseMatrix folded(w.rows(), w.cols() * units);
        for (std::size_t r = 0; r < w.rows(); ++r)
            for (std::size_t c = 0; c < w.cols(); ++c)
                for (std::size_t j = 0; j < units; ++j)
                    folded.at(r, c * units + j) = w.at(r, c) * s.coeff[j];
        return folded;
    };

    for (const auto& layer : net.layers()) {
        DenseMatrix w = pending ? fold_columns(layer.win) : layer.win;
        std::vector<double> bias = layer.bias;
        pending.reset();
        if (layer.act.kind == ActivationKind::Relu) {
            out.add_layer({std::move(w), std::move(bias), ActivationKind::relu()});
            continue;
        }
        // staircase(v) = sum_j coeff[j] ReLU(sigma_j v - t_j) with sigma = +1
        // for the first half of the units and -1 for the mirrored half
        StaircaseRelus s = staircase_as_relus(layer.act.a);
        const std::size_t units = s.coeff.size();
        const std::size_t rows = w.rows();
        DenseMatrix expanded(rows * units, w.cols());
        std::vector<double> eb(rows * units);
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t j = 0; j < units; ++j) {
                double sigma = j < units / 2 ? 1.0 : -1.0;
                std::size_t er = r * units + j;
                for (std::size_t c = 0; c < w.cols(); ++c)
                    expanded.at(er, c) = sigma * w.at(r, c);
                eb[er] = sigma * bias[r] - sigma * s.threshold[j];
            }
        }
        out.add_layer({std::move(expanded), std::move(eb), ActivationKind::relu()});
        pending = std::move(s);
    }
    if (pending) {
        if (!final_matrix)
            throw std::invalid_argument(
                "expand_staircase_layers: trailing staircase layer needs a final matrix to fold");
        *final_matrix = fold_columns(*final_matrix);
    }
    return out;
}

DenseMatrix MlpNetwork::eval_batch(const DenseMatrix& x_cols) const {
    DenseMatrix cur = x_cols;
    for (const Layer& l : layers_) {
        DenseMatrix next(l.win.rows(), cur.cols());
        kernels::gemm(l.win.data(), cur.data(), next.data(), l.win.rows(), l.win.cols(),
                      cur.cols());
        for (std::size_t r = 0; r < next.rows(); ++r) {
            double* row = next.row(r);
            for (std::size_t c = 0; c < next.cols(); ++c) row[c] += l.bias[r];
            if (l.act.kind == ActivationKind::Relu)
                kernels::relu(row, row, next.cols());
            else
                apply_activation(l.act, row, next.cols());
        }
        cur = std::move(next);
    }
    return cur;
}

} // namespace sbmlp::core
