#include <cmath>
#include <stdexcept>

#include "sbmlp/compile.hpp"
#include "sbmlp/kernels.hpp"

namespace sbmlp::circuits {

std::vector<double> OneLayerCompiled::hidden(const std::vector<double>& x) const {
    std::vector<double> feats = core::matvec_t(dict.phi(), x); // Phi^T x
    std::vector<double> h;
    h.reserve(hidden_width);
    for (const auto& block : blocks) {
        std::vector<double> pre(block.d(), block.bias_value());
        for (std::size_t k = 0; k < feats.size(); ++k)
            if (feats[k] != 0.0) kernels::axpy(feats[k], block.win_t().row(k), pre.data(), block.d());
        kernels::relu_inplace(pre.data(), pre.size());
        h.insert(h.end(), pre.begin(), pre.end());
    }
    return h;
}

std::vector<double> OneLayerCompiled::outputs(const std::vector<double>& x) const {
    std::vector<double> h = hidden(x);
    std::vector<double> out = core::matvec(readoff, h);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += readoff_bias[j];
    return out;
}

std::vector<double> OneLayerCompiled::block_eps(
    const std::vector<features::BooleanVector>& samples) const {
    std::vector<double> eps(blocks.size(), 0.0);
    // Collect the tuples each block actually serves.
    std::vector<std::vector<uand::Tuple>> used(blocks.size());
    for (const auto& poly : polynomials)
        for (const auto& [term, coeff] : poly.terms()) {
            if (term.empty()) continue;
            used[term.size() - 1].push_back(term);
        }
    for (auto& v : used) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    for (const auto& b : samples) {
        std::vector<std::vector<double>> acts;
        acts.reserve(blocks.size());
        for (const auto& block : blocks) acts.push_back(block.eval(b));
        for (std::size_t n = 0; n < blocks.size(); ++n) {
            for (const auto& t : used[n]) {
                auto r = blocks[n].readoff_vector(t);
                if (!r) continue;
                bool all = true;
                for (auto k : t)
                    if (!b.get(k)) {
                        all = false;
                        break;
                    }
                double err = std::abs(r->apply(acts[n]) - (all ? 1.0 : 0.0));
                eps[n] = std::max(eps[n], err);
            }
        }
    }
    return eps;
}

OneLayerCompiled compile_one_layer(const BooleanCircuit& c, features::FeatureDictionary dict,
                                   std::size_t d_per_fanin, std::size_t s, double polylog_c,
                                   core::RngStream& rng) {
    if (dict.m() != c.width())
        throw std::invalid_argument("compile_one_layer: dictionary width mismatch");
    OneLayerCompiled out;
    out.polynomials = and_decomposition(c); // throws beyond the fan-in guard
    std::size_t n_max = 1;
    for (const auto& p : out.polynomials) n_max = std::max(n_max, p.max_term_size());

    out.dict = std::move(dict);
    for (std::size_t n = 1; n <= n_max; ++n) {
        core::RngStream block_rng = rng.derive(n);
        out.blocks.push_back(uand::build_uand_highfanin(c.width(), d_per_fanin, s,
                                                        static_cast<std::uint32_t>(n), polylog_c,
                                                        block_rng));
    }
    out.hidden_width = n_max * d_per_fanin;

    out.readoff = core::DenseMatrix(c.width(), out.hidden_width, 0.0);
    out.readoff_bias.assign(c.width(), 0.0);
    out.l1_norms.resize(c.width());
    for (std::size_t j = 0; j < c.width(); ++j) {
        const AndPolynomial& poly = out.polynomials[j];
        out.l1_norms[j] = poly.l1_norm();
        for (const auto& [term, coeff] : poly.terms()) {
            if (term.empty()) {
                out.readoff_bias[j] += static_cast<double>(coeff);
                continue;
            }
            std::size_t block_idx = term.size() - 1;
            auto r = out.blocks[block_idx].readoff_vector(term);
            if (!r) {
                out.uncovered.push_back(term);
                continue;
            }
            std::size_t offset = block_idx * d_per_fanin;
            for (auto i : r->neurons)
                out.readoff.at(j, offset + i) += static_cast<double>(coeff) * r->value;
        }
    }
    return out;
}

} // namespace sbmlp::circuits
