#include "sbmlp/circuit.hpp"

#include <sstream>
#include <stdexcept>

namespace sbmlp::circuits {

const char* gate_op_name(GateOp op) {
    switch (op) {
        case GateOp::And: return "AND";
        case GateOp::Or: return "OR";
        case GateOp::Xor: return "XOR";
        case GateOp::Not: return "NOT";
        case GateOp::Copy: return "COPY";
        case GateOp::Const0: return "CONST0";
        case GateOp::Const1: return "CONST1";
    }
    return "?";
}

int gate_arity(GateOp op) {
    switch (op) {
        case GateOp::And:
        case GateOp::Or:
        case GateOp::Xor: return 2;
        case GateOp::Not:
        case GateOp::Copy: return 1;
        case GateOp::Const0:
        case GateOp::Const1: return 0;
    }
    return 0;
}

bool Gate::eval(bool a, bool b) const {
    switch (op) {
        case GateOp::And: return a && b;
        case GateOp::Or: return a || b;
        case GateOp::Xor: return a != b;
        case GateOp::Not: return !a;
        case GateOp::Copy: return a;
        case GateOp::Const0: return false;
        case GateOp::Const1: return true;
    }
    return false;
}

BooleanCircuit::BooleanCircuit(std::size_t width, std::vector<std::vector<Gate>> layers)
    : width_(width), layers_(std::move(layers)) {
    for (auto& layer : layers_) {
        if (layer.size() != width_)
            throw std::invalid_argument("circuit layer width mismatch");
        for (Gate& g : layer) {
            int ar = gate_arity(g.op);
            if ((ar >= 1 && g.in0 >= width_) || (ar >= 2 && g.in1 >= width_))
                throw std::invalid_argument("circuit gate wire out of range");
            // canonicalize unused inputs so equality is structural
            if (ar < 2) g.in1 = 0;
            if (ar < 1) g.in0 = 0;
        }
    }
}

features::BooleanVector BooleanCircuit::eval(const features::BooleanVector& b) const {
    if (b.length() != width_) throw std::invalid_argument("circuit eval: width mismatch");
    std::vector<char> cur(width_, 0);
    for (auto k : b.active()) cur[k] = 1;
    std::vector<char> next(width_, 0);
    for (const auto& layer : layers_) {
        for (std::size_t j = 0; j < width_; ++j) {
            const Gate& g = layer[j];
            next[j] = g.eval(cur[g.in0] != 0, cur[g.in1] != 0) ? 1 : 0;
        }
        cur.swap(next);
    }
    std::vector<std::uint32_t> active;
    for (std::size_t j = 0; j < width_; ++j)
        if (cur[j]) active.push_back(static_cast<std::uint32_t>(j));
    return features::BooleanVector(width_, std::move(active));
}

std::vector<features::BooleanVector> BooleanCircuit::eval_trace(
    const features::BooleanVector& b) const {
    if (b.length() != width_) throw std::invalid_argument("circuit eval: width mismatch");
    std::vector<features::BooleanVector> trace;
    trace.reserve(layers_.size() + 1);
    trace.push_back(b);
    std::vector<char> cur(width_, 0);
    for (auto k : b.active()) cur[k] = 1;
    std::vector<char> next(width_, 0);
    for (const auto& layer : layers_) {
        for (std::size_t j = 0; j < width_; ++j) {
            const Gate& g = layer[j];
            next[j] = g.eval(cur[g.in0] != 0, cur[g.in1] != 0) ? 1 : 0;
        }
        cur.swap(next);
        std::vector<std::uint32_t> active;
        for (std::size_t j = 0; j < width_; ++j)
            if (cur[j]) active.push_back(static_cast<std::uint32_t>(j));
        trace.emplace_back(width_, std::move(active));
    }
    return trace;
}

std::pair<bool, std::vector<std::size_t>> BooleanCircuit::check_sparsity(
    const features::BooleanVector& b, std::size_t s) const {
    auto trace = eval_trace(b);
    std::vector<std::size_t> counts;
    counts.reserve(trace.size());
    bool ok = true;
    for (const auto& layer_vals : trace) {
        counts.push_back(layer_vals.sparsity());
        if (layer_vals.sparsity() > s) ok = false;
    }
    return {ok, counts};
}

std::string BooleanCircuit::print() const {
    std::ostringstream out;
    out << "circuit width=" << width_ << " depth=" << layers_.size() << "\n";
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        out << "layer " << (l + 1) << ":\n";
        for (std::size_t j = 0; j < width_; ++j) {
            const Gate& g = layers_[l][j];
            if (g.op == GateOp::Copy && g.in0 == j) continue; // implicit
            out << "  w" << (j + 1) << " = " << gate_op_name(g.op);
            int ar = gate_arity(g.op);
            out << "(";
            if (ar >= 1) out << "w" << (g.in0 + 1);
            if (ar >= 2) out << ", w" << (g.in1 + 1);
            out << ")\n";
        }
    }
    return out.str();
}

BooleanCircuit generate_uand_circuit(std::size_t m) {
    if (m < 2) throw std::invalid_argument("generate_uand_circuit: m >= 2");
    std::size_t pairs = m * (m - 1) / 2;
    std::size_t width = std::max(m, pairs);
    std::vector<Gate> layer(width);
    std::size_t j = 0;
    for (std::uint32_t k = 0; k + 1 < m; ++k)
        for (std::uint32_t l = k + 1; l < m; ++l) layer[j++] = {GateOp::And, k, l};
    for (; j < width; ++j) layer[j] = {GateOp::Const0, 0, 0};
    return BooleanCircuit(width, {layer});
}

GateOp sample_gate_op(const GateMix& mix, core::RngStream& rng) {
    double u = rng.next_double();
    if ((u -= mix.p_and) < 0) return GateOp::And;
    if ((u -= mix.p_or) < 0) return GateOp::Or;
    if ((u -= mix.p_xor) < 0) return GateOp::Xor;
    if ((u -= mix.p_copy) < 0) return GateOp::Copy;
    if ((u -= mix.p_not) < 0) return GateOp::Not;
    return GateOp::Const0;
}

static std::vector<std::uint32_t> random_permutation(std::size_t m, core::RngStream& rng) {
    std::vector<std::uint32_t> p(m);
    for (std::size_t i = 0; i < m; ++i) p[i] = static_cast<std::uint32_t>(i);
    for (std::size_t i = m; i > 1; --i) std::swap(p[i - 1], p[rng.next_below(i)]);
    return p;
}

BooleanCircuit generate_random_sparse_circuit(std::size_t m, std::size_t depth, std::size_t s,
                                              const GateMix& mix, core::RngStream& rng,
                                              int max_attempts) {
    if (m < 2) throw std::invalid_argument("generate_random_sparse_circuit: m >= 2");
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        // Each layer is wired as a partial matching: every wire drives at most
        // one gate's primary input(s), so without NOT/CONST1 the active count
        // can never grow and sparsity is preserved structurally. AND gates may
        // reuse an arbitrary wire as their second input (the fresh first input
        // still gates the output).
        std::vector<std::vector<Gate>> layers(depth, std::vector<Gate>(m));
        for (auto& layer : layers) {
            auto fresh = random_permutation(m, rng);
            std::size_t next = 0;
            for (std::size_t j = 0; j < m; ++j) {
                GateOp op = sample_gate_op(mix, rng);
                std::size_t need = (op == GateOp::Or || op == GateOp::Xor) ? 2
                                   : (op == GateOp::Const0 || op == GateOp::Const1) ? 0
                                                                                    : 1;
                if (need > m - next) {
                    op = (m - next >= 1) ? GateOp::Copy : GateOp::Const0;
                    need = (m - next >= 1) ? 1 : 0;
                }
                Gate g;
                g.op = op;
                if (op == GateOp::And) {
                    g.in0 = fresh[next++];
                    g.in1 = static_cast<std::uint32_t>(rng.next_below(m));
                } else if (need == 2) {
                    g.in0 = fresh[next++];
                    g.in1 = fresh[next++];
                } else if (need == 1) {
                    g.in0 = fresh[next++];
                }
                layer[j] = g;
            }
        }
        BooleanCircuit c(m, std::move(layers));

        // Probe: the candidate must stay s-sparse on >= 99% of sparse inputs.
        const int probes = 256;
        int bad = 0;
        for (int p = 0; p < probes; ++p) {
            std::vector<std::uint32_t> idx;
            while (idx.size() < s) {
                auto k = static_cast<std::uint32_t>(rng.next_below(m));
                if (std::find(idx.begin(), idx.end(), k) == idx.end()) idx.push_back(k);
            }
            if (!c.check_sparsity(features::BooleanVector(m, idx), s).first) ++bad;
        }
        if (bad * 100 <= probes) return c;
    }
    throw std::runtime_error("generate_random_sparse_circuit: gave up after max_attempts");
}

} // namespace sbmlp::circuits
