#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "sbmlp/boolean_vector.hpp"
#include "sbmlp/rng.hpp"

namespace sbmlp::circuits {

enum class GateOp : std::uint8_t { And, Or, Xor, Not, Copy, Const0, Const1 };

const char* gate_op_name(GateOp op);
int gate_arity(GateOp op);

struct Gate {
    GateOp op = GateOp::Copy;
    std::uint32_t in0 = 0; // previous-layer wire indices (0-based)
    std::uint32_t in1 = 0;

    bool eval(bool a, bool b) const;
    bool operator==(const Gate&) const = default;
};

// Strictly layered circuit of constant width m: layer l maps the m wires of
// layer l-1 to m new wires; every gate reads the previous layer only.
class BooleanCircuit {
public:
    BooleanCircuit() = default;
    BooleanCircuit(std::size_t width, std::vector<std::vector<Gate>> layers);

    std::size_t width() const { return width_; }
    std::size_t depth() const { return layers_.size(); }
    const std::vector<std::vector<Gate>>& layers() const { return layers_; }
    const Gate& gate(std::size_t layer, std::size_t wire) const { return layers_[layer][wire]; }

    // Exact layered evaluation; the ground truth for every acceptance test.
    features::BooleanVector eval(const features::BooleanVector& b) const;
    // Values of every layer including the input (depth+1 entries).
    std::vector<features::BooleanVector> eval_trace(const features::BooleanVector& b) const;

    // True iff input and all intermediate layers have at most s active wires;
    // also reports the per-layer activation counts.
    std::pair<bool, std::vector<std::size_t>> check_sparsity(const features::BooleanVector& b,
                                                             std::size_t s) const;

    std::string print() const; // DSL text; parse(print(c)) == c

    bool operator==(const BooleanCircuit&) const = default;

private:
    std::size_t width_ = 0;
    std::vector<std::vector<Gate>> layers_;
};

// The pairwise universal-AND circuit as a width-C(m,2) single layer: output
// (k,l) is AND(w_k, w_l). Width grows to C(m,2); inputs are padded with COPY.
BooleanCircuit generate_uand_circuit(std::size_t m);

struct GateMix {
    double p_and = 0.30;
    double p_or = 0.15;
    double p_xor = 0.05;
    double p_copy = 0.35;
    double p_not = 0.0;
    double p_const0 = 0.15;
};

GateOp sample_gate_op(const GateMix& mix, core::RngStream& rng);

// Rejection-sampled random layered circuit that stays s-sparse on at least
// 99% of probe inputs drawn at sparsity s. Gate inputs are wired through two
// random permutations (each wire is read once as a first and once as a second
// input), which keeps the expected per-layer activation growth subcritical so
// rejection terminates. Throws after `max_attempts`.
BooleanCircuit generate_random_sparse_circuit(std::size_t m, std::size_t depth, std::size_t s,
                                              const GateMix& mix, core::RngStream& rng,
                                              int max_attempts = 64);

} // namespace sbmlp::circuits
