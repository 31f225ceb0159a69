#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sbmlp/and_polynomial.hpp"
#include "sbmlp/circuit.hpp"
#include "sbmlp/dictionary.hpp"
#include "sbmlp/error_correction.hpp"
#include "sbmlp/uand.hpp"

namespace sbmlp::circuits {

// ---------------------------------------------------------------------------
// One-layer compilation: concatenated high-fan-in U-AND blocks, one per term
// size n, with per-output read-off rows assembled from the AndPolynomials.
// ---------------------------------------------------------------------------

struct OneLayerCompiled {
    features::FeatureDictionary dict; // input encoding
    std::vector<uand::UandNetwork> blocks; // blocks[i] has fan-in i+1
    std::vector<AndPolynomial> polynomials; // one per output wire
    core::DenseMatrix readoff;        // outputs x hidden_width
    std::vector<double> readoff_bias; // constant polynomial terms
    std::vector<long long> l1_norms;
    std::vector<uand::Tuple> uncovered; // terms with empty index sets
    std::size_t hidden_width = 0;

    // Hidden activations for a superposed input x = Phi b.
    std::vector<double> hidden(const std::vector<double>& x) const;
    std::vector<double> outputs(const std::vector<double>& x) const;
    // Max |tuple read-off - AND| per block over basis-aligned samples, for the
    // eps-propagation bound (uses only tuples the read-off actually needs).
    std::vector<double> block_eps(const std::vector<features::BooleanVector>& samples) const;
};

OneLayerCompiled compile_one_layer(const BooleanCircuit& c, features::FeatureDictionary dict,
                                   std::size_t d_per_fanin, std::size_t s, double polylog_c,
                                   core::RngStream& rng);

// ---------------------------------------------------------------------------
// Deep compilation: alternating pairwise U-AND compute layers and error
// correction layers; a depth-L circuit becomes a 2L-layer MLP.
// ---------------------------------------------------------------------------

struct DeepCompileOptions {
    std::size_t uand_width_multiplier = 8; // d_u = multiplier * d
    double ec_threshold_k = 1.0;
    std::size_t probe_inputs = 128; // compile-time precondition measurement
    std::size_t probe_sparsity = 3;
};

struct DeepGateTerms {
    double constant = 0.0;
    std::vector<std::pair<double, std::uint32_t>> singles;
    std::vector<std::pair<double, uand::Tuple>> pairs;
};

struct DeepLayer {
    uand::UandNetwork uand;
    std::vector<std::vector<std::uint32_t>> uand_rows; // sparse rows of win
    std::vector<DeepGateTerms> gates;
    ecc::ErrorCorrectionLayer ec;
    std::vector<uand::Tuple> uncovered;
    double measured_eps_in = 0.0;
    bool precondition_violated = false;
};

class DeepCompiled {
public:
    const features::FeatureDictionary& input_dict() const { return dict_; }
    const BooleanCircuit& circuit() const { return circuit_; }
    const std::vector<DeepLayer>& layers() const { return layers_; }
    std::size_t mlp_depth() const { return 2 * layers_.size(); }
    const std::vector<std::string>& warnings() const { return warnings_; }

    std::vector<double> encode_input(const features::BooleanVector& b) const {
        return features::encode(dict_, b);
    }
    // Final feature read-offs from a superposed input.
    std::vector<double> read_outputs(const std::vector<double>& x) const;
    features::BooleanVector decode(const std::vector<double>& x) const;
    // Batched pipeline over boolean inputs (encode + shared GEMM front).
    std::vector<features::BooleanVector> decode_batch(
        const std::vector<features::BooleanVector>& inputs) const;

    // Dense 2L-layer MLP materialization (small instances / cross-checks).
    struct MlpForm {
        core::MlpNetwork net;
        core::DenseMatrix final_readoff;
        std::vector<double> read(const std::vector<double>& x) const;
    };
    MlpForm to_mlp() const;

    friend DeepCompiled compile_deep(const BooleanCircuit& c, std::size_t d, std::size_t s,
                                     double polylog_c, core::RngStream& rng,
                                     const DeepCompileOptions& opts);
    friend DeepCompiled load_compiled(const std::string& dir);

private:
    features::FeatureDictionary dict_;
    BooleanCircuit circuit_;
    std::vector<DeepLayer> layers_;
    std::vector<std::string> warnings_;

    // One pipeline step: current feature estimates -> next (raw round units).
    std::vector<double> step(const DeepLayer& layer, const std::vector<double>& feats) const;
};

DeepCompiled compile_deep(const BooleanCircuit& c, std::size_t d, std::size_t s, double polylog_c,
                          core::RngStream& rng, const DeepCompileOptions& opts = {});

// Directory of SBMAT files plus a JSON manifest (circuit text, parameters,
// per-layer gate terms, warnings).
void save_compiled(const std::string& dir, const DeepCompiled& compiled);
DeepCompiled load_compiled(const std::string& dir);

} // namespace sbmlp::circuits
