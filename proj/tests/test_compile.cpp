#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "sbmlp/compile.hpp"
#include "sbmlp/circuit_parser.hpp"

using namespace sbmlp;
using circuits::BooleanCircuit;
using circuits::Gate;
using circuits::GateOp;
using features::BooleanVector;

namespace {

BooleanVector random_sparse(std::size_t m, std::size_t s, core::RngStream& rng) {
    std::vector<std::uint32_t> idx;
    while (idx.size() < s) {
        auto k = static_cast<std::uint32_t>(rng.next_below(m));
        if (std::find(idx.begin(), idx.end(), k) == idx.end()) idx.push_back(k);
    }
    return BooleanVector(m, idx);
}

} // namespace

TEST_CASE("one-layer compile of an all-AND circuit matches pairwise U-AND behavior") {
    const std::size_t m = 64, s = 3;
    auto c = circuits::parse_circuit(
        "circuit width=64 depth=1\n"
        "layer 1:\n"
        "  w1 = AND(w1, w2)\n"
        "  w2 = AND(w3, w4)\n"
        "  w3 = CONST1()\n");
    core::RngStream dict_rng(91, 0);
    auto dict = features::random_unit_dictionary(m, 1024, dict_rng);
    core::RngStream rng(91, 1);
    auto compiled = circuits::compile_one_layer(c, dict, 2048, s, 0.2, rng);
    CHECK(compiled.blocks.size() == 2);
    CHECK(compiled.readoff_bias[2] == 1.0); // CONST1 reads from the bias feature

    core::RngStream sample_rng(91, 2);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        auto b = random_sparse(m, s, sample_rng);
        auto x = features::encode(dict, b);
        auto out = compiled.outputs(x);
        auto truth = c.eval(b);
        for (std::size_t j = 0; j < 8; ++j)
            worst = std::max(worst, std::abs(out[j] - (truth.get(j) ? 1.0 : 0.0)));
    }
    CHECK(worst < 0.5);
}

TEST_CASE("one-layer eps propagation bound holds per output") {
    const std::size_t m = 48, s = 3;
    auto c = circuits::parse_circuit(
        "circuit width=48 depth=1\n"
        "layer 1:\n"
        "  w1 = OR(w1, w2)\n"
        "  w2 = XOR(w3, w4)\n"
        "  w3 = NOT(w5)\n");
    auto dict = features::identity_dictionary(m); // isolate block error
    core::RngStream rng(92, 1);
    auto compiled = circuits::compile_one_layer(c, dict, 1024, s, 1.0, rng);
    REQUIRE(compiled.uncovered.empty());
    CHECK(compiled.l1_norms[0] == 3); // OR: x + y - xy
    CHECK(compiled.l1_norms[1] == 4); // XOR: x + y - 2xy
    CHECK(compiled.l1_norms[2] == 2); // NOT: 1 - x

    core::RngStream sample_rng(92, 2);
    std::vector<BooleanVector> samples;
    for (int i = 0; i < 40; ++i) samples.push_back(random_sparse(m, s, sample_rng));
    auto beps = compiled.block_eps(samples);
    double max_block_eps = *std::max_element(beps.begin(), beps.end());

    for (const auto& b : samples) {
        auto out = compiled.outputs(b.to_dense());
        auto truth = c.eval(b);
        for (std::size_t j = 0; j < c.width(); ++j) {
            double err = std::abs(out[j] - (truth.get(j) ? 1.0 : 0.0));
            CHECK(err <= static_cast<double>(compiled.l1_norms[j]) * max_block_eps + 1e-9);
        }
    }
}

TEST_CASE("deep compile emits 2L layers and matches the one-layer compiler on depth 1") {
    const std::size_t m = 32, s = 3, d = 1024;
    core::RngStream gen_rng(93, 0);
    circuits::GateMix mix;
    auto c = circuits::generate_random_sparse_circuit(m, 1, s, mix, gen_rng);

    core::RngStream deep_rng(93, 1);
    circuits::DeepCompileOptions opts;
    opts.uand_width_multiplier = 8;
    auto deep = circuits::compile_deep(c, d, s, 0.6, deep_rng, opts);
    CHECK(deep.mlp_depth() == 2);

    core::RngStream dict_rng(93, 2);
    auto dict = features::random_unit_dictionary(m, d, dict_rng);
    core::RngStream one_rng(93, 3);
    auto one = circuits::compile_one_layer(c, dict, 8 * d, s, 0.6, one_rng);

    core::RngStream sample_rng(93, 4);
    int agree = 0, total = 0;
    for (int trial = 0; trial < 60; ++trial) {
        auto b = random_sparse(m, s, sample_rng);
        auto truth = c.eval(b);
        auto deep_out = deep.decode(deep.encode_input(b));
        auto one_vals = one.outputs(features::encode(dict, b));
        bool deep_ok = deep_out == truth;
        bool one_ok = true;
        for (std::size_t j = 0; j < m; ++j)
            if ((one_vals[j] > 0.5) != truth.get(j)) one_ok = false;
        agree += (deep_ok && one_ok);
        ++total;
    }
    CHECK(agree >= total - 2); // both compilers decode the same circuit
}

TEST_CASE("identity circuits pass through the deep pipeline exactly") {
    const std::size_t m = 64, s = 3, d = 1024, L = 3;
    std::vector<std::vector<Gate>> layers(L, std::vector<Gate>(m));
    for (auto& layer : layers)
        for (std::size_t j = 0; j < m; ++j)
            layer[j] = Gate{GateOp::Copy, static_cast<std::uint32_t>(j), 0};
    BooleanCircuit c(m, layers);

    core::RngStream rng(94, 0);
    auto deep = circuits::compile_deep(c, d, s, 0.5, rng);
    CHECK(deep.mlp_depth() == 2 * L);

    core::RngStream sample_rng(94, 1);
    for (int trial = 0; trial < 80; ++trial) {
        auto b = random_sparse(m, 1 + sample_rng.next_below(s), sample_rng);
        CHECK(deep.decode(deep.encode_input(b)) == b);
    }
}

TEST_CASE("factored deep evaluation matches the dense MLP materialization") {
    const std::size_t m = 16, s = 3, d = 256;
    core::RngStream gen_rng(95, 0);
    circuits::GateMix mix;
    mix.p_xor = 0.15;
    mix.p_copy = 0.25;
    auto c = circuits::generate_random_sparse_circuit(m, 2, s, mix, gen_rng);
    core::RngStream rng(95, 1);
    circuits::DeepCompileOptions opts;
    opts.uand_width_multiplier = 8;
    auto deep = circuits::compile_deep(c, d, s, 0.8, rng, opts);
    auto mlp = deep.to_mlp();
    CHECK(mlp.net.depth() == deep.mlp_depth());

    core::RngStream sample_rng(95, 2);
    for (int trial = 0; trial < 20; ++trial) {
        auto b = random_sparse(m, s, sample_rng);
        auto x = deep.encode_input(b);
        auto fast = deep.read_outputs(x);
        auto dense = mlp.read(x);
        REQUIRE(fast.size() == dense.size());
        for (std::size_t k = 0; k < fast.size(); ++k)
            CHECK(fast[k] == doctest::Approx(dense[k]).epsilon(1e-9));
    }
}

TEST_CASE("deep compile records precondition measurements") {
    const std::size_t m = 24, s = 3;
    core::RngStream gen_rng(96, 0);
    circuits::GateMix mix;
    auto c = circuits::generate_random_sparse_circuit(m, 2, s, mix, gen_rng);
    core::RngStream rng(96, 1);
    // Deliberately starve the construction: tiny d makes read-offs noisy and
    // the recorded threshold tight.
    auto deep = circuits::compile_deep(c, 128, s, 0.5, rng);
    for (const auto& layer : deep.layers()) {
        CHECK(layer.measured_eps_in > 0.0);
        CHECK(layer.ec.params().input_threshold > 0.0);
    }
}

TEST_CASE("compiled circuit serialization round trip") {
    const std::size_t m = 16, s = 3, d = 256;
    core::RngStream gen_rng(97, 0);
    circuits::GateMix mix;
    auto c = circuits::generate_random_sparse_circuit(m, 2, s, mix, gen_rng);
    core::RngStream rng(97, 1);
    circuits::DeepCompileOptions opts;
    opts.uand_width_multiplier = 8;
    auto deep = circuits::compile_deep(c, d, s, 1.0, rng, opts);

    auto dir = (std::filesystem::temp_directory_path() / "sbmlp_compiled_io").string();
    circuits::save_compiled(dir, deep);
    auto loaded = circuits::load_compiled(dir);
    CHECK(loaded.circuit() == c);
    CHECK(loaded.mlp_depth() == deep.mlp_depth());

    core::RngStream srng(97, 2);
    for (int trial = 0; trial < 25; ++trial) {
        auto b = random_sparse(m, s, srng);
        auto x = deep.encode_input(b);
        auto a = deep.read_outputs(x);
        auto b2 = loaded.read_outputs(x);
        REQUIRE(a.size() == b2.size());
        for (std::size_t k = 0; k < a.size(); ++k)
            CHECK(a[k] == doctest::Approx(b2[k]).epsilon(1e-12));
    }
}

TEST_CASE("deep-compiled networks expand to pure ReLU") {
    const std::size_t m = 12, s = 3, d = 192;
    core::RngStream gen_rng(98, 0);
    circuits::GateMix mix;
    auto c = circuits::generate_random_sparse_circuit(m, 2, s, mix, gen_rng);
    core::RngStream rng(98, 1);
    circuits::DeepCompileOptions opts;
    opts.uand_width_multiplier = 8;
    auto deep = circuits::compile_deep(c, d, s, 1.2, rng, opts);
    auto mlp = deep.to_mlp();

    core::DenseMatrix folded = mlp.final_readoff;
    auto pure = core::expand_staircase_layers(mlp.net, &folded);
    CHECK(pure.depth() == deep.mlp_depth());
    for (const auto& layer : pure.layers())
        CHECK(layer.act.kind == core::ActivationKind::Relu);

    core::RngStream srng(98, 2);
    for (int trial = 0; trial < 15; ++trial) {
        auto b = random_sparse(m, s, srng);
        auto x = deep.encode_input(b);
        auto direct = mlp.read(x);
        auto via_pure = core::matvec(folded, pure.eval(x));
        for (std::size_t k = 0; k < direct.size(); ++k)
            CHECK(direct[k] == doctest::Approx(via_pure[k]).epsilon(1e-9));
    }
}
