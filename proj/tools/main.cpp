// Command-line front end: builds the constructions, compiles circuit DSL
// files to superposed MLPs, verifies read-offs against the exact evaluator,
// and runs sweeps / scaling fits / plots.
//
// Exit codes: 0 success, 1 usage error, 2 verification-threshold failure,
// 3 internal error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sbmlp/circuit_parser.hpp"
#include "sbmlp/compile.hpp"
#include "sbmlp/error_correction.hpp"
#include "sbmlp/norm_balancer.hpp"
#include "sbmlp/samplers.hpp"
#include "sbmlp/sbmat.hpp"
#include "sbmlp/scaling_fit.hpp"
#include "sbmlp/svg_plot.hpp"
#include "sbmlp/sweep.hpp"
#include "sbmlp/uand.hpp"

using namespace sbmlp;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    f << text;
}

struct GlobalOpts {
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    std::string out_dir = ".";
    std::string config;
};

int cmd_gen_circuit(const GlobalOpts& g, const std::string& kind, std::size_t m, std::size_t depth,
                    std::size_t s, const std::string& out) {
    circuits::BooleanCircuit c;
    if (kind == "uand") {
        c = circuits::generate_uand_circuit(m);
    } else if (kind == "random") {
        core::RngStream rng(g.seed, 1);
        c = circuits::generate_random_sparse_circuit(m, depth, s, circuits::GateMix{}, rng);
    } else {
        std::cerr << "unknown circuit kind '" << kind << "'\n";
        return 1;
    }
    if (out.empty()) {
        std::cout << c.print();
    } else {
        write_file(out, c.print());
        std::cout << "wrote " << out << "\n";
    }
    return 0;
}

int cmd_build_uand(const GlobalOpts& g, const std::string& variant, std::size_t m, std::size_t d,
                   std::size_t s, std::size_t n, double c_mult) {
    core::RngStream rng(g.seed, 2);
    std::filesystem::create_directories(g.out_dir);
    if (variant == "basis") {
        auto net = uand::build_uand_basis(m, d, s, c_mult, rng);
        uand::save_uand(g.out_dir, net);
    } else if (variant == "highfanin") {
        auto net = uand::build_uand_highfanin(m, d, s, static_cast<std::uint32_t>(n), c_mult, rng);
        uand::save_uand(g.out_dir, net);
    } else if (variant == "superposed") {
        core::RngStream dict_rng(g.seed, 3);
        auto dict = features::random_unit_dictionary(m, d, dict_rng);
        auto sup = uand::build_uand_superposed(dict, d, s, c_mult, rng);
        uand::save_uand(g.out_dir, sup.basis);
        core::write_sbmat(g.out_dir + "/dict.sbmat", dict.phi());
        nlohmann::json side;
        side["m"] = m;
        side["d"] = dict.d();
        side["seed"] = g.seed;
        side["kind"] = dict.kind_name();
        side["coherence"] = dict.coherence();
        write_file(g.out_dir + "/dict.json", side.dump(2) + "\n");
    } else {
        std::cerr << "unknown uand variant '" << variant << "'\n";
        return 1;
    }
    std::cout << "wrote " << g.out_dir << "\n";
    return 0;
}

int cmd_build_ec(const GlobalOpts& g, std::size_t m, std::size_t d, std::size_t s, double k) {
    core::RngStream dict_rng(g.seed, 4);
    auto dict = features::random_unit_dictionary(m, d, dict_rng);
    core::RngStream rng(g.seed, 5);
    auto ec = ecc::build_error_correction(m, d, s,
                                          features::ReadoffMatrix{dict.phi_t(), std::nullopt},
                                          rng, k);
    std::filesystem::create_directories(g.out_dir);
    core::write_sbmat(g.out_dir + "/phi_unnormalized.sbmat", ec.phi_unnormalized());
    core::write_sbmat(g.out_dir + "/r_in.sbmat", ec.r_in().r);
    core::write_sbmat(g.out_dir + "/input_dict.sbmat", dict.phi());
    nlohmann::json j;
    j["m"] = m;
    j["d"] = d;
    j["s"] = s;
    j["p"] = ec.params().p;
    j["normalization_scalar"] = ec.params().scalar;
    j["threshold_k"] = ec.params().threshold_k;
    j["input_threshold"] = ec.params().input_threshold;
    j["seed"] = g.seed;
    j["empty_features"] = ec.empty_features();
    write_file(g.out_dir + "/manifest.json", j.dump(2) + "\n");
    std::cout << "wrote " << g.out_dir << "\n";
    return 0;
}

int cmd_build_balancer(const GlobalOpts& g, std::size_t d, double s0, std::size_t segments) {
    core::RngStream rng(g.seed, 6);
    if (segments == 0) segments = d;
    auto nb = ecc::build_norm_balancer(d, s0, segments, rng);
    std::filesystem::create_directories(g.out_dir);
    core::DenseMatrix v(1, d);
    for (std::size_t i = 0; i < d; ++i) v.at(0, i) = nb.direction()[i];
    core::write_sbmat(g.out_dir + "/v.sbmat", v);
    core::write_sbmat(g.out_dir + "/w.sbmat", nb.w());
    nlohmann::json j;
    j["d"] = d;
    j["s0"] = s0;
    j["segments"] = segments;
    j["c"] = ecc::NormBalancer::relu_mean_constant();
    j["seed"] = g.seed;
    write_file(g.out_dir + "/manifest.json", j.dump(2) + "\n");
    std::cout << "wrote " << g.out_dir << "\n";
    return 0;
}

int cmd_compile(const GlobalOpts& g, const std::string& mode, const std::string& circuit_path,
                std::size_t d, std::size_t s, double c_mult, std::size_t width_mult,
                std::size_t d_per_fanin) {
    auto circuit = circuits::parse_circuit(read_file(circuit_path));
    if (mode == "deep") {
        core::RngStream rng(g.seed, 7);
        circuits::DeepCompileOptions opts;
        opts.uand_width_multiplier = width_mult;
        auto compiled = circuits::compile_deep(circuit, d, s, c_mult, rng, opts);
        circuits::save_compiled(g.out_dir, compiled);
        for (const auto& w : compiled.warnings()) std::cerr << "warning: " << w << "\n";
        std::cout << "wrote " << g.out_dir << " (" << compiled.mlp_depth() << " MLP layers)\n";
        return 0;
    }
    if (mode == "one-layer") {
        core::RngStream dict_rng(g.seed, 8);
        auto dict = features::random_unit_dictionary(circuit.width(), d, dict_rng);
        core::RngStream rng(g.seed, 9);
        auto compiled = circuits::compile_one_layer(circuit, dict,
                                                    d_per_fanin ? d_per_fanin : d, s, c_mult, rng);
        std::filesystem::create_directories(g.out_dir);
        core::write_sbmat(g.out_dir + "/dict.sbmat", compiled.dict.phi());
        core::write_sbmat(g.out_dir + "/readoff.sbmat", compiled.readoff);
        for (std::size_t b = 0; b < compiled.blocks.size(); ++b)
            core::write_sbmat(g.out_dir + "/block" + std::to_string(b) + ".sbmat",
                              compiled.blocks[b].win());
        nlohmann::json j;
        j["kind"] = "one-layer";
        j["circuit"] = circuit.print();
        j["blocks"] = compiled.blocks.size();
        j["hidden_width"] = compiled.hidden_width;
        j["uncovered_terms"] = compiled.uncovered.size();
        j["l1_norms"] = compiled.l1_norms;
        write_file(g.out_dir + "/manifest.json", j.dump(2) + "\n");
        std::cout << "wrote " << g.out_dir << "\n";
        return 0;
    }
    std::cerr << "unknown compile mode '" << mode << "'\n";
    return 1;
}

int cmd_verify(const GlobalOpts& g, const std::string& network_dir, const std::string& compiled_dir,
               std::size_t pairs, std::size_t samples, std::size_t s, double max_eps) {
    if (!compiled_dir.empty()) {
        auto compiled = circuits::load_compiled(compiled_dir);
        core::RngStream rng(g.seed, 10);
        std::size_t mism = 0;
        std::vector<features::BooleanVector> inputs;
        for (std::size_t i = 0; i < samples; ++i)
            inputs.push_back(harness::random_support(compiled.circuit().width(), s, rng));
        auto decoded = compiled.decode_batch(inputs);
        for (std::size_t i = 0; i < samples; ++i)
            if (!(decoded[i] == compiled.circuit().eval(inputs[i]))) ++mism;
        double rate = static_cast<double>(mism) / static_cast<double>(samples);
        nlohmann::json j;
        j["samples"] = samples;
        j["mismatches"] = mism;
        j["mismatch_rate"] = rate;
        std::cout << j.dump(2) << "\n";
        return rate > max_eps ? 2 : 0;
    }
    auto net = uand::load_uand(network_dir);
    core::RngStream pair_rng(g.seed, 11);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pair_list;
    for (std::size_t i = 0; i < pairs; ++i) {
        auto k1 = static_cast<std::uint32_t>(pair_rng.next_below(net.m()));
        auto k2 = static_cast<std::uint32_t>((k1 + 1 + pair_rng.next_below(net.m() - 1)) % net.m());
        pair_list.push_back({std::min(k1, k2), std::max(k1, k2)});
    }
    core::RngStream ver_rng(g.seed, 12);
    auto stats = uand::verify_uand_targeted(net, pair_list, s, samples, ver_rng);
    nlohmann::json j;
    j["global_eps"] = stats.eps_on.global_eps;
    j["mean_error"] = stats.eps_on.mean_error;
    j["p50"] = stats.eps_on.p50;
    j["p90"] = stats.eps_on.p90;
    j["p99"] = stats.eps_on.p99;
    j["case11_mean_error"] = stats.mean_err_on;
    j["case10_mean_error"] = stats.mean_err_half;
    j["case00_mean_error"] = stats.mean_err_off;
    j["lower_bound_violations"] = stats.lower_bound_violations;
    j["empty_pairs"] = stats.empty_pairs;
    j["samples_per_pair"] = samples;
    j["pairs"] = pair_list.size();
    std::cout << j.dump(2) << "\n";
    return stats.eps_on.global_eps > max_eps ? 2 : 0;
}

int cmd_sweep(const GlobalOpts& g, bool seed_set, bool threads_set) {
    harness::SweepConfig cfg;
    if (!g.config.empty()) cfg = harness::SweepConfig::from_json(read_file(g.config));
    if (seed_set) cfg.master_seed = g.seed;
    if (threads_set) cfg.threads = g.threads;
    auto result = harness::run_sweep(cfg);
    harness::write_sweep(result, g.out_dir);
    std::cout << "wrote " << g.out_dir << "/results.csv (" << result.rows.size() << " rows)\n";
    return 0;
}

int cmd_fit(const std::string& csv, const std::string& x, const std::string& y) {
    auto table = harness::CsvTable::read(csv);
    auto fit = harness::fit_scaling_csv(table, x, y);
    nlohmann::json j;
    j["x"] = x;
    j["y"] = y;
    j["exponent"] = fit.exponent;
    j["intercept"] = fit.intercept;
    j["residual"] = fit.residual;
    j["points"] = fit.points;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_plot(const std::string& csv, const std::string& x, const std::string& y,
             const std::string& out) {
    auto table = harness::CsvTable::read(csv);
    harness::PlotSpec spec;
    spec.x_column = x;
    spec.y_column = y;
    harness::emit_plot(table, spec, out);
    std::cout << "wrote " << out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse boolean circuits as superposed MLPs"};
    app.require_subcommand(1);

    GlobalOpts g;
    auto* seed_opt = app.add_option("--seed", g.seed, "master seed");
    auto* threads_opt = app.add_option("--threads", g.threads, "worker threads");
    app.add_option("--out-dir", g.out_dir, "output directory");
    app.add_option("--config", g.config, "JSON config file");

    std::string kind = "random", variant = "basis", mode = "deep", circuit_path, network_dir,
                compiled_dir, csv, xcol = "d", ycol = "eps_mean", out;
    std::size_t m = 256, d = 1024, s = 3, n = 3, depth = 3, pairs = 100, samples = 500,
                width_mult = 8, d_per_fanin = 0, segments = 0;
    double c_mult = 1.0, threshold_k = 1.0, s0 = 64.0, max_eps = 1e9;

    auto* gen = app.add_subcommand("gen-circuit", "emit a circuit DSL file");
    gen->add_option("--kind", kind, "uand|random");
    gen->add_option("--m", m);
    gen->add_option("--depth", depth);
    gen->add_option("--s", s);
    gen->add_option("--out", out);

    auto* bu = app.add_subcommand("build-uand", "build a U-AND network");
    bu->add_option("--variant", variant, "basis|superposed|highfanin");
    bu->add_option("--m", m);
    bu->add_option("--d", d);
    bu->add_option("--s", s);
    bu->add_option("--n", n);
    bu->add_option("--C", c_mult);

    auto* be = app.add_subcommand("build-ec", "build an error-correction layer");
    be->add_option("--m", m);
    be->add_option("--d", d);
    be->add_option("--s", s);
    be->add_option("--threshold-k", threshold_k);

    auto* bb = app.add_subcommand("build-balancer", "build a norm balancer");
    bb->add_option("--d", d);
    bb->add_option("--s0", s0);
    bb->add_option("--segments", segments);

    auto* co = app.add_subcommand("compile", "compile a circuit DSL file");
    co->add_option("--mode", mode, "one-layer|deep");
    co->add_option("--circuit", circuit_path)->required();
    co->add_option("--d", d);
    co->add_option("--s", s);
    co->add_option("--C", c_mult);
    co->add_option("--width-mult", width_mult);
    co->add_option("--d-per-fanin", d_per_fanin);

    auto* ve = app.add_subcommand("verify", "verify a network or compiled circuit");
    ve->add_option("--network-dir", network_dir);
    ve->add_option("--compiled-dir", compiled_dir);
    ve->add_option("--pairs", pairs);
    ve->add_option("--samples", samples);
    ve->add_option("--s", s);
    ve->add_option("--max-eps", max_eps, "exit 2 when exceeded");

    auto* sw = app.add_subcommand("sweep", "run a sweep from --config");

    auto* fi = app.add_subcommand("fit", "log-log scaling fit over a results csv");
    fi->add_option("--csv", csv)->required();
    fi->add_option("--x", xcol);
    fi->add_option("--y", ycol);

    auto* pl = app.add_subcommand("plot", "log-log SVG scatter from a results csv");
    pl->add_option("--csv", csv)->required();
    pl->add_option("--x", xcol);
    pl->add_option("--y", ycol);
    pl->add_option("--out", out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (gen->parsed()) return cmd_gen_circuit(g, kind, m, depth, s, out);
        if (bu->parsed()) return cmd_build_uand(g, variant, m, d, s, n, c_mult);
        if (be->parsed()) return cmd_build_ec(g, m, d, s, threshold_k);
        if (bb->parsed()) return cmd_build_balancer(g, d, s0, segments);
        if (co->parsed())
            return cmd_compile(g, mode, circuit_path, d, s, c_mult, width_mult, d_per_fanin);
        if (ve->parsed()) return cmd_verify(g, network_dir, compiled_dir, pairs, samples, s, max_eps);
        if (sw->parsed()) return cmd_sweep(g, seed_opt->count() > 0, threads_opt->count() > 0);
        if (fi->parsed()) return cmd_fit(csv, xcol, ycol);
        if (pl->parsed()) return cmd_plot(csv, xcol, ycol, out);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
