#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "sbmlp/activations.hpp"
#include "sbmlp/circuit_parser.hpp"
#include "sbmlp/compile.hpp"
#include "sbmlp/kernels.hpp"
#include "sbmlp/sbmat.hpp"

namespace sbmlp::circuits {

static std::vector<double> layer_gate_values(const DeepLayer& layer,
                                             const std::vector<double>& feats) {
    // Pairwise U-AND hidden activations: ReLU(W feats - 1), sparse rows.
    const std::size_t d_u = layer.uand.d();
    std::vector<double> h(d_u);
    for (std::size_t i = 0; i < d_u; ++i) {
        double pre = -1.0;
        for (auto k : layer.uand_rows[i]) pre += feats[k];
        h[i] = pre > 0.0 ? pre : 0.0;
    }
    const std::size_t m = layer.gates.size();
    std::vector<double> g(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        const DeepGateTerms& gt = layer.gates[j];
        double v = gt.constant;
        for (auto [cf, k] : gt.singles) v += cf * feats[k];
        for (const auto& [cf, tuple] : gt.pairs) {
            const auto& gamma = layer.uand.gamma(tuple);
            if (gamma.empty()) continue; // uncovered term, recorded at compile
            double s = 0.0;
            for (auto i : gamma) s += h[i];
            v += cf * (s / static_cast<double>(gamma.size()));
        }
        g[j] = v;
    }
    return g;
}

// Error correction over gate read-offs, in raw round units: round the ternary
// re-encode, then average each feature's realized signed set.
static std::vector<double> layer_correct(const DeepLayer& layer, const std::vector<double>& g) {
    const auto& gamma = layer.ec.gamma();
    const std::size_t m = g.size();
    std::vector<double> pre(layer.ec.d_out(), 0.0);
    for (std::size_t k = 0; k < m; ++k)
        for (auto [i, sgn] : gamma[k]) pre[i] += sgn * g[k];
    for (double& v : pre) v = core::staircase_round(v, 2);
    std::vector<double> next(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        if (gamma[k].empty()) continue;
        double v = 0.0;
        for (auto [i, sgn] : gamma[k]) v += sgn * pre[i];
        next[k] = v / static_cast<double>(gamma[k].size());
    }
    return next;
}

std::vector<double> DeepCompiled::step(const DeepLayer& layer,
                                       const std::vector<double>& feats) const {
    return layer_correct(layer, layer_gate_values(layer, feats));
}

std::vector<double> DeepCompiled::read_outputs(const std::vector<double>& x) const {
    std::vector<double> feats = core::matvec_t(dict_.phi(), x);
    for (const auto& layer : layers_) feats = step(layer, feats);
    return feats;
}

features::BooleanVector DeepCompiled::decode(const std::vector<double>& x) const {
    std::vector<double> feats = read_outputs(x);
    std::vector<std::uint32_t> active;
    for (std::size_t k = 0; k < feats.size(); ++k)
        if (feats[k] > 0.5) active.push_back(static_cast<std::uint32_t>(k));
    return features::BooleanVector(feats.size(), std::move(active));
}

// Batched pipeline step: feats is m x B row-major (rows are features), so all
// inner loops are contiguous axpys over the batch dimension.
static core::DenseMatrix step_block(const DeepLayer& layer, const core::DenseMatrix& feats) {
    const std::size_t batch = feats.cols();
    const std::size_t m = layer.gates.size();
    const std::size_t d_u = layer.uand.d();

    core::DenseMatrix h(d_u, batch, -1.0);
    for (std::size_t i = 0; i < d_u; ++i) {
        double* row = h.row(i);
        for (auto k : layer.uand_rows[i]) kernels::axpy(1.0, feats.row(k), row, batch);
        kernels::relu(row, row, batch);
    }

    core::DenseMatrix g(m, batch, 0.0);
    std::vector<double> acc(batch);
    for (std::size_t j = 0; j < m; ++j) {
        const DeepGateTerms& gt = layer.gates[j];
        double* grow = g.row(j);
        if (gt.constant != 0.0)
            for (std::size_t b = 0; b < batch; ++b) grow[b] = gt.constant;
        for (auto [cf, k] : gt.singles) kernels::axpy(cf, feats.row(k), grow, batch);
        for (const auto& [cf, tuple] : gt.pairs) {
            const auto& gamma = layer.uand.gamma(tuple);
            if (gamma.empty()) continue;
            std::fill(acc.begin(), acc.end(), 0.0);
            for (auto i : gamma) kernels::axpy(1.0, h.row(i), acc.data(), batch);
            kernels::axpy(cf / static_cast<double>(gamma.size()), acc.data(), grow, batch);
        }
    }

    const auto& gamma = layer.ec.gamma();
    core::DenseMatrix pre(layer.ec.d_out(), batch, 0.0);
    for (std::size_t k = 0; k < m; ++k)
        for (auto [i, sgn] : gamma[k]) kernels::axpy(sgn, g.row(k), pre.row(i), batch);
    for (std::size_t i = 0; i < pre.rows(); ++i) {
        double* row = pre.row(i);
        for (std::size_t b = 0; b < batch; ++b) row[b] = core::staircase_round(row[b], 2);
    }
    core::DenseMatrix next(m, batch, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        if (gamma[k].empty()) continue;
        double* row = next.row(k);
        for (auto [i, sgn] : gamma[k]) kernels::axpy(sgn, pre.row(i), row, batch);
        kernels::scale(1.0 / static_cast<double>(gamma[k].size()), row, batch);
    }
    return next;
}

std::vector<features::BooleanVector> DeepCompiled::decode_batch(
    const std::vector<features::BooleanVector>& inputs) const {
    const std::size_t d = dict_.d();
    const std::size_t m = circuit_.width();
    constexpr std::size_t kBlock = 64;

    std::vector<features::BooleanVector> out;
    out.reserve(inputs.size());
    for (std::size_t start = 0; start < inputs.size(); start += kBlock) {
        const std::size_t batch = std::min(kBlock, inputs.size() - start);
        core::DenseMatrix x_cols(d, batch, 0.0);
        for (std::size_t j = 0; j < batch; ++j)
            for (auto k : inputs[start + j].active()) {
                const double* col = dict_.column(k);
                for (std::size_t i = 0; i < d; ++i) x_cols.at(i, j) += col[i];
            }
        core::DenseMatrix feats(m, batch);
        kernels::gemm(dict_.phi_t().data(), x_cols.data(), feats.data(), m, d, batch);
        for (const auto& layer : layers_) feats = step_block(layer, feats);
        for (std::size_t j = 0; j < batch; ++j) {
            std::vector<std::uint32_t> active;
            for (std::size_t k = 0; k < m; ++k)
                if (feats.at(k, j) > 0.5) active.push_back(static_cast<std::uint32_t>(k));
            out.emplace_back(m, std::move(active));
        }
    }
    return out;
}

DeepCompiled::MlpForm DeepCompiled::to_mlp() const {
    MlpForm form;
    const std::size_t m = circuit_.width();
    // Current read-off matrix R (m x d_cur) mapping activations to features.
    core::DenseMatrix r_cur = dict_.phi_t();
    double r_scale = 1.0; // feats = r_scale * (R_cur a)
    for (const auto& layer : layers_) {
        const std::size_t d_prev = r_cur.cols();
        const std::size_t d_u = layer.uand.d();
        // Compute layer: [ReLU(W (scale R a) - 1); ReLU(a); ReLU(-a)].
        core::DenseMatrix wr = core::matmul(layer.uand.win(), r_cur);
        if (r_scale != 1.0) kernels::scale(r_scale, wr.data(), wr.size());
        core::DenseMatrix w1(d_u + 2 * d_prev, d_prev, 0.0);
        for (std::size_t i = 0; i < d_u; ++i)
            for (std::size_t j = 0; j < d_prev; ++j) w1.at(i, j) = wr.at(i, j);
        for (std::size_t i = 0; i < d_prev; ++i) {
            w1.at(d_u + i, i) = 1.0;
            w1.at(d_u + d_prev + i, i) = -1.0;
        }
        std::vector<double> b1(d_u + 2 * d_prev, 0.0);
        for (std::size_t i = 0; i < d_u; ++i) b1[i] = -1.0;
        form.net.add_layer({std::move(w1), std::move(b1), core::ActivationKind::relu()});

        // Gate matrix over [h; a+; a-], then the EC affine map on top.
        core::DenseMatrix gmat(m, d_u + 2 * d_prev, 0.0);
        std::vector<double> gbias(m, 0.0);
        for (std::size_t j = 0; j < m; ++j) {
            const DeepGateTerms& gt = layer.gates[j];
            gbias[j] = gt.constant;
            for (auto [cf, k] : gt.singles) {
                for (std::size_t i = 0; i < d_prev; ++i) {
                    double w = cf * r_scale * r_cur.at(k, i);
                    gmat.at(j, d_u + i) += w;
                    gmat.at(j, d_u + d_prev + i) -= w;
                }
            }
            for (const auto& [cf, tuple] : gt.pairs) {
                const auto& gamma = layer.uand.gamma(tuple);
                if (gamma.empty()) continue;
                double w = cf / static_cast<double>(gamma.size());
                for (auto i : gamma) gmat.at(j, i) += w;
            }
        }
        core::DenseMatrix w2 = core::matmul(layer.ec.phi_unnormalized(), gmat);
        std::vector<double> b2 = core::matvec(layer.ec.phi_unnormalized(), gbias);
        form.net.add_layer({std::move(w2), std::move(b2), core::ActivationKind::staircase(2)});

        r_cur = layer.ec.readoff().r; // 1/(A |Gamma|) rows over raw round units
        r_scale = layer.ec.params().scalar;
    }
    form.final_readoff = r_cur;
    if (r_scale != 1.0)
        kernels::scale(r_scale, form.final_readoff.data(), form.final_readoff.size());
    return form;
}

std::vector<double> DeepCompiled::MlpForm::read(const std::vector<double>& x) const {
    std::vector<double> act = net.eval(x);
    return core::matvec(final_readoff, act);
}

DeepCompiled compile_deep(const BooleanCircuit& c, std::size_t d, std::size_t s, double polylog_c,
                          core::RngStream& rng, const DeepCompileOptions& opts) {
    for (const auto& layer : c.layers())
        for (const Gate& g : layer)
            if (gate_arity(g.op) > 2)
                throw std::invalid_argument("compile_deep: gate fan-in above 2");

    DeepCompiled out;
    out.circuit_ = c;
    const std::size_t m = c.width();
    core::RngStream dict_rng = rng.derive(0);
    out.dict_ = features::random_unit_dictionary(m, d, dict_rng);

    // Probe inputs for the compile-time precondition measurement.
    core::RngStream probe_rng = rng.derive(0xFFFF);
    std::vector<features::BooleanVector> probes;
    for (std::size_t i = 0; i < opts.probe_inputs; ++i) {
        std::vector<std::uint32_t> idx;
        while (idx.size() < std::min(opts.probe_sparsity, m)) {
            auto k = static_cast<std::uint32_t>(probe_rng.next_below(m));
            if (std::find(idx.begin(), idx.end(), k) == idx.end()) idx.push_back(k);
        }
        probes.emplace_back(m, std::move(idx));
    }
    std::vector<std::vector<double>> probe_feats;
    probe_feats.reserve(probes.size());
    for (const auto& b : probes) {
        auto x = features::encode(out.dict_, b);
        probe_feats.push_back(core::matvec_t(out.dict_.phi(), x));
    }

    const std::size_t d_u = std::max<std::size_t>(1, opts.uand_width_multiplier * d);
    for (std::size_t l = 0; l < c.depth(); ++l) {
        core::RngStream layer_rng = rng.derive(1 + l);
        core::RngStream uand_rng = layer_rng.derive(0);
        uand::UandNetwork net = uand::build_uand_basis(m, d_u, s, polylog_c, uand_rng);

        std::vector<std::vector<std::uint32_t>> rows(d_u);
        for (std::size_t i = 0; i < d_u; ++i) {
            const double* row = net.win().row(i);
            for (std::size_t k = 0; k < m; ++k)
                if (row[k] == 1.0) rows[i].push_back(static_cast<std::uint32_t>(k));
        }

        std::vector<DeepGateTerms> gates(m);
        std::vector<uand::Tuple> uncovered;
        for (std::size_t j = 0; j < m; ++j) {
            const Gate& gate = c.gate(l, j);
            AndPolynomial poly = AndPolynomial::apply_gate(
                gate.op, AndPolynomial::variable(gate.in0), AndPolynomial::variable(gate.in1));
            DeepGateTerms gt;
            for (const auto& [term, coeff] : poly.terms()) {
                double cf = static_cast<double>(coeff);
                if (term.empty()) gt.constant += cf;
                else if (term.size() == 1) gt.singles.push_back({cf, term[0]});
                else {
                    if (net.gamma(term).empty()) {
                        uncovered.push_back(term);
                        continue;
                    }
                    gt.pairs.push_back({cf, term});
                }
            }
            gates[j] = std::move(gt);
        }

        core::RngStream ec_rng = layer_rng.derive(1);
        // The EC layer's R_in is the gate map over the previous activation;
        // inside the pipeline we feed it feature estimates directly, so the
        // stored r_in is the identity on gate read-offs (bookkeeping only).
        core::DenseMatrix r_id(m, m, 0.0);
        for (std::size_t k = 0; k < m; ++k) r_id.at(k, k) = 1.0;
        ecc::ErrorCorrectionLayer ec = ecc::build_error_correction(
            m, d, s, features::ReadoffMatrix{std::move(r_id), std::nullopt}, ec_rng,
            opts.ec_threshold_k);

        DeepLayer dl{std::move(net), std::move(rows), std::move(gates), std::move(ec),
                     std::move(uncovered), 0.0, false};

        // Measure the gate-value error feeding this EC layer on the probes,
        // then advance the probes through it.
        double max_err = 0.0;
        for (std::size_t pi = 0; pi < probes.size(); ++pi) {
            auto trace = c.eval_trace(probes[pi]);
            std::vector<double> g = layer_gate_values(dl, probe_feats[pi]);
            for (std::size_t j = 0; j < m; ++j) {
                double truth = trace[l + 1].get(j) ? 1.0 : 0.0;
                max_err = std::max(max_err, std::abs(g[j] - truth));
            }
            probe_feats[pi] = layer_correct(dl, g);
        }
        dl.measured_eps_in = max_err;
        dl.precondition_violated = max_err > dl.ec.params().input_threshold;
        if (dl.precondition_violated) {
            std::ostringstream w;
            w << "layer " << l << ": measured eps_in " << max_err
              << " above the recorded threshold " << dl.ec.params().input_threshold;
            out.warnings_.push_back(w.str());
        }
        out.layers_.push_back(std::move(dl));
    }
    return out;
}

// --------------------------------------------------------------------------
// Serialization
// --------------------------------------------------------------------------

namespace {

nlohmann::json gates_to_json(const std::vector<DeepGateTerms>& gates) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& g : gates) {
        nlohmann::json jg;
        jg["c"] = g.constant;
        nlohmann::json singles = nlohmann::json::array();
        for (auto [cf, k] : g.singles) singles.push_back({cf, k});
        jg["singles"] = singles;
        nlohmann::json pairs = nlohmann::json::array();
        for (const auto& [cf, t] : g.pairs) pairs.push_back({cf, t[0], t[1]});
        jg["pairs"] = pairs;
        arr.push_back(jg);
    }
    return arr;
}

std::vector<DeepGateTerms> gates_from_json(const nlohmann::json& arr) {
    std::vector<DeepGateTerms> gates;
    for (const auto& jg : arr) {
        DeepGateTerms g;
        g.constant = jg.at("c").get<double>();
        for (const auto& s : jg.at("singles"))
            g.singles.push_back({s[0].get<double>(), s[1].get<std::uint32_t>()});
        for (const auto& p : jg.at("pairs"))
            g.pairs.push_back({p[0].get<double>(),
                               uand::Tuple{p[1].get<std::uint32_t>(), p[2].get<std::uint32_t>()}});
        gates.push_back(std::move(g));
    }
    return gates;
}

} // namespace

void save_compiled(const std::string& dir, const DeepCompiled& compiled) {
    std::filesystem::create_directories(dir);
    core::write_sbmat(dir + "/dict.sbmat", compiled.input_dict().phi());
    nlohmann::json j;
    j["kind"] = "deep";
    j["circuit"] = compiled.circuit().print();
    j["m"] = compiled.circuit().width();
    j["depth"] = compiled.circuit().depth();
    j["warnings"] = compiled.warnings();
    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t l = 0; l < compiled.layers().size(); ++l) {
        const DeepLayer& dl = compiled.layers()[l];
        std::string tag = std::to_string(l);
        core::write_sbmat(dir + "/uand" + tag + ".sbmat", dl.uand.win());
        core::write_sbmat(dir + "/ec" + tag + ".sbmat", dl.ec.phi_unnormalized());
        nlohmann::json jl;
        jl["gates"] = gates_to_json(dl.gates);
        jl["uand_p"] = dl.uand.provenance().p;
        jl["uand_c"] = dl.uand.provenance().polylog_c;
        jl["s"] = dl.uand.provenance().s;
        jl["ec_threshold_k"] = dl.ec.params().threshold_k;
        jl["measured_eps_in"] = dl.measured_eps_in;
        jl["precondition_violated"] = dl.precondition_violated;
        nlohmann::json unc = nlohmann::json::array();
        for (const auto& t : dl.uncovered) unc.push_back({t[0], t[1]});
        jl["uncovered"] = unc;
        layers.push_back(jl);
    }
    j["layers"] = layers;
    std::ofstream f(dir + "/manifest.json");
    f << j.dump(2) << "\n";
}

DeepCompiled load_compiled(const std::string& dir) {
    std::ifstream f(dir + "/manifest.json");
    if (!f) throw std::runtime_error("missing manifest.json in " + dir);
    nlohmann::json j;
    f >> j;
    DeepCompiled out;
    out.circuit_ = parse_circuit(j.at("circuit").get<std::string>());
    out.dict_ = features::FeatureDictionary(core::read_sbmat(dir + "/dict.sbmat"),
                                            features::DictionaryKind::RandomUnit);
    out.warnings_ = j.value("warnings", std::vector<std::string>{});
    const std::size_t m = out.circuit_.width();
    std::size_t l = 0;
    for (const auto& jl : j.at("layers")) {
        std::string tag = std::to_string(l++);
        core::DenseMatrix win = core::read_sbmat(dir + "/uand" + tag + ".sbmat");
        uand::Provenance prov;
        prov.kind = "uand_basis";
        prov.m = win.cols();
        prov.d = win.rows();
        prov.s = jl.value("s", std::size_t(3));
        prov.n = 2;
        prov.polylog_c = jl.value("uand_c", 1.0);
        prov.p = jl.value("uand_p", 0.0);
        uand::UandNetwork net(std::move(win), 2, std::move(prov));

        std::vector<std::vector<std::uint32_t>> rows(net.d());
        for (std::size_t i = 0; i < net.d(); ++i) {
            const double* row = net.win().row(i);
            for (std::size_t k = 0; k < m; ++k)
                if (row[k] == 1.0) rows[i].push_back(static_cast<std::uint32_t>(k));
        }

        core::DenseMatrix phi_u = core::read_sbmat(dir + "/ec" + tag + ".sbmat");
        ecc::ErrorCorrectionLayer::Params p;
        p.m = m;
        p.d = phi_u.rows();
        p.s = prov.s;
        p.p = core::clamp_probability(
            1.0 / std::sqrt(static_cast<double>(p.d) * static_cast<double>(p.s)));
        p.scalar = std::pow(static_cast<double>(p.s) / static_cast<double>(p.d), 0.25);
        p.threshold_k = jl.value("ec_threshold_k", 1.0);
        p.input_threshold = p.threshold_k * std::pow(static_cast<double>(p.d), 0.25) /
                            (std::sqrt(static_cast<double>(m)) *
                             std::pow(static_cast<double>(p.s), 0.25));
        core::DenseMatrix r_id(m, m, 0.0);
        for (std::size_t k = 0; k < m; ++k) r_id.at(k, k) = 1.0;
        ecc::ErrorCorrectionLayer ec(std::move(phi_u),
                                     features::ReadoffMatrix{std::move(r_id), std::nullopt}, p);

        DeepLayer dl{std::move(net), std::move(rows), gates_from_json(jl.at("gates")),
                     std::move(ec), {},
                     jl.value("measured_eps_in", 0.0), jl.value("precondition_violated", false)};
        for (const auto& t : jl.value("uncovered", nlohmann::json::array()))
            dl.uncovered.push_back(uand::Tuple{t[0].get<std::uint32_t>(),
                                               t[1].get<std::uint32_t>()});
        out.layers_.push_back(std::move(dl));
    }
    return out;
}

} // namespace sbmlp::circuits
