#include "sbmlp/uand.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sbmlp/kernels.hpp"
#include "sbmlp/sbmat.hpp"

namespace sbmlp::uand {

static std::string tuple_str(const Tuple& t) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << t[i];
    os << ")";
    return os.str();
}

EmptyIndexSet::EmptyIndexSet(const Tuple& t)
    : std::runtime_error("empty index set for tuple " + tuple_str(t)), tuple(t) {}

UandNetwork::UandNetwork(core::DenseMatrix win, std::uint32_t fanin, Provenance prov)
    : win_(std::move(win)), fanin_(fanin), prov_(std::move(prov)) {
    win_.check_finite("uand win");
    win_t_ = win_.transposed();
}

std::vector<std::uint32_t> UandNetwork::compute_gamma(const Tuple& t) const {
    std::vector<std::uint32_t> idx;
    if (t.empty()) return idx;
    const std::size_t d = win_.rows();
    const double* first = win_t_.row(t[0]);
    for (std::size_t i = 0; i < d; ++i) {
        if (first[i] != 1.0) continue;
        bool all = true;
        for (std::size_t j = 1; j < t.size(); ++j) {
            if (win_t_.row(t[j])[i] != 1.0) {
                all = false;
                break;
            }
        }
        if (all) idx.push_back(static_cast<std::uint32_t>(i));
    }
    return idx;
}

const std::vector<std::uint32_t>& UandNetwork::gamma(const Tuple& t) const {
    auto it = gamma_.find(t);
    if (it != gamma_.end()) return it->second;
    return gamma_.emplace(t, compute_gamma(t)).first->second;
}

std::vector<double> UandNetwork::eval(const features::BooleanVector& b) const {
    if (b.length() != m()) throw std::invalid_argument("uand eval: width mismatch");
    std::vector<double> pre(d(), bias_value());
    for (auto k : b.active()) kernels::axpy(1.0, win_t_.row(k), pre.data(), d());
    kernels::relu_inplace(pre.data(), pre.size());
    return pre;
}

std::optional<SparseReadoff> UandNetwork::readoff_vector(const Tuple& t) const {
    const auto& g = gamma(t);
    if (g.empty()) return std::nullopt;
    return SparseReadoff{g, 1.0 / static_cast<double>(g.size())};
}

double readoff_tuple(const UandNetwork& net, const std::vector<double>& activation,
                     const Tuple& t) {
    auto r = net.readoff_vector(t);
    if (!r) throw EmptyIndexSet(t);
    return r->apply(activation);
}

double readoff_pair(const UandNetwork& net, const std::vector<double>& activation,
                    std::uint32_t k1, std::uint32_t k2) {
    Tuple t = k1 < k2 ? Tuple{k1, k2} : Tuple{k2, k1};
    return readoff_tuple(net, activation, t);
}

double connection_probability(std::size_t m, std::size_t d, std::uint32_t n, double polylog_c) {
    double lg = std::log(static_cast<double>(m));
    double p = polylog_c * lg * lg / std::pow(static_cast<double>(d), 1.0 / n);
    return core::clamp_probability(p);
}

UandNetwork build_uand_highfanin(std::size_t m, std::size_t d, std::size_t s, std::uint32_t fanin,
                                 double polylog_c, core::RngStream& rng) {
    if (m < 2 || d < 1 || fanin < 1)
        throw std::invalid_argument("build_uand: require m >= 2, d >= 1, fanin >= 1");
    double p = connection_probability(m, d, fanin, polylog_c);
    core::DenseMatrix win = core::sample_bernoulli_matrix(d, m, p, rng);
    Provenance prov{fanin == 2 ? "uand_basis" : "uand_highfanin",
                    m,
                    d,
                    s,
                    fanin,
                    polylog_c,
                    p,
                    rng.seed(),
                    rng.stream_id()};
    return UandNetwork(std::move(win), fanin, std::move(prov));
}

UandNetwork build_uand_basis(std::size_t m, std::size_t d, std::size_t s, double polylog_c,
                             core::RngStream& rng) {
    if (s < 2) throw std::invalid_argument("build_uand_basis: require s >= 2");
    return build_uand_highfanin(m, d, s, 2, polylog_c, rng);
}

SuperposedUand build_uand_superposed(const features::FeatureDictionary& dict, std::size_t d,
                                     std::size_t s, double polylog_c, core::RngStream& rng) {
    UandNetwork basis = build_uand_basis(dict.m(), d, s, polylog_c, rng);
    // W_in' = W_in R with R = Phi^T; w_bias' = w_bias.
    core::DenseMatrix win_prime = core::matmul(basis.win(), dict.phi_t());
    SuperposedUand sup{core::MlpNetwork{}, std::move(basis), dict.d()};
    sup.net.add_layer({std::move(win_prime), std::vector<double>(d, -1.0),
                       core::ActivationKind::relu()});
    sup.basis.rename_kind("uand_superposed");
    return sup;
}

PairCaseStats verify_uand_targeted(const UandNetwork& net,
                                   const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs,
                                   std::size_t s, std::size_t samples_per_pair,
                                   core::RngStream& rng) {
    const std::size_t m = net.m();
    if (net.fanin() != 2)
        throw std::invalid_argument("verify_uand_targeted: pairwise networks only");
    if (s < net.fanin()) throw std::invalid_argument("verify_uand_targeted: s < fanin");
    PairCaseStats stats;
    features::EpsAccumulator acc(pairs.size(), features::SamplingMode::TargetedPair);
    double sum_on = 0.0, sum_half = 0.0, sum_off = 0.0;
    std::size_t n_on = 0, n_half = 0, n_off = 0;

    for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
        auto [k1, k2] = pairs[pi];
        Tuple t = k1 < k2 ? Tuple{k1, k2} : Tuple{k2, k1};
        const auto& g = net.gamma(t);
        if (g.empty()) {
            ++stats.empty_pairs;
            continue;
        }
        core::RngStream pair_rng = rng.derive(pi);
        const double inv = 1.0 / static_cast<double>(g.size());

        // cnt[k] = |Gamma(k1,k2,k)| for every third feature, computed once per
        // pair; a targeted sample's read-off is then 1 + sum(cnt)/|Gamma|,
        // bit-identical to evaluating the network (integer sums, same order).
        std::vector<double> cnt(m, 0.0);
        for (auto i : g) {
            const double* row = net.win().row(i);
            for (std::size_t k = 0; k < m; ++k) cnt[k] += row[k];
        }

        auto draw_others = [&](std::size_t count, std::uint32_t a, std::uint32_t b,
                               std::vector<std::uint32_t>& out) {
            out.clear();
            while (out.size() < count) {
                auto k = static_cast<std::uint32_t>(pair_rng.next_below(m));
                if (k == a || k == b) continue;
                if (std::find(out.begin(), out.end(), k) != out.end()) continue;
                out.push_back(k);
            }
        };

        std::vector<std::uint32_t> others;
        for (std::size_t sample = 0; sample < samples_per_pair; ++sample) {
            // (1,1): pair on plus s-2 uniform others.
            draw_others(s - 2, k1, k2, others);
            double sum_counts = 0.0;
            for (auto k : others) sum_counts += cnt[k];
            double read_on = (static_cast<double>(g.size()) + sum_counts) * inv;
            double err_on = read_on - 1.0;
            if (read_on < 1.0) ++stats.lower_bound_violations;
            acc.add_single(pi, std::abs(err_on));
            sum_on += std::abs(err_on);
            ++n_on;

            // (1,0): k1 on, k2 off, s-1 others. Read-off value over Gamma:
            // mean of ReLU(cnt_active(i)) where the +1 from k1 cancels the
            // bias shift (fanin 2). For higher fan-in this path applies only
            // to fanin==2 verification; callers use MC otherwise.
            if (net.fanin() == 2) {
                draw_others(s - 1, k1, k2, others);
                double v = 0.0;
                for (auto i : g) {
                    double c = 0.0;
                    const double* row = net.win().row(i);
                    for (auto k : others) c += row[k];
                    v += c; // ReLU(1 + c - 1) = c, c >= 0
                }
                double read_half = v * inv;
                if (read_half < 0.0) ++stats.lower_bound_violations;
                sum_half += std::abs(read_half);
                ++n_half;

                // (0,0): s others, none of the pair. Neuron fires iff >= 2
                // active inputs among the others: value ReLU(c - 1).
                draw_others(s, k1, k2, others);
                double v0 = 0.0;
                for (auto i : g) {
                    double c = 0.0;
                    const double* row = net.win().row(i);
                    for (auto k : others) c += row[k];
                    double pre = c - 1.0;
                    v0 += pre > 0.0 ? pre : 0.0;
                }
                double read_off = v0 * inv;
                if (read_off < 0.0) ++stats.lower_bound_violations;
                sum_off += std::abs(read_off);
                ++n_off;
            }
        }
    }
    stats.eps_on = acc.finish();
    stats.mean_err_on = n_on ? sum_on / static_cast<double>(n_on) : 0.0;
    stats.mean_err_half = n_half ? sum_half / static_cast<double>(n_half) : 0.0;
    stats.mean_err_off = n_off ? sum_off / static_cast<double>(n_off) : 0.0;
    return stats;
}

void save_uand(const std::string& dir, const UandNetwork& net, const std::vector<Tuple>& empty_sets) {
    std::filesystem::create_directories(dir);
    core::write_sbmat(dir + "/win.sbmat", net.win());
    core::DenseMatrix bias(1, net.d(), net.bias_value());
    core::write_sbmat(dir + "/bias.sbmat", bias);
    nlohmann::json j;
    const auto& p = net.provenance();
    j["kind"] = p.kind;
    j["m"] = p.m;
    j["d"] = p.d;
    j["s"] = p.s;
    j["n"] = p.n;
    j["C"] = p.polylog_c;
    j["p"] = p.p;
    j["seed"] = p.seed;
    j["stream"] = p.stream;
    j["empty_index_sets"] = nlohmann::json::array();
    for (const auto& t : empty_sets) j["empty_index_sets"].push_back(t);
    std::ofstream f(dir + "/manifest.json");
    f << j.dump(2) << "\n";
}

UandNetwork load_uand(const std::string& dir) {
    core::DenseMatrix win = core::read_sbmat(dir + "/win.sbmat");
    std::ifstream f(dir + "/manifest.json");
    if (!f) throw std::runtime_error("missing manifest.json in " + dir);
    nlohmann::json j;
    f >> j;
    Provenance prov;
    prov.kind = j.value("kind", "uand_basis");
    prov.m = j.value("m", win.cols());
    prov.d = j.value("d", win.rows());
    prov.s = j.value("s", 0);
    prov.n = j.value("n", 2);
    prov.polylog_c = j.value("C", 1.0);
    prov.p = j.value("p", 0.0);
    prov.seed = j.value("seed", 0);
    prov.stream = j.value("stream", 0);
    return UandNetwork(std::move(win), static_cast<std::uint32_t>(prov.n), std::move(prov));
}

} // namespace sbmlp::uand
