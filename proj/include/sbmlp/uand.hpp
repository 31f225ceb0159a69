#pragma once
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbmlp/dictionary.hpp"
#include "sbmlp/mlp_network.hpp"
#include "sbmlp/verify.hpp"

namespace sbmlp::uand {

using Tuple = std::vector<std::uint32_t>; // sorted feature indices

struct EmptyIndexSet : std::runtime_error {
    explicit EmptyIndexSet(const Tuple& t);
    Tuple tuple;
};

struct Provenance {
    std::string kind; // "uand_basis", "uand_highfanin", "uand_superposed"
    std::size_t m = 0, d = 0, s = 0, n = 2;
    double polylog_c = 1.0;
    double p = 0.0; // realized connection probability after clamping
    std::uint64_t seed = 0, stream = 0;
};

// Sparse read-off vector: value on each listed neuron, zero elsewhere.
struct SparseReadoff {
    std::vector<std::uint32_t> neurons;
    double value = 0.0;

    double apply(const std::vector<double>& activation) const {
        double s = 0.0;
        for (auto i : neurons) s += activation[i];
        return s * value;
    }
};

// One-layer U-AND over basis-aligned inputs: win is d x m Bernoulli(p) with
// p = min(1, C ln^2 m / d^{1/n}), bias identically -(n-1). Index sets are
// recomputable from win; handed-out tuples are memoized in the gamma map.
class UandNetwork {
public:
    UandNetwork(core::DenseMatrix win, std::uint32_t fanin, Provenance prov);

    std::size_t m() const { return win_.cols(); }
    std::size_t d() const { return win_.rows(); }
    std::uint32_t fanin() const { return fanin_; }
    double bias_value() const { return -(static_cast<double>(fanin_) - 1.0); }
    const core::DenseMatrix& win() const { return win_; }
    const core::DenseMatrix& win_t() const { return win_t_; }
    const Provenance& provenance() const { return prov_; }
    void rename_kind(std::string kind) { prov_.kind = std::move(kind); }

    // Realized index set: neurons whose row has weight 1 at every tuple entry.
    std::vector<std::uint32_t> compute_gamma(const Tuple& t) const;
    const std::vector<std::uint32_t>& gamma(const Tuple& t) const; // memoized
    const std::map<Tuple, std::vector<std::uint32_t>>& gamma_map() const { return gamma_; }

    // Post-ReLU activations on a basis-aligned boolean input.
    std::vector<double> eval(const features::BooleanVector& b) const;

    // Averaging read-off over the realized index set; nullopt when empty.
    std::optional<SparseReadoff> readoff_vector(const Tuple& t) const;

    bool operator==(const UandNetwork& o) const {
        return win_ == o.win_ && fanin_ == o.fanin_;
    }

private:
    core::DenseMatrix win_;   // d x m
    core::DenseMatrix win_t_; // m x d (contiguous columns)
    std::uint32_t fanin_;
    Provenance prov_;
    mutable std::map<Tuple, std::vector<std::uint32_t>> gamma_;
};

// Mean of the activation over Gamma(k1,k2); throws EmptyIndexSet.
double readoff_pair(const UandNetwork& net, const std::vector<double>& activation,
                    std::uint32_t k1, std::uint32_t k2);
double readoff_tuple(const UandNetwork& net, const std::vector<double>& activation,
                     const Tuple& t);

double connection_probability(std::size_t m, std::size_t d, std::uint32_t n, double polylog_c);

UandNetwork build_uand_basis(std::size_t m, std::size_t d, std::size_t s, double polylog_c,
                             core::RngStream& rng);
UandNetwork build_uand_highfanin(std::size_t m, std::size_t d, std::size_t s, std::uint32_t fanin,
                                 double polylog_c, core::RngStream& rng);

// Basis construction composed with R = Phi^T: consumes superposed encodings
// Phi b directly. Shares the basis network's index sets and read-offs.
struct SuperposedUand {
    core::MlpNetwork net;       // single layer: W_in Phi^T, bias -1
    UandNetwork basis;          // the underlying basis-aligned construction
    std::size_t d_in = 0;

    std::vector<double> eval(const std::vector<double>& superposed_input) const {
        return net.eval(superposed_input);
    }
};
SuperposedUand build_uand_superposed(const features::FeatureDictionary& dict, std::size_t d,
                                     std::size_t s, double polylog_c, core::RngStream& rng);

// Targeted verification over (1,1)/(1,0)/(0,0) cases for a pair; exact
// counting path, bit-identical to full evaluation (see tests).
struct PairCaseStats {
    features::EpsReport eps_on;     // both features forced on
    double mean_err_on = 0.0;
    double mean_err_half = 0.0;     // k1 on, k2 off
    double mean_err_off = 0.0;      // both off
    std::size_t lower_bound_violations = 0; // readoff < exact AND occurrences
    std::size_t empty_pairs = 0;
};

PairCaseStats verify_uand_targeted(const UandNetwork& net,
                                   const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs,
                                   std::size_t s, std::size_t samples_per_pair,
                                   core::RngStream& rng);

// Serialization: directory with win.sbmat, bias.sbmat and manifest.json.
void save_uand(const std::string& dir, const UandNetwork& net,
               const std::vector<Tuple>& empty_sets = {});
UandNetwork load_uand(const std::string& dir);

} // namespace sbmlp::uand
