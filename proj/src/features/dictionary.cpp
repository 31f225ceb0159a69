#include "sbmlp/dictionary.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "sbmlp/kernels.hpp"
#include "sbmlp/sbmat.hpp"

namespace sbmlp::features {

FeatureDictionary::FeatureDictionary(core::DenseMatrix phi, DictionaryKind kind)
    : phi_(std::move(phi)), kind_(kind) {
    phi_.check_finite("feature dictionary");
    phi_t_ = phi_.transposed();
    const std::size_t m = phi_.cols();
    const std::size_t d = phi_.rows();
    norm_dev_ = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        double n = std::sqrt(kernels::dot(phi_t_.row(k), phi_t_.row(k), d));
        norm_dev_ = std::max(norm_dev_, std::abs(n - 1.0));
    }
    // Coherence via the Gram matrix; exact zero kinds skip the O(m^2 d) work.
    if (kind_ == DictionaryKind::Identity || kind_ == DictionaryKind::Orthonormal) {
        mu_ = 0.0;
        return;
    }
    core::DenseMatrix gram = core::matmul(phi_t_, phi_);
    double mu = 0.0;
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t l = k + 1; l < m; ++l) mu = std::max(mu, std::abs(gram.at(k, l)));
    mu_ = mu;
}

std::string FeatureDictionary::kind_name() const {
    switch (kind_) {
        case DictionaryKind::RandomUnit: return "random_unit";
        case DictionaryKind::Orthonormal: return "orthonormal";
        case DictionaryKind::Identity: return "identity";
    }
    return "?";
}

FeatureDictionary random_unit_dictionary(std::size_t m, std::size_t d, core::RngStream& rng) {
    if (m < 1 || d < 1) throw std::invalid_argument("random_unit_dictionary: m, d >= 1");
    core::DenseMatrix phi_t(m, d); // build transposed: columns are contiguous rows here
    for (std::size_t k = 0; k < m; ++k) {
        double* col = phi_t.row(k);
        for (std::size_t i = 0; i < d; ++i) col[i] = rng.next_gaussian();
        double n = std::sqrt(kernels::dot(col, col, d));
        if (n == 0.0) { col[0] = 1.0; n = 1.0; } // measure-zero guard
        kernels::scale(1.0 / n, col, d);
    }
    return FeatureDictionary(phi_t.transposed(), DictionaryKind::RandomUnit);
}

FeatureDictionary orthonormal_dictionary(std::size_t m, std::size_t d, core::RngStream& rng) {
    if (m > d) throw std::invalid_argument("orthonormal_dictionary: requires m <= d");
    std::vector<std::uint32_t> rows(d);
    std::iota(rows.begin(), rows.end(), 0);
    for (std::size_t i = d; i > 1; --i) // Fisher-Yates
        std::swap(rows[i - 1], rows[rng.next_below(i)]);
    core::DenseMatrix phi(d, m);
    for (std::size_t k = 0; k < m; ++k)
        phi.at(rows[k], k) = rng.next_bernoulli(0.5) ? 1.0 : -1.0;
    return FeatureDictionary(std::move(phi), DictionaryKind::Orthonormal);
}

FeatureDictionary identity_dictionary(std::size_t m) {
    core::DenseMatrix phi(m, m);
    for (std::size_t k = 0; k < m; ++k) phi.at(k, k) = 1.0;
    return FeatureDictionary(std::move(phi), DictionaryKind::Identity);
}

std::vector<double> encode(const FeatureDictionary& dict, const BooleanVector& b) {
    if (b.length() != dict.m()) throw std::invalid_argument("encode: length mismatch");
    std::vector<double> a(dict.d(), 0.0);
    for (auto k : b.active()) kernels::axpy(1.0, dict.column(k), a.data(), dict.d());
    return a;
}

void save_dictionary(const std::string& base_path, const FeatureDictionary& dict,
                     std::uint64_t seed) {
    core::write_sbmat(base_path + ".sbmat", dict.phi());
    nlohmann::json j;
    j["m"] = dict.m();
    j["d"] = dict.d();
    j["seed"] = seed;
    j["kind"] = dict.kind_name();
    j["coherence"] = dict.coherence();
    std::ofstream f(base_path + ".json");
    if (!f) throw std::runtime_error("cannot write sidecar for " + base_path);
    f << j.dump(2) << "\n";
}

FeatureDictionary load_dictionary(const std::string& base_path) {
    std::ifstream f(base_path + ".json");
    if (!f) throw std::runtime_error("missing sidecar for " + base_path);
    nlohmann::json j;
    f >> j;
    std::string kind = j.value("kind", "random_unit");
    DictionaryKind k = DictionaryKind::RandomUnit;
    if (kind == "orthonormal") k = DictionaryKind::Orthonormal;
    else if (kind == "identity") k = DictionaryKind::Identity;
    return FeatureDictionary(core::read_sbmat(base_path + ".sbmat"), k);
}

} // namespace sbmlp::features
