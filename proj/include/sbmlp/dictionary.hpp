#pragma once
#include <string>

#include "sbmlp/boolean_vector.hpp"
#include "sbmlp/dense_matrix.hpp"

namespace sbmlp::features {

enum class DictionaryKind { RandomUnit, Orthonormal, Identity };

// d x m feature encoding matrix with cached coherence. Columns are exactly
// unit length for every kind.
class FeatureDictionary {
public:
    FeatureDictionary() = default;
    FeatureDictionary(core::DenseMatrix phi, DictionaryKind kind);

    std::size_t m() const { return phi_.cols(); }
    std::size_t d() const { return phi_.rows(); }
    const core::DenseMatrix& phi() const { return phi_; }
    // m x d transpose kept for contiguous column access (encode hot path).
    const core::DenseMatrix& phi_t() const { return phi_t_; }
    DictionaryKind kind() const { return kind_; }

    double coherence() const { return mu_; }
    double norm_deviation() const { return norm_dev_; }

    const double* column(std::size_t k) const { return phi_t_.row(k); }

    std::string kind_name() const;

private:
    core::DenseMatrix phi_;
    core::DenseMatrix phi_t_;
    DictionaryKind kind_ = DictionaryKind::Identity;
    double mu_ = 0.0;
    double norm_dev_ = 0.0;
};

// Columns i.i.d. N(0, 1/d), normalized to exact unit length.
FeatureDictionary random_unit_dictionary(std::size_t m, std::size_t d, core::RngStream& rng);
// Random signed permutation embedding (m <= d); coherence exactly 0.
FeatureDictionary orthonormal_dictionary(std::size_t m, std::size_t d, core::RngStream& rng);
FeatureDictionary identity_dictionary(std::size_t m);

// Sum of active columns of phi: a = Phi b.
std::vector<double> encode(const FeatureDictionary& dict, const BooleanVector& b);

// SBMAT matrix plus a JSON sidecar {m, d, seed, kind, coherence}.
void save_dictionary(const std::string& base_path, const FeatureDictionary& dict,
                     std::uint64_t seed);
FeatureDictionary load_dictionary(const std::string& base_path);

} // namespace sbmlp::features
