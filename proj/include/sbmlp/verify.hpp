#pragma once
#include <optional>
#include <string>
#include <vector>

#include "sbmlp/boolean_vector.hpp"
#include "sbmlp/dense_matrix.hpp"

namespace sbmlp::features {

// m' x d read-off matrix; optional per-row affine bias.
struct ReadoffMatrix {
    core::DenseMatrix r;
    std::optional<std::vector<double>> bias;

    std::size_t features() const { return r.rows(); }
    std::size_t d() const { return r.cols(); }

    double read(std::size_t k, const std::vector<double>& a) const;
    std::vector<double> read_all(const std::vector<double>& a) const;
};

enum class SamplingMode { Exhaustive, MonteCarlo, TargetedPair, TargetedTuple };
std::string sampling_mode_name(SamplingMode mode);

// Per-feature and aggregate read-off error statistics.
struct EpsReport {
    std::vector<double> per_feature_max;
    double global_eps = 0.0; // max over features and samples
    double mean_error = 0.0;
    double p50 = 0.0, p90 = 0.0, p99 = 0.0, p100 = 0.0;
    std::size_t sample_count = 0;
    SamplingMode mode = SamplingMode::MonteCarlo;
};

// Accumulates |r_k . a(x) + bias_k - f_k(x)| over samples; deterministic
// aggregation in sample order.
class EpsAccumulator {
public:
    explicit EpsAccumulator(std::size_t features, SamplingMode mode);
    // Record a full sample given all per-feature errors.
    void add_errors(const std::vector<double>& abs_errors);
    // Record a single-feature observation (targeted verification).
    void add_single(std::size_t feature, double abs_error);
    EpsReport finish() const;

private:
    std::vector<double> per_feature_max_;
    std::vector<double> all_errors_;
    double sum_ = 0.0;
    std::size_t samples_ = 0;
    SamplingMode mode_;
};

EpsReport verify_eps_linear(const std::vector<std::pair<std::vector<double>, BooleanVector>>& acts,
                            const ReadoffMatrix& r, SamplingMode mode = SamplingMode::MonteCarlo);

struct WeakLinearResult {
    bool separated = false;
    double margin = 0.0; // min positive projection - max negative projection
};
// True iff max over negatives of r.a < min over positives of r.a.
WeakLinearResult verify_weak_linear(const std::vector<std::pair<std::vector<double>, bool>>& samples,
                                    const std::vector<double>& direction);

// Mean over samples of || F(x) - ReLU(R a(x)) ||_2.
double verify_relu_linear(const std::vector<std::pair<std::vector<double>, BooleanVector>>& samples,
                          const ReadoffMatrix& r);

} // namespace sbmlp::features
