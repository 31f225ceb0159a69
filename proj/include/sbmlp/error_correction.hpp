#pragma once
#include <cstdint>
#include <vector>

#include "sbmlp/dictionary.hpp"
#include "sbmlp/verify.hpp"

namespace sbmlp::ecc {

// Ternary re-encoder with a staircase-round nonlinearity: snaps noisy feature
// read-offs back to integer values. Maps a d_in activation to a d activation
// carrying the same boolean vector under a fresh ternary dictionary.
//
//   apply(x) = A * round_{[-2,2]}( Phi_u * (R_in x + bias_in) ),  A = (s/d)^{1/4}
//
// The output dictionary is A * Phi_u; the downstream read-off row for feature
// k averages sign_{k,i}/(A |Gamma_k|) over the realized nonzero set Gamma_k.
class ErrorCorrectionLayer {
public:
    struct Params {
        std::size_t m = 0, d = 0, s = 0;
        double p = 0.0;               // 1/sqrt(d s)
        double scalar = 0.0;          // (s/d)^{1/4}
        double threshold_k = 1.0;     // precondition constant K (config)
        double input_threshold = 0.0; // K d^{1/4} / (sqrt(m) s^{1/4}), recorded
        std::uint64_t seed = 0, stream = 0;
    };

    ErrorCorrectionLayer(core::DenseMatrix phi_unnormalized, features::ReadoffMatrix r_in,
                         Params params);

    const Params& params() const { return params_; }
    const core::DenseMatrix& phi_unnormalized() const { return phi_u_; }
    const features::ReadoffMatrix& r_in() const { return r_in_; }

    std::size_t d_in() const { return r_in_.d(); }
    std::size_t d_out() const { return phi_u_.rows(); }
    std::size_t m() const { return phi_u_.cols(); }

    core::DenseMatrix output_dictionary() const; // A * Phi_u
    // Realized signed-average read-off for the layer's output space.
    const features::ReadoffMatrix& readoff() const { return r_out_; }
    // Realized per-feature nonzero sets (neuron, sign).
    const std::vector<std::vector<std::pair<std::uint32_t, double>>>& gamma() const {
        return gamma_;
    }
    // Features whose realized Gamma_k is empty (no read-off exists).
    const std::vector<std::uint32_t>& empty_features() const { return empty_features_; }

    std::vector<double> apply(const std::vector<double>& x) const;
    // Pre-round integer ground truth Phi_u b.
    std::vector<double> clean_ground_truth(const features::BooleanVector& b) const;
    // Neurons shared by >= 3 active features (the structural collision rate).
    std::size_t collision_count(const features::BooleanVector& b) const;
    // Neurons whose clean integer value falls outside [-2, 2] and gets clipped.
    std::size_t clipped_count(const features::BooleanVector& b) const;

private:
    core::DenseMatrix phi_u_; // d x m ternary
    features::ReadoffMatrix r_in_;
    features::ReadoffMatrix r_out_;
    Params params_;
    std::vector<std::uint32_t> empty_features_;
    // Realized per-feature nonzero sets (neuron, sign).
    std::vector<std::vector<std::pair<std::uint32_t, double>>> gamma_;
};

// p = 1/sqrt(d s); threshold_k is the precondition constant K (default 1).
ErrorCorrectionLayer build_error_correction(std::size_t m, std::size_t d, std::size_t s,
                                            features::ReadoffMatrix r_in, core::RngStream& rng,
                                            double threshold_k = 1.0);

struct ContractionTrial {
    double eps_in = 0.0;  // max over features of |R_in(x+delta) - b|
    double eps_out = 0.0; // max over features of |readoff(apply(x+delta)) - b|
};

struct ContractionResult {
    std::vector<ContractionTrial> trials;
    double median_eps_in = 0.0;
    double median_eps_out = 0.0;
    double intrinsic_floor = 0.0; // median eps_out at zero injected noise
    std::size_t collision_count = 0;
};

// Injects adversarial-plus-random perturbations whose read-off error is
// exactly noise_eps in the infinity norm (feature-aligned random signs plus an
// isotropic component, rescaled), applies the layer, and measures both sides.
ContractionResult apply_and_measure_contraction(const ErrorCorrectionLayer& layer,
                                                const features::FeatureDictionary& input_dict,
                                                const features::BooleanVector& b, double noise_eps,
                                                std::size_t trials, core::RngStream& rng);

} // namespace sbmlp::ecc
