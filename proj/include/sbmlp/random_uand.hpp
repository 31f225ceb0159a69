#pragma once
#include <cstdint>
#include <vector>

#include "sbmlp/boolean_vector.hpp"
#include "sbmlp/dense_matrix.hpp"

namespace sbmlp::uand {

// Scaling parameter for sign-agreement read-offs from a randomly initialized
// one-layer MLP, with its Monte Carlo provenance.
struct EtaCalibration {
    double eta = 0.0;
    std::size_t sample_count = 0;
    double gap = 0.0;               // estimated per-neuron expected contribution gap
    double confidence_radius = 0.0; // ~3 standard errors on gap
};

// Per-neuron expected contribution gap between sign-agreeing and
// sign-disagreeing neurons on inputs with both target features on and s-2
// other active features: E[sign(x)sign(y) ReLU(x+y+z)] with x,y ~ N(0, δ²),
// z ~ N(0, (s-2) δ²). eta = 1 / (d · gap). Throws if the gap estimate is not
// separated from zero at 5 standard errors.
EtaCalibration calibrate_eta(const core::DenseMatrix& w, std::size_t s, double weight_std,
                             std::size_t n_samples, core::RngStream& rng);

// Sign-agreement read-off vector: r_i = +eta when columns k1 and k2 of w have
// strictly equal nonzero signs at row i, else -eta (a zero weight counts as
// disagreement; fixed tie-break).
std::vector<double> random_mlp_readoff(const core::DenseMatrix& w, std::uint32_t k1,
                                       std::uint32_t k2, const EtaCalibration& eta);

// Activations of ReLU(W b) on a basis-aligned boolean input (zero bias).
std::vector<double> random_mlp_eval(const core::DenseMatrix& w, const features::BooleanVector& b);

struct E0Estimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t sample_count = 0;
};

// Monte Carlo estimate of E0 = E[sign(x)sign(y) ReLU(b_k x + b_l y + z)],
// x,y ~ N(0,1), z ~ N(0, r'^2). Defaults to the both-on case b_k = b_l = 1.
E0Estimate estimate_e0(double r_prime, std::size_t n_samples, core::RngStream& rng,
                       bool bk_on = true, bool bl_on = true);

} // namespace sbmlp::uand
