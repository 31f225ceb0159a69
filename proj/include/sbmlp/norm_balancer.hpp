#pragma once
#include <cstddef>
#include <vector>

#include "sbmlp/dense_matrix.hpp"
#include "sbmlp/mlp_network.hpp"

namespace sbmlp::ecc {

// Piecewise-linear interpolant of the semicircle sqrt(s0 - y^2) at equal-arc
// knots, extended linearly beyond [-sqrt(s0), sqrt(s0)]. segments must be
// even so that y = 0 is a knot and f_pl(0) = sqrt(s0) exactly.
double f_pl(double y, double s0, std::size_t segments);

// Two-layer norm balancer: balance(a) = a + f_pl(N(a)/c) * v with
// N(a) = sum_i ReLU(W a)_i, W ~ N(0, 1/d^2), v an exact unit direction and
// c = E[ReLU(N(0,1))] = 1/sqrt(2*pi).
class NormBalancer {
public:
    NormBalancer(core::DenseMatrix w, std::vector<double> v, double s0, std::size_t segments);

    std::size_t d() const { return w_.rows(); }
    double s0() const { return s0_; }
    std::size_t segments() const { return segments_; }
    const std::vector<double>& direction() const { return v_; }
    const core::DenseMatrix& w() const { return w_; }
    static double relu_mean_constant(); // 1/sqrt(2*pi)

    double norm_estimate(const std::vector<double>& a) const; // N(a)/c
    std::vector<double> balance(const std::vector<double>& a) const;

    // Explicit pure-ReLU realization (2 hidden layers + output matrix);
    // intended for moderate d, equivalence-tested against balance().
    struct MlpForm {
        core::MlpNetwork hidden;
        core::DenseMatrix w_out;
        std::vector<double> out_bias;
        std::vector<double> eval(const std::vector<double>& a) const;
    };
    MlpForm as_mlp() const;

private:
    core::DenseMatrix w_;
    std::vector<double> v_;
    double s0_;
    std::size_t segments_;
};

NormBalancer build_norm_balancer(std::size_t d, double s0, std::size_t segments,
                                 core::RngStream& rng);

} // namespace sbmlp::ecc
