#include "sbmlp/norm_balancer.hpp"

#include <cmath>
#include <stdexcept>

#include "sbmlp/kernels.hpp"

namespace sbmlp::ecc {

namespace {

struct Knots {
    std::vector<double> y; // ascending
    std::vector<double> f;
};

// Equal-arc knots y_j = sqrt(s0) cos(pi j / segments), with the endpoints and
// the midpoint snapped to their exact values.
Knots semicircle_knots(double s0, std::size_t segments) {
    if (!(s0 > 0.0)) throw std::invalid_argument("f_pl: s0 must be positive");
    if (segments < 2 || segments % 2 != 0)
        throw std::invalid_argument("f_pl: segments must be even and >= 2");
    const double r = std::sqrt(s0);
    Knots kn;
    kn.y.resize(segments + 1);
    kn.f.resize(segments + 1);
    for (std::size_t j = 0; j <= segments; ++j) {
        double theta = M_PI * static_cast<double>(j) / static_cast<double>(segments);
        // ascending in y: take j from the pi end down to 0
        kn.y[segments - j] = r * std::cos(theta);
        kn.f[segments - j] = r * std::sin(theta);
    }
    kn.y.front() = -r;
    kn.f.front() = 0.0;
    kn.y.back() = r;
    kn.f.back() = 0.0;
    kn.y[segments / 2] = 0.0;
    kn.f[segments / 2] = r;
    return kn;
}

} // namespace

double f_pl(double y, double s0, std::size_t segments) {
    Knots kn = semicircle_knots(s0, segments);
    const auto& ys = kn.y;
    const auto& fs = kn.f;
    const std::size_t n = ys.size();
    std::size_t j;
    if (y <= ys[0]) j = 0;
    else if (y >= ys[n - 1]) j = n - 2;
    else {
        j = static_cast<std::size_t>(
                std::upper_bound(ys.begin(), ys.end(), y) - ys.begin()) - 1;
        if (y == ys[j]) return fs[j]; // exact knot
    }
    double slope = (fs[j + 1] - fs[j]) / (ys[j + 1] - ys[j]);
    return fs[j] + slope * (y - ys[j]);
}

NormBalancer::NormBalancer(core::DenseMatrix w, std::vector<double> v, double s0,
                           std::size_t segments)
    : w_(std::move(w)), v_(std::move(v)), s0_(s0), segments_(segments) {
    if (w_.rows() != w_.cols() || v_.size() != w_.rows())
        throw std::invalid_argument("NormBalancer: W must be d x d and v length d");
    semicircle_knots(s0, segments); // validates s0/segments
}

double NormBalancer::relu_mean_constant() { return 1.0 / std::sqrt(2.0 * M_PI); }

double NormBalancer::norm_estimate(const std::vector<double>& a) const {
    std::vector<double> h = core::matvec(w_, a);
    kernels::relu_inplace(h.data(), h.size());
    return kernels::sum(h.data(), h.size()) / relu_mean_constant();
}

std::vector<double> NormBalancer::balance(const std::vector<double>& a) const {
    double f = f_pl(norm_estimate(a), s0_, segments_);
    std::vector<double> out = a;
    kernels::axpy(f, v_.data(), out.data(), out.size());
    return out;
}

NormBalancer::MlpForm NormBalancer::as_mlp() const {
    const std::size_t d = this->d();
    const double c = relu_mean_constant();
    Knots kn = semicircle_knots(s0_, segments_);
    const std::size_t nk = kn.y.size();

    MlpForm form;
    // Layer 1: [ReLU(W a); ReLU(a); ReLU(-a)], width 3d.
    core::DenseMatrix w1(3 * d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) w1.at(i, j) = w_.at(i, j);
    for (std::size_t i = 0; i < d; ++i) {
        w1.at(d + i, i) = 1.0;
        w1.at(2 * d + i, i) = -1.0;
    }
    form.hidden.add_layer({std::move(w1), std::vector<double>(3 * d, 0.0),
                           core::ActivationKind::relu()});

    // Layer 2: z = sum of the first d units (z = N(a) >= 0), y = z/c.
    //   u_lin  = ReLU(y)                      (carries the affine-in-y part)
    //   u_j    = ReLU(y - y_j), j interior    (slope jumps)
    //   u_one  = ReLU(0.h + 1) = 1            (constant)
    //   pass   = ReLU(a+), ReLU(a-)           (identity on nonneg units)
    const std::size_t n_jump = nk - 2;
    const std::size_t width2 = 1 + n_jump + 1 + 2 * d;
    core::DenseMatrix w2(width2, 3 * d);
    std::vector<double> b2(width2, 0.0);
    for (std::size_t col = 0; col < d; ++col) {
        w2.at(0, col) = 1.0 / c;
        for (std::size_t j = 0; j < n_jump; ++j) w2.at(1 + j, col) = 1.0 / c;
    }
    for (std::size_t j = 0; j < n_jump; ++j) b2[1 + j] = -kn.y[j + 1];
    b2[1 + n_jump] = 1.0; // constant unit
    for (std::size_t i = 0; i < 2 * d; ++i) w2.at(2 + n_jump + i, d + i) = 1.0;
    form.hidden.add_layer({std::move(w2), std::move(b2), core::ActivationKind::relu()});

    // Output: a + v * f_pl(y); f_pl(y) = f0 + m0 (y - y0) + sum_j (m_j - m_{j-1}) ReLU(y - y_j).
    std::vector<double> slopes(nk - 1);
    for (std::size_t j = 0; j + 1 < nk; ++j)
        slopes[j] = (kn.f[j + 1] - kn.f[j]) / (kn.y[j + 1] - kn.y[j]);
    form.w_out = core::DenseMatrix(d, width2, 0.0);
    form.out_bias.assign(d, 0.0);
    const double const_term = kn.f[0] - slopes[0] * kn.y[0];
    for (std::size_t i = 0; i < d; ++i) {
        form.w_out.at(i, 0) = v_[i] * slopes[0];              // m0 * y (y >= 0 here)
        for (std::size_t j = 0; j < n_jump; ++j)
            form.w_out.at(i, 1 + j) = v_[i] * (slopes[j + 1] - slopes[j]);
        form.w_out.at(i, 1 + n_jump) = v_[i] * const_term;    // constant via the 1-unit
        form.w_out.at(i, 2 + n_jump + i) = 1.0;               // + a+
        form.w_out.at(i, 2 + n_jump + d + i) = -1.0;          // - a-
    }
    return form;
}

std::vector<double> NormBalancer::MlpForm::eval(const std::vector<double>& a) const {
    std::vector<double> h = hidden.eval(a);
    std::vector<double> out = core::matvec(w_out, h);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += out_bias[i];
    return out;
}

NormBalancer build_norm_balancer(std::size_t d, double s0, std::size_t segments,
                                 core::RngStream& rng) {
    if (d < 1) throw std::invalid_argument("build_norm_balancer: d >= 1");
    double var = 1.0 / (static_cast<double>(d) * static_cast<double>(d));
    core::DenseMatrix w = core::sample_gaussian_matrix(d, d, var, rng);
    std::vector<double> v(d);
    for (auto& x : v) x = rng.next_gaussian();
    double n = std::sqrt(kernels::dot(v.data(), v.data(), d));
    if (n == 0.0) { v[0] = 1.0; n = 1.0; }
    kernels::scale(1.0 / n, v.data(), d);
    return NormBalancer(std::move(w), std::move(v), s0, segments);
}

} // namespace sbmlp::ecc
