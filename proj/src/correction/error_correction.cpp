#include "sbmlp/error_correction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sbmlp/activations.hpp"
#include "sbmlp/kernels.hpp"

namespace sbmlp::ecc {

ErrorCorrectionLayer::ErrorCorrectionLayer(core::DenseMatrix phi_unnormalized,
                                           features::ReadoffMatrix r_in, Params params)
    : phi_u_(std::move(phi_unnormalized)), r_in_(std::move(r_in)), params_(params) {
    phi_u_.check_finite("error-correction dictionary");
    if (r_in_.features() != phi_u_.cols())
        throw std::invalid_argument("error correction: r_in feature count mismatch");
    const std::size_t d = phi_u_.rows();
    const std::size_t m = phi_u_.cols();
    gamma_.resize(m);
    for (std::size_t i = 0; i < d; ++i) {
        const double* row = phi_u_.row(i);
        for (std::size_t k = 0; k < m; ++k)
            if (row[k] != 0.0)
                gamma_[k].push_back({static_cast<std::uint32_t>(i), row[k]});
    }
    core::DenseMatrix r(m, d, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        if (gamma_[k].empty()) {
            empty_features_.push_back(static_cast<std::uint32_t>(k));
            continue;
        }
        double w = 1.0 / (params_.scalar * static_cast<double>(gamma_[k].size()));
        for (auto [i, sgn] : gamma_[k]) r.at(k, i) = sgn * w;
    }
    r_out_ = features::ReadoffMatrix{std::move(r), std::nullopt};
}

core::DenseMatrix ErrorCorrectionLayer::output_dictionary() const {
    core::DenseMatrix out = phi_u_;
    kernels::scale(params_.scalar, out.data(), out.size());
    return out;
}

std::vector<double> ErrorCorrectionLayer::apply(const std::vector<double>& x) const {
    std::vector<double> feats = r_in_.read_all(x);
    std::vector<double> pre = core::matvec(phi_u_, feats);
    for (double& v : pre) v = params_.scalar * core::staircase_round(v, 2);
    return pre;
}

std::vector<double> ErrorCorrectionLayer::clean_ground_truth(
    const features::BooleanVector& b) const {
    if (b.length() != m()) throw std::invalid_argument("clean_ground_truth: width mismatch");
    std::vector<double> v(d_out(), 0.0);
    for (auto k : b.active())
        for (auto [i, sgn] : gamma_[k]) v[i] += sgn;
    return v;
}

std::size_t ErrorCorrectionLayer::collision_count(const features::BooleanVector& b) const {
    if (b.length() != m()) throw std::invalid_argument("collision_count: width mismatch");
    std::vector<std::uint32_t> overlap(d_out(), 0);
    for (auto k : b.active())
        for (const auto& entry : gamma_[k]) ++overlap[entry.first];
    std::size_t n = 0;
    for (auto c : overlap)
        if (c >= 3) ++n;
    return n;
}

std::size_t ErrorCorrectionLayer::clipped_count(const features::BooleanVector& b) const {
    auto v = clean_ground_truth(b);
    std::size_t n = 0;
    for (double x : v)
        if (std::abs(x) >= 3.0) ++n;
    return n;
}

ErrorCorrectionLayer build_error_correction(std::size_t m, std::size_t d, std::size_t s,
                                            features::ReadoffMatrix r_in, core::RngStream& rng,
                                            double threshold_k) {
    if (m < 1 || d < 1 || s < 1) throw std::invalid_argument("build_error_correction: bad sizes");
    ErrorCorrectionLayer::Params p;
    p.m = m;
    p.d = d;
    p.s = s;
    p.p = core::clamp_probability(1.0 / std::sqrt(static_cast<double>(d) * static_cast<double>(s)));
    p.scalar = std::pow(static_cast<double>(s) / static_cast<double>(d), 0.25);
    p.threshold_k = threshold_k;
    p.input_threshold = threshold_k * std::pow(static_cast<double>(d), 0.25) /
                        (std::sqrt(static_cast<double>(m)) *
                         std::pow(static_cast<double>(s), 0.25));
    p.seed = rng.seed();
    p.stream = rng.stream_id();
    core::DenseMatrix phi_u = core::sample_ternary_matrix(d, m, p.p, rng);
    return ErrorCorrectionLayer(std::move(phi_u), std::move(r_in), p);
}

ContractionResult apply_and_measure_contraction(const ErrorCorrectionLayer& layer,
                                                const features::FeatureDictionary& input_dict,
                                                const features::BooleanVector& b, double noise_eps,
                                                std::size_t trials, core::RngStream& rng) {
    if (input_dict.m() != layer.m())
        throw std::invalid_argument("contraction: dictionary feature count mismatch");
    if (noise_eps < 0.0) throw std::invalid_argument("contraction: noise_eps >= 0");
    const std::size_t m = layer.m();
    const std::size_t d_in = input_dict.d();

    std::vector<double> x_clean = features::encode(input_dict, b);
    ContractionResult res;
    res.collision_count = layer.collision_count(b);

    auto measure = [&](const std::vector<double>& x) {
        ContractionTrial t;
        std::vector<double> feats = layer.r_in().read_all(x);
        for (std::size_t k = 0; k < m; ++k)
            t.eps_in = std::max(t.eps_in, std::abs(feats[k] - (b.get(k) ? 1.0 : 0.0)));
        std::vector<double> y = layer.apply(x);
        std::vector<double> out = layer.readoff().read_all(y);
        for (std::size_t k = 0; k < m; ++k) {
            if (std::find(layer.empty_features().begin(), layer.empty_features().end(),
                          static_cast<std::uint32_t>(k)) != layer.empty_features().end())
                continue;
            t.eps_out = std::max(t.eps_out, std::abs(out[k] - (b.get(k) ? 1.0 : 0.0)));
        }
        return t;
    };

    // Intrinsic floor: the collision-plus-dictionary error at zero noise.
    res.intrinsic_floor = measure(x_clean).eps_out;

    res.trials.reserve(trials);
    std::vector<double> delta(d_in);
    // Adversarial component: a batch of features hit hard with random signs
    // (concentrated error is the worst case the rounding stage must absorb),
    // plus an isotropic random component.
    const std::size_t adversarial_features = std::max<std::size_t>(1, m / 32);
    for (std::size_t trial = 0; trial < trials; ++trial) {
        core::RngStream trng = rng.derive(trial);
        if (noise_eps == 0.0) {
            res.trials.push_back(measure(x_clean));
            continue;
        }
        std::fill(delta.begin(), delta.end(), 0.0);
        for (std::size_t j = 0; j < adversarial_features; ++j) {
            auto k = static_cast<std::uint32_t>(trng.next_below(m));
            double sgn = trng.next_bernoulli(0.5) ? 1.0 : -1.0;
            kernels::axpy(sgn, input_dict.column(k), delta.data(), d_in);
        }
        double iso = 0.25 * std::sqrt(static_cast<double>(adversarial_features) /
                                      static_cast<double>(d_in));
        for (auto& v : delta) v += iso * trng.next_gaussian();
        // Rescale so the injected read-off error is exactly noise_eps.
        std::vector<double> injected = layer.r_in().read_all(delta);
        if (layer.r_in().bias) // bias belongs to x, not to the perturbation
            for (std::size_t k = 0; k < m; ++k) injected[k] -= (*layer.r_in().bias)[k];
        double mx = kernels::max_abs(injected.data(), injected.size());
        if (mx == 0.0) {
            res.trials.push_back(measure(x_clean));
            continue;
        }
        double scale = noise_eps / mx;
        std::vector<double> x = x_clean;
        kernels::axpy(scale, delta.data(), x.data(), d_in);
        res.trials.push_back(measure(x));
    }

    auto median_of = [](std::vector<double> v) {
        if (v.empty()) return 0.0;
        std::size_t mid = v.size() / 2;
        std::nth_element(v.begin(), v.begin() + mid, v.end());
        return v[mid];
    };
    std::vector<double> ins, outs;
    for (const auto& t : res.trials) {
        ins.push_back(t.eps_in);
        outs.push_back(t.eps_out);
    }
    res.median_eps_in = median_of(ins);
    res.median_eps_out = median_of(outs);
    return res;
}

} // namespace sbmlp::ecc
