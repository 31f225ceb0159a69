#include "sbmlp/random_uand.hpp"

#include <cmath>
#include <stdexcept>

#include "sbmlp/kernels.hpp"

namespace sbmlp::uand {

EtaCalibration calibrate_eta(const core::DenseMatrix& w, std::size_t s, double weight_std,
                             std::size_t n_samples, core::RngStream& rng) {
    if (n_samples < 10000) throw std::invalid_argument("calibrate_eta: n_samples >= 1e4");
    if (s < 2) throw std::invalid_argument("calibrate_eta: s >= 2");
    if (!(weight_std > 0.0)) throw std::invalid_argument("calibrate_eta: weight_std > 0");
    const double z_std = weight_std * std::sqrt(static_cast<double>(s - 2));

    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        double x = weight_std * rng.next_gaussian();
        double y = weight_std * rng.next_gaussian();
        double z = z_std != 0.0 ? z_std * rng.next_gaussian() : 0.0;
        double pre = x + y + z;
        double contrib = pre > 0.0 ? pre : 0.0;
        // Agreement means strictly equal nonzero signs; zeros disagree.
        double sign = (x > 0.0 && y > 0.0) || (x < 0.0 && y < 0.0) ? 1.0 : -1.0;
        double v = sign * contrib;
        sum += v;
        sumsq += v * v;
    }
    const double n = static_cast<double>(n_samples);
    double gap = sum / n;
    double var = (sumsq - sum * sum / n) / (n - 1.0);
    double sem = std::sqrt(var / n);
    EtaCalibration cal;
    cal.sample_count = n_samples;
    cal.gap = gap;
    cal.confidence_radius = 3.0 * sem;
    if (!(gap > 5.0 * sem))
        throw std::runtime_error("calibrate_eta: gap not statistically separated from zero");
    cal.eta = 1.0 / (static_cast<double>(w.rows()) * gap);
    return cal;
}

std::vector<double> random_mlp_readoff(const core::DenseMatrix& w, std::uint32_t k1,
                                       std::uint32_t k2, const EtaCalibration& eta) {
    if (k1 >= w.cols() || k2 >= w.cols())
        throw std::invalid_argument("random_mlp_readoff: feature out of range");
    std::vector<double> r(w.rows());
    for (std::size_t i = 0; i < w.rows(); ++i) {
        double x = w.at(i, k1);
        double y = w.at(i, k2);
        bool agree = (x > 0.0 && y > 0.0) || (x < 0.0 && y < 0.0);
        r[i] = agree ? eta.eta : -eta.eta;
    }
    return r;
}

std::vector<double> random_mlp_eval(const core::DenseMatrix& w, const features::BooleanVector& b) {
    if (b.length() != w.cols()) throw std::invalid_argument("random_mlp_eval: width mismatch");
    std::vector<double> pre(w.rows(), 0.0);
    // Sum of the active columns; row-major access per feature is strided, so
    // walk rows instead (s is tiny).
    for (std::size_t i = 0; i < w.rows(); ++i) {
        const double* row = w.row(i);
        double v = 0.0;
        for (auto k : b.active()) v += row[k];
        pre[i] = v > 0.0 ? v : 0.0;
    }
    return pre;
}

E0Estimate estimate_e0(double r_prime, std::size_t n_samples, core::RngStream& rng, bool bk_on,
                       bool bl_on) {
    if (!(r_prime > 0.0)) throw std::invalid_argument("estimate_e0: r_prime > 0");
    double sum = 0.0, sumsq = 0.0;
    const double bk = bk_on ? 1.0 : 0.0;
    const double bl = bl_on ? 1.0 : 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        double x = rng.next_gaussian();
        double y = rng.next_gaussian();
        double z = r_prime * rng.next_gaussian();
        double pre = bk * x + bl * y + z;
        double v = ((x > 0.0 && y > 0.0) || (x < 0.0 && y < 0.0) ? 1.0 : -1.0) *
                   (pre > 0.0 ? pre : 0.0);
        sum += v;
        sumsq += v * v;
    }
    const double n = static_cast<double>(n_samples);
    E0Estimate est;
    est.value = sum / n;
    double var = (sumsq - sum * sum / n) / (n - 1.0);
    est.std_error = std::sqrt(var / n);
    est.sample_count = n_samples;
    return est;
}

} // namespace sbmlp::uand
