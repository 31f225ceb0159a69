#include "sbmlp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sbmlp/kernels.hpp"

namespace sbmlp::features {

double ReadoffMatrix::read(std::size_t k, const std::vector<double>& a) const {
    if (a.size() != r.cols()) throw std::invalid_argument("readoff: dimension mismatch");
    double v = kernels::dot(r.row(k), a.data(), r.cols());
    if (bias) v += (*bias)[k];
    return v;
}

std::vector<double> ReadoffMatrix::read_all(const std::vector<double>& a) const {
    std::vector<double> out = core::matvec(r, a);
    if (bias)
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += (*bias)[k];
    return out;
}

std::string sampling_mode_name(SamplingMode mode) {
    switch (mode) {
        case SamplingMode::Exhaustive: return "exhaustive";
        case SamplingMode::MonteCarlo: return "monte_carlo";
        case SamplingMode::TargetedPair: return "targeted_pair";
        case SamplingMode::TargetedTuple: return "targeted_tuple";
    }
    return "?";
}

EpsAccumulator::EpsAccumulator(std::size_t features, SamplingMode mode)
    : per_feature_max_(features, 0.0), mode_(mode) {}

void EpsAccumulator::add_errors(const std::vector<double>& abs_errors) {
    if (abs_errors.size() != per_feature_max_.size())
        throw std::invalid_argument("eps accumulator: feature count mismatch");
    for (std::size_t k = 0; k < abs_errors.size(); ++k) {
        double e = abs_errors[k];
        if (e > per_feature_max_[k]) per_feature_max_[k] = e;
        all_errors_.push_back(e);
        sum_ += e;
    }
    ++samples_;
}

void EpsAccumulator::add_single(std::size_t feature, double abs_error) {
    if (abs_error > per_feature_max_[feature]) per_feature_max_[feature] = abs_error;
    all_errors_.push_back(abs_error);
    sum_ += abs_error;
    ++samples_;
}

EpsReport EpsAccumulator::finish() const {
    EpsReport rep;
    rep.per_feature_max = per_feature_max_;
    rep.mode = mode_;
    rep.sample_count = samples_;
    if (all_errors_.empty()) return rep;
    rep.global_eps = *std::max_element(per_feature_max_.begin(), per_feature_max_.end());
    rep.mean_error = sum_ / static_cast<double>(all_errors_.size());
    std::vector<double> sorted = all_errors_;
    std::sort(sorted.begin(), sorted.end());
    auto pct = [&](double q) {
        std::size_t idx = static_cast<std::size_t>(q * static_cast<double>(sorted.size() - 1));
        return sorted[idx];
    };
    rep.p50 = pct(0.50);
    rep.p90 = pct(0.90);
    rep.p99 = pct(0.99);
    rep.p100 = sorted.back();
    return rep;
}

EpsReport verify_eps_linear(const std::vector<std::pair<std::vector<double>, BooleanVector>>& acts,
                            const ReadoffMatrix& r, SamplingMode mode) {
    EpsAccumulator acc(r.features(), mode);
    std::vector<double> errs(r.features());
    for (const auto& [a, target] : acts) {
        if (target.length() != r.features())
            throw std::invalid_argument("verify_eps_linear: target length mismatch");
        std::vector<double> read = r.read_all(a);
        for (std::size_t k = 0; k < read.size(); ++k)
            errs[k] = std::abs(read[k] - (target.get(k) ? 1.0 : 0.0));
        acc.add_errors(errs);
    }
    return acc.finish();
}

WeakLinearResult verify_weak_linear(const std::vector<std::pair<std::vector<double>, bool>>& samples,
                                    const std::vector<double>& direction) {
    bool has_pos = false, has_neg = false;
    double min_pos = 0.0, max_neg = 0.0;
    for (const auto& [a, label] : samples) {
        double proj = kernels::dot(a.data(), direction.data(), a.size());
        if (label) {
            min_pos = has_pos ? std::min(min_pos, proj) : proj;
            has_pos = true;
        } else {
            max_neg = has_neg ? std::max(max_neg, proj) : proj;
            has_neg = true;
        }
    }
    if (!has_pos || !has_neg)
        throw std::invalid_argument("verify_weak_linear: need both classes present");
    return {max_neg < min_pos, min_pos - max_neg};
}

double verify_relu_linear(const std::vector<std::pair<std::vector<double>, BooleanVector>>& samples,
                          const ReadoffMatrix& r) {
    if (samples.empty()) return 0.0;
    double total = 0.0;
    for (const auto& [a, target] : samples) {
        if (target.length() != r.features())
            throw std::invalid_argument("verify_relu_linear: target length mismatch");
        std::vector<double> read = r.read_all(a);
        kernels::relu_inplace(read.data(), read.size());
        double sq = 0.0;
        for (std::size_t k = 0; k < read.size(); ++k) {
            double diff = read[k] - (target.get(k) ? 1.0 : 0.0);
            sq += diff * diff;
        }
        total += std::sqrt(sq);
    }
    return total / static_cast<double>(samples.size());
}

} // namespace sbmlp::features
