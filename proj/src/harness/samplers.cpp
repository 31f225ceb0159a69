#include "sbmlp/samplers.hpp"

#include <stdexcept>

namespace sbmlp::harness {

std::uint64_t count_sparse_inputs(std::size_t m, std::size_t s) {
    // sum_{j<=s} C(m, j), saturating well above the guard
    std::uint64_t total = 0;
    for (std::size_t j = 0; j <= s; ++j) {
        std::uint64_t c = 1;
        for (std::size_t i = 0; i < j; ++i) {
            c = c * (m - i) / (i + 1);
            if (c > 100 * kExhaustiveGuard) return 100 * kExhaustiveGuard;
        }
        total += c;
        if (total > 100 * kExhaustiveGuard) return 100 * kExhaustiveGuard;
    }
    return total;
}

features::BooleanVector random_support(std::size_t m, std::size_t s, core::RngStream& rng) {
    std::vector<std::uint32_t> idx;
    while (idx.size() < s) {
        auto k = static_cast<std::uint32_t>(rng.next_below(m));
        if (std::find(idx.begin(), idx.end(), k) == idx.end()) idx.push_back(k);
    }
    return features::BooleanVector(m, std::move(idx));
}

static void enumerate_supports(std::size_t m, std::size_t s,
                               std::vector<std::uint32_t>& current, std::size_t first,
                               std::vector<features::BooleanVector>& out) {
    out.emplace_back(m, current);
    if (current.size() == s) return;
    for (std::size_t k = first; k < m; ++k) {
        current.push_back(static_cast<std::uint32_t>(k));
        enumerate_supports(m, s, current, k + 1, out);
        current.pop_back();
    }
}

std::vector<features::BooleanVector> sample_sparse_inputs(
    std::size_t m, std::size_t s, std::size_t count, features::SamplingMode mode,
    core::RngStream& rng, std::optional<std::pair<std::uint32_t, std::uint32_t>> target) {
    if (s > m) throw std::invalid_argument("sample_sparse_inputs: s <= m required");
    std::vector<features::BooleanVector> out;
    switch (mode) {
        case features::SamplingMode::Exhaustive: {
            if (count_sparse_inputs(m, s) > kExhaustiveGuard)
                throw std::invalid_argument(
                    "sample_sparse_inputs: exhaustive guard exceeded (C(m,<=s) > 2e6)");
            std::vector<std::uint32_t> current;
            enumerate_supports(m, s, current, 0, out);
            return out;
        }
        case features::SamplingMode::MonteCarlo: {
            out.reserve(count);
            for (std::size_t i = 0; i < count; ++i) out.push_back(random_support(m, s, rng));
            return out;
        }
        case features::SamplingMode::TargetedPair: {
            if (!target) throw std::invalid_argument("targeted mode requires a pair");
            auto [k1, k2] = *target;
            if (k1 == k2 || k1 >= m || k2 >= m)
                throw std::invalid_argument("targeted mode: bad pair");
            if (s < 2) throw std::invalid_argument("targeted mode: s >= 2");
            out.reserve(count);
            for (std::size_t i = 0; i < count; ++i) {
                std::vector<std::uint32_t> idx = {k1, k2};
                while (idx.size() < s) {
                    auto k = static_cast<std::uint32_t>(rng.next_below(m));
                    if (k == k1 || k == k2) continue;
                    if (std::find(idx.begin(), idx.end(), k) != idx.end()) continue;
                    idx.push_back(k);
                }
                out.emplace_back(m, std::move(idx));
            }
            return out;
        }
        case features::SamplingMode::TargetedTuple:
            throw std::invalid_argument("targeted tuple sampling goes through the uand module");
    }
    return out;
}

} // namespace sbmlp::harness
