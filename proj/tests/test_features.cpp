#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "sbmlp/dictionary.hpp"
#include "sbmlp/kernels.hpp"
#include "sbmlp/verify.hpp"

using namespace sbmlp;
using features::BooleanVector;

TEST_CASE("boolean vector invariants") {
    BooleanVector b(8, {5, 2, 2, 7});
    CHECK(b.sparsity() == 3);
    CHECK(b.get(2));
    CHECK(b.get(5));
    CHECK(!b.get(0));
    CHECK_THROWS_AS(BooleanVector(4, {4}), std::invalid_argument);
}

TEST_CASE("dictionary kinds and coherence") {
    core::RngStream rng(21, 0);

    auto id = features::identity_dictionary(6);
    CHECK(id.coherence() == 0.0);
    CHECK(id.norm_deviation() == 0.0);

    auto ortho = features::orthonormal_dictionary(5, 9, rng);
    CHECK(ortho.coherence() == 0.0);
    CHECK(ortho.norm_deviation() == 0.0);

    auto single = features::random_unit_dictionary(1, 16, rng);
    CHECK(single.coherence() == 0.0); // no off-diagonal pairs

    auto dict = features::random_unit_dictionary(64, 256, rng);
    CHECK(dict.norm_deviation() < 1e-12);
    // cached mu equals a recomputed max |phi_k . phi_l|
    double mu = 0.0;
    for (std::size_t k = 0; k < dict.m(); ++k)
        for (std::size_t l = k + 1; l < dict.m(); ++l)
            mu = std::max(mu, std::abs(kernels::dot(dict.column(k), dict.column(l), dict.d())));
    CHECK(std::abs(mu - dict.coherence()) < 1e-12);
}

TEST_CASE("random unit dictionary coherence scale") {
    core::RngStream rng(22, 0);
    const std::size_t m = 4096, d = 1024;
    auto dict = features::random_unit_dictionary(m, d, rng);
    double bound = 6.0 * std::sqrt(std::log(static_cast<double>(m)) / static_cast<double>(d));
    CHECK(dict.coherence() <= bound);

    // Median |phi_k . phi_l| over >= 1e5 pairs stays under 3/sqrt(d).
    std::vector<double> dots;
    std::size_t count = 0;
    for (std::size_t k = 0; k < m && count < 120000; k += 7)
        for (std::size_t l = k + 1; l < m && count < 120000; l += 11) {
            dots.push_back(std::abs(kernels::dot(dict.column(k), dict.column(l), d)));
            ++count;
        }
    std::nth_element(dots.begin(), dots.begin() + dots.size() / 2, dots.end());
    CHECK(dots[dots.size() / 2] <= 3.0 / std::sqrt(static_cast<double>(d)));
}

TEST_CASE("encode") {
    core::RngStream rng(23, 0);
    auto id = features::identity_dictionary(5);
    auto a = features::encode(id, BooleanVector(5, {3}));
    CHECK(a == std::vector<double>{0, 0, 0, 1.0, 0});
    CHECK(features::encode(id, BooleanVector(5)) == std::vector<double>(5, 0.0));
    CHECK_THROWS_AS(features::encode(id, BooleanVector(4, {0})), std::invalid_argument);

    // || encode(b) || = sqrt(s) (1 +- mu s) for random dictionaries
    auto dict = features::random_unit_dictionary(128, 512, rng);
    const std::size_t s = 4;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::uint32_t> idx;
        while (idx.size() < s) {
            auto k = static_cast<std::uint32_t>(rng.next_below(128));
            if (std::find(idx.begin(), idx.end(), k) == idx.end()) idx.push_back(k);
        }
        auto a = features::encode(dict, BooleanVector(128, idx));
        double norm = std::sqrt(kernels::dot(a.data(), a.data(), a.size()));
        double root_s = std::sqrt(static_cast<double>(s));
        CHECK(std::abs(norm - root_s) <= root_s * dict.coherence() * s);
    }
}

TEST_CASE("verify_eps_linear exact and perturbed") {
    auto id = features::identity_dictionary(4);
    features::ReadoffMatrix r{id.phi(), std::nullopt};

    std::vector<std::pair<std::vector<double>, BooleanVector>> samples;
    samples.push_back({features::encode(id, BooleanVector(4, {1})), BooleanVector(4, {1})});
    samples.push_back({features::encode(id, BooleanVector(4, {0, 2})), BooleanVector(4, {0, 2})});
    auto rep = features::verify_eps_linear(samples, r, features::SamplingMode::Exhaustive);
    CHECK(rep.global_eps == 0.0);
    CHECK(rep.sample_count == 2);
    CHECK(rep.mode == features::SamplingMode::Exhaustive);

    // Perturb along r_k with ||r_k||^2 = 1: per-feature error exactly delta.
    const double delta = 0.125;
    auto a = features::encode(id, BooleanVector(4, {1}));
    a[3] += delta;
    auto rep2 = features::verify_eps_linear({{a, BooleanVector(4, {1})}}, r);
    CHECK(rep2.per_feature_max[3] == doctest::Approx(delta).epsilon(1e-15));
    CHECK(rep2.global_eps == doctest::Approx(delta).epsilon(1e-15));
}

TEST_CASE("global eps is monotone in the sample set") {
    auto id = features::identity_dictionary(3);
    features::ReadoffMatrix r{id.phi(), std::nullopt};
    core::RngStream rng(24, 0);
    std::vector<std::pair<std::vector<double>, BooleanVector>> samples;
    double prev = 0.0;
    for (int i = 0; i < 40; ++i) {
        std::vector<double> a = {rng.next_double(), rng.next_double(), rng.next_double()};
        samples.push_back({a, BooleanVector(3, {static_cast<std::uint32_t>(i % 3)})});
        double eps = features::verify_eps_linear(samples, r).global_eps;
        CHECK(eps >= prev - 1e-15);
        prev = eps;
    }
}

TEST_CASE("weak linear separation") {
    using Sample = std::pair<std::vector<double>, bool>;
    std::vector<Sample> samples = {{{1.0, 0.0}, true}, {{0.0, 0.5}, false}};
    auto res = features::verify_weak_linear(samples, {1.0, 0.0});
    CHECK(res.separated);
    CHECK(res.margin == doctest::Approx(1.0));

    std::vector<Sample> mixed = {{{1.0, 0.0}, true}, {{2.0, 0.0}, false}, {{1.5, 0.0}, true}};
    CHECK(!features::verify_weak_linear(mixed, {1.0, 0.0}).separated);

    std::vector<Sample> one_class = {{{1.0, 0.0}, true}};
    CHECK_THROWS_AS(features::verify_weak_linear(one_class, {1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("eps-linear below 1/2 implies weak separation with margin >= 1-2eps") {
    core::RngStream rng(25, 0);
    auto dict = features::random_unit_dictionary(24, 96, rng);
    features::ReadoffMatrix r{dict.phi_t(), std::nullopt};

    std::vector<std::pair<std::vector<double>, BooleanVector>> acts;
    for (int i = 0; i < 60; ++i) {
        std::vector<std::uint32_t> idx = {static_cast<std::uint32_t>(rng.next_below(24)),
                                          static_cast<std::uint32_t>(rng.next_below(24))};
        BooleanVector b(24, idx);
        acts.push_back({features::encode(dict, b), b});
    }
    auto rep = features::verify_eps_linear(acts, r);
    REQUIRE(rep.global_eps < 0.5);
    for (std::size_t k = 0; k < 24; ++k) {
        std::vector<std::pair<std::vector<double>, bool>> labeled;
        bool pos = false, neg = false;
        for (auto& [a, b] : acts) {
            labeled.push_back({a, b.get(k)});
            (b.get(k) ? pos : neg) = true;
        }
        if (!pos || !neg) continue;
        std::vector<double> dir(dict.d());
        for (std::size_t i = 0; i < dict.d(); ++i) dir[i] = r.r.at(k, i);
        auto w = features::verify_weak_linear(labeled, dir);
        CHECK(w.separated);
        CHECK(w.margin >= 1.0 - 2.0 * rep.global_eps - 1e-12);
    }
}

TEST_CASE("relu-linear expected l2 error") {
    auto id = features::identity_dictionary(3);
    features::ReadoffMatrix r{id.phi(), std::nullopt};
    std::vector<std::pair<std::vector<double>, BooleanVector>> exact = {
        {{1.0, 0.0, 0.0}, BooleanVector(3, {0})}};
    CHECK(features::verify_relu_linear(exact, r) == 0.0);

    // Negative interference is killed by the ReLU.
    std::vector<std::pair<std::vector<double>, BooleanVector>> neg = {
        {{1.0, -0.3, 0.0}, BooleanVector(3, {0})}};
    CHECK(features::verify_relu_linear(neg, r) == 0.0);

    // Positive interference delta on one off-feature in every sample: error delta.
    const double delta = 0.2;
    std::vector<std::pair<std::vector<double>, BooleanVector>> pos = {
        {{1.0, delta, 0.0}, BooleanVector(3, {0})},
        {{0.0, delta, 1.0}, BooleanVector(3, {2})}};
    CHECK(features::verify_relu_linear(pos, r) == doctest::Approx(delta).epsilon(1e-12));
}

TEST_CASE("dictionary sidecar round trip") {
    core::RngStream rng(26, 0);
    auto dict = features::random_unit_dictionary(24, 64, rng);
    auto base = (std::filesystem::temp_directory_path() / "sbmlp_dict_io").string();
    features::save_dictionary(base, dict, 26);
    auto loaded = features::load_dictionary(base);
    CHECK(loaded.m() == dict.m());
    CHECK(loaded.d() == dict.d());
    CHECK(loaded.kind_name() == dict.kind_name());
    CHECK(loaded.phi() == dict.phi());
    CHECK(std::abs(loaded.coherence() - dict.coherence()) < 1e-12);
}
