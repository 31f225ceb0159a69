#include <cmath>

#include "doctest.h"
#include "sbmlp/error_correction.hpp"
#include "sbmlp/kernels.hpp"
#include "sbmlp/norm_balancer.hpp"

using namespace sbmlp;
using features::BooleanVector;

namespace {

BooleanVector random_sparse(std::size_t m, std::size_t s, core::RngStream& rng) {
    std::vector<std::uint32_t> idx;
    while (idx.size() < s) {
        auto k = static_cast<std::uint32_t>(rng.next_below(m));
        if (std::find(idx.begin(), idx.end(), k) == idx.end()) idx.push_back(k);
    }
    return BooleanVector(m, idx);
}

} // namespace

TEST_CASE("error correction recovers clean encodings") {
    const std::size_t m = 256, d = 2048, s = 3;
    core::RngStream dict_rng(81, 0);
    auto dict = features::random_unit_dictionary(m, d, dict_rng);
    core::RngStream ec_rng(81, 1);
    auto ec = ecc::build_error_correction(m, d, s,
                                          features::ReadoffMatrix{dict.phi_t(), std::nullopt},
                                          ec_rng);
    CHECK(ec.params().p == doctest::Approx(1.0 / std::sqrt(double(d) * double(s))));
    CHECK(ec.params().scalar == doctest::Approx(std::pow(double(s) / double(d), 0.25)));

    // all-zero input -> all-zero output
    auto zero = ec.apply(std::vector<double>(d, 0.0));
    for (double v : zero) CHECK(v == 0.0);

    core::RngStream sample_rng(81, 2);
    double worst = 0.0;
    for (int trial = 0; trial < 40; ++trial) {
        auto b = random_sparse(m, s, sample_rng);
        if (ec.collision_count(b) > 0) continue; // collision-free draws only here
        auto x = features::encode(dict, b);
        auto y = ec.apply(x);
        auto feats = ec.readoff().read_all(y);
        for (std::size_t k = 0; k < m; ++k)
            worst = std::max(worst, std::abs(feats[k] - (b.get(k) ? 1.0 : 0.0)));
    }
    // dictionary self-interference floor: a few overlap quanta of 1/|Gamma_k|
    CHECK(worst < 0.35);
    CHECK(worst > 0.0);
}

TEST_CASE("collision rate tracks s^1.5 / d^1.5") {
    const std::size_t m = 2048, s = 4;
    core::RngStream rng(82, 0);
    for (std::size_t d : {512u, 1024u, 2048u}) {
        core::RngStream ec_rng = rng.derive(d);
        auto id = features::identity_dictionary(m);
        auto ec = ecc::build_error_correction(m, d, s,
                                              features::ReadoffMatrix{id.phi(), std::nullopt},
                                              ec_rng);
        core::RngStream sample_rng = rng.derive(d + 1);
        std::size_t collisions = 0, inputs = 400;
        for (std::size_t i = 0; i < inputs; ++i)
            collisions += ec.collision_count(random_sparse(m, s, sample_rng));
        double rate = static_cast<double>(collisions) /
                      (static_cast<double>(inputs) * static_cast<double>(d));
        double predicted = std::pow(static_cast<double>(s), 1.5) /
                           (6.0 * std::pow(static_cast<double>(d), 1.5));
        // order-of-magnitude agreement with the C(s,3) p^3 expectation
        CHECK(rate < 20.0 * predicted + 1e-7);
        CHECK(rate > predicted / 20.0 - 1e-7);
    }
}

TEST_CASE("integer lattice fidelity on a dense grid") {
    // Any pre-round coordinate within 1/3 of an integer in [-2,2] lands
    // exactly on that integer.
    std::size_t count = 0;
    for (int n = -2; n <= 2; ++n)
        for (double delta = -0.333; delta <= 0.333; delta += 0.333 / 10000.0) {
            double rounded = core::staircase_round(n + delta, 2);
            if (std::abs(rounded - n) > 1e-12) ++count;
        }
    CHECK(count == 0);
}

TEST_CASE("contraction holds where the window is open (m < d)") {
    const std::size_t m = 256, d = 4096, s = 4;
    core::RngStream dict_rng(83, 0);
    auto dict = features::random_unit_dictionary(m, d, dict_rng);
    core::RngStream ec_rng(83, 1);
    auto ec = ecc::build_error_correction(m, d, s,
                                          features::ReadoffMatrix{dict.phi_t(), std::nullopt},
                                          ec_rng);
    core::RngStream trial_rng(83, 2);
    auto b = random_sparse(m, s, trial_rng);
    double noise = 0.3; // well above the output floor, below the 1/3 cell size
    auto res = ecc::apply_and_measure_contraction(ec, dict, b, noise, 60, trial_rng);
    CHECK(res.median_eps_in >= noise); // injected plus coherence
    CHECK(res.median_eps_out < res.median_eps_in);
    CHECK(res.intrinsic_floor < noise);
}

TEST_CASE("noise with per-feature error >= 1/3 risks flipped cells") {
    // Documented failure mode: rounding only guarantees within 1/3.
    const std::size_t m = 64, d = 1024, s = 3;
    core::RngStream dict_rng(84, 0);
    auto dict = features::random_unit_dictionary(m, d, dict_rng);
    core::RngStream ec_rng(84, 1);
    auto ec = ecc::build_error_correction(m, d, s,
                                          features::ReadoffMatrix{dict.phi_t(), std::nullopt},
                                          ec_rng);
    core::RngStream trial_rng(84, 2);
    auto b = random_sparse(m, s, trial_rng);
    auto res = ecc::apply_and_measure_contraction(ec, dict, b, 0.45, 40, trial_rng);
    CHECK(res.median_eps_out > 0.1); // correction demonstrably breaks down
}

TEST_CASE("contraction is monotone in d at fixed m, s") {
    const std::size_t m = 1024, s = 4;
    std::vector<double> medians;
    for (std::size_t d : {1024u, 2048u, 4096u}) {
        core::RngStream dict_rng(85, d);
        auto dict = features::random_unit_dictionary(m, d, dict_rng);
        core::RngStream ec_rng(85, d + 1);
        auto ec = ecc::build_error_correction(m, d, s,
                                              features::ReadoffMatrix{dict.phi_t(), std::nullopt},
                                              ec_rng);
        core::RngStream trial_rng(85, d + 2);
        auto b = random_sparse(m, s, trial_rng);
        auto res = ecc::apply_and_measure_contraction(ec, dict, b, 0.05, 40, trial_rng);
        medians.push_back(res.median_eps_out);
    }
    CHECK(medians[1] < medians[0]);
    CHECK(medians[2] < medians[1]);
}

TEST_CASE("idempotence: a second correction does not blow up") {
    const std::size_t m = 256, d = 2048, s = 3;
    core::RngStream dict_rng(86, 0);
    auto dict = features::random_unit_dictionary(m, d, dict_rng);
    core::RngStream ec1_rng(86, 1), ec2_rng(86, 2);
    auto ec1 = ecc::build_error_correction(m, d, s,
                                           features::ReadoffMatrix{dict.phi_t(), std::nullopt},
                                           ec1_rng);
    // Second layer consumes the first layer's output read-offs.
    auto ec2 = ecc::build_error_correction(m, d, s, ec1.readoff(), ec2_rng);

    core::RngStream sample_rng(86, 3);
    double single = 0.0, twice = 0.0;
    for (int trial = 0; trial < 30; ++trial) {
        auto b = random_sparse(m, s, sample_rng);
        auto x = features::encode(dict, b);
        auto y1 = ec1.apply(x);
        auto y2 = ec2.apply(y1);
        auto f1 = ec1.readoff().read_all(y1);
        auto f2 = ec2.readoff().read_all(y2);
        for (std::size_t k = 0; k < m; ++k) {
            double truth = b.get(k) ? 1.0 : 0.0;
            single = std::max(single, std::abs(f1[k] - truth));
            twice = std::max(twice, std::abs(f2[k] - truth));
        }
    }
    // The second application adds at most its own floor: no blow-up.
    CHECK(twice <= 2.0 * single + 1e-9);
}

TEST_CASE("f_pl endpoints and arc bound") {
    const double s0 = 64.0;
    for (std::size_t segments : {8u, 64u, 256u}) {
        CHECK(ecc::f_pl(0.0, s0, segments) == std::sqrt(s0));
        CHECK(ecc::f_pl(std::sqrt(s0), s0, segments) == 0.0);
        CHECK(ecc::f_pl(-std::sqrt(s0), s0, segments) == 0.0);
        double bound = 2.0 * M_PI * std::sqrt(s0) / static_cast<double>(segments);
        double worst = 0.0;
        for (double y = -std::sqrt(s0); y <= std::sqrt(s0); y += 0.001) {
            double exact = std::sqrt(std::max(0.0, s0 - y * y));
            worst = std::max(worst, std::abs(ecc::f_pl(y, s0, segments) - exact));
        }
        CHECK(worst <= bound);
    }
    CHECK_THROWS_AS(ecc::f_pl(0.0, 64.0, 3), std::invalid_argument);
}

TEST_CASE("norm balancer pins norms to sqrt(s0)") {
    const std::size_t d = 1024;
    const double s0 = 36.0;
    core::RngStream rng(87, 0);
    auto nb = ecc::build_norm_balancer(d, s0, d, rng);
    CHECK(nb.segments() == d);

    // At |a| = sqrt(s0) the idealized map adds f_pl(|a|) v = 0: the semicircle
    // root sits exactly at the knot. (The composed network is only meant to
    // operate at |a| well inside the radius, where the edge arcs' steep slopes
    // never see the N(a) estimation noise.)
    CHECK(ecc::f_pl(std::sqrt(s0), s0, nb.segments()) == 0.0);

    // a = 0: output norm = f_pl(0) |v| = sqrt(s0) exactly (v is unit).
    auto from_zero = nb.balance(std::vector<double>(d, 0.0));
    double n0 = std::sqrt(kernels::dot(from_zero.data(), from_zero.data(), d));
    CHECK(n0 == doctest::Approx(std::sqrt(s0)).epsilon(1e-12));

    core::RngStream in_rng(87, 1);
    double worst_rel = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        // |a| uniform in [0, sqrt(s0)/sqrt(2)] along random directions.
        std::vector<double> a(d);
        for (auto& v : a) v = in_rng.next_gaussian();
        double norm = std::sqrt(kernels::dot(a.data(), a.data(), d));
        double target = in_rng.next_double() * std::sqrt(s0 / 2.0);
        kernels::scale(target / norm, a.data(), d);
        auto bal = nb.balance(a);
        double bn = std::sqrt(kernels::dot(bal.data(), bal.data(), d));
        worst_rel = std::max(worst_rel, std::abs(bn - std::sqrt(s0)) / std::sqrt(s0));
    }
    double fitted_k = worst_rel * std::sqrt(static_cast<double>(d));
    MESSAGE("norm balancer concentration K = ", fitted_k);
    CHECK(worst_rel <= 8.0 / std::sqrt(static_cast<double>(d)));
}

TEST_CASE("norm balancer perturbs feature read-offs mildly") {
    const std::size_t d = 1024;
    const double s0 = 36.0;
    core::RngStream rng(88, 0);
    auto nb = ecc::build_norm_balancer(d, s0, d, rng);
    core::RngStream frng(88, 1);
    double total = 0.0;
    int count = 0;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> a(d, 0.0);
        for (int j = 0; j < 9; ++j) a[frng.next_below(d)] += 1.0; // |a| ~ 3
        auto out = nb.balance(a);
        std::vector<double> diff(d);
        for (std::size_t i = 0; i < d; ++i) diff[i] = out[i] - a[i];
        for (int f = 0; f < 20; ++f) {
            std::vector<double> phi(d);
            for (auto& v : phi) v = frng.next_gaussian();
            double n = std::sqrt(kernels::dot(phi.data(), phi.data(), d));
            kernels::scale(1.0 / n, phi.data(), d);
            total += std::abs(kernels::dot(phi.data(), diff.data(), d));
            ++count;
        }
    }
    double mean_pert = total / count;
    // Theta(sqrt(s0/d)) scale
    CHECK(mean_pert < 3.0 * std::sqrt(s0 / static_cast<double>(d)));
}

TEST_CASE("norm balancer mlp realization matches the direct path") {
    const std::size_t d = 96;
    const double s0 = 16.0;
    core::RngStream rng(89, 0);
    auto nb = ecc::build_norm_balancer(d, s0, 32, rng);
    auto mlp = nb.as_mlp();
    core::RngStream in_rng(89, 1);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<double> a(d);
        for (auto& v : a) v = 0.5 * in_rng.next_gaussian();
        auto direct = nb.balance(a);
        auto via_mlp = mlp.eval(a);
        for (std::size_t i = 0; i < d; ++i)
            CHECK(direct[i] == doctest::Approx(via_mlp[i]).epsilon(1e-9));
    }
}
