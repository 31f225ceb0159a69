#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <thread>

#include "doctest.h"
#include "sbmlp/activations.hpp"
#include "sbmlp/dense_matrix.hpp"
#include "sbmlp/mlp_network.hpp"
#include "sbmlp/rng.hpp"
#include "sbmlp/sbmat.hpp"

using namespace sbmlp;
using core::DenseMatrix;
using core::RngStream;

TEST_CASE("rng streams are reproducible and splittable") {
    RngStream a(42, 3);
    RngStream b(42, 3);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    // Different stream ids decorrelate.
    RngStream c(42, 4);
    int same = 0;
    RngStream a2(42, 3);
    for (int i = 0; i < 64; ++i) same += (a2.next_u64() == c.next_u64());
    CHECK(same == 0);

    // Derived sub-streams match regardless of the thread that runs them.
    RngStream parent(9, 0);
    auto seq_of = [](RngStream s) {
        std::vector<std::uint64_t> v(16);
        for (auto& x : v) x = s.next_u64();
        return v;
    };
    auto direct = seq_of(parent.derive(7));
    std::vector<std::uint64_t> threaded;
    std::thread t([&] { threaded = seq_of(parent.derive(7)); });
    t.join();
    CHECK(direct == threaded);
}

TEST_CASE("rng uniforms and gaussians look right") {
    RngStream rng(1, 0);
    double acc = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) acc += rng.next_double();
    CHECK(std::abs(acc / n - 0.5) < 0.005);

    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        double g = rng.next_gaussian();
        sum += g;
        sq += g * g;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sq / n - 1.0) < 0.02);
}

TEST_CASE("bernoulli sampler density") {
    RngStream rng(2, 0);
    auto zero = core::sample_bernoulli_matrix(10, 10, 0.0, rng);
    auto one = core::sample_bernoulli_matrix(10, 10, 1.0, rng);
    CHECK(core::matvec(zero, std::vector<double>(10, 1.0)) == std::vector<double>(10, 0.0));
    for (double v : one.storage()) CHECK(v == 1.0);

    // p=0.5 over 1e6 entries: binomial 99.9% interval is 0.5 +- 0.002.
    auto m = core::sample_bernoulli_matrix(1000, 1000, 0.5, rng);
    double density = 0.0;
    for (double v : m.storage()) density += v;
    density /= static_cast<double>(m.size());
    CHECK(std::abs(density - 0.5) < 0.002);
}

TEST_CASE("ternary sampler moments") {
    RngStream rng(3, 0);
    auto zero = core::sample_ternary_matrix(10, 10, 0.0, rng);
    for (double v : zero.storage()) CHECK(v == 0.0);

    // p=1: entries +-1, mean 0 +- 0.004 over 1e6 entries (CLT interval).
    auto pm = core::sample_ternary_matrix(1000, 1000, 1.0, rng);
    double mean = 0.0;
    for (double v : pm.storage()) {
        CHECK(std::abs(v) == 1.0);
        mean += v;
    }
    mean /= static_cast<double>(pm.size());
    CHECK(std::abs(mean) < 0.004);

    // p = 2/sqrt(ds) with d=s=4 gives p=0.5; nonzero density 0.5 +- 0.01 at 1e6.
    double p = core::clamp_probability(2.0 / std::sqrt(4.0 * 4.0));
    CHECK(p == 0.5);
    auto t = core::sample_ternary_matrix(1000, 1000, p, rng);
    double nz = 0.0;
    for (double v : t.storage()) nz += (v != 0.0);
    nz /= static_cast<double>(t.size());
    CHECK(std::abs(nz - 0.5) < 0.01);
}

TEST_CASE("gaussian sampler variance and row norms") {
    RngStream rng(4, 0);
    auto m = core::sample_gaussian_matrix(1000, 1000, 1.0, rng);
    double sq = 0.0;
    for (double v : m.storage()) sq += v * v;
    sq /= static_cast<double>(m.size());
    CHECK(std::abs(sq - 1.0) < 0.01); // chi-square interval at 1e6 samples

    CHECK_THROWS_AS(core::sample_gaussian_matrix(2, 2, 0.0, rng), std::invalid_argument);

    // Row of N(0, 1/d) at d=4096 has norm 1 +- 0.1.
    const std::size_t d = 4096;
    auto row = core::sample_gaussian_matrix(8, d, 1.0 / static_cast<double>(d), rng);
    for (std::size_t r = 0; r < row.rows(); ++r) {
        double n2 = 0.0;
        for (std::size_t c = 0; c < d; ++c) n2 += row.at(r, c) * row.at(r, c);
        CHECK(std::abs(std::sqrt(n2) - 1.0) < 0.1);
    }
}

TEST_CASE("relu basics") {
    std::vector<double> x = {-1.0, 0.5, 0.0, 1.0 + 1.0 - 1.0};
    auto y = core::relu(x);
    CHECK(y[0] == 0.0);
    CHECK(y[1] == 0.5);
    CHECK(y[2] == 0.0);
    CHECK(y[3] == 1.0); // ReLU(x1 + x2 - 1) realizes AND(1,1)=1
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(y[i] >= 0.0);
        CHECK(y[i] >= x[i] - std::abs(x[i]));
    }
}

TEST_CASE("staircase round values and range") {
    CHECK(core::staircase_round(1.0, 2) == doctest::Approx(1.0));
    CHECK(core::staircase_round(0.2, 2) == doctest::Approx(0.0));
    // piecewise formula at 0.5: 3(ReLU(0.5-1/3) - ReLU(0.5-2/3)) = 0.5
    CHECK(core::staircase_round(0.5, 2) == doctest::Approx(0.5));
    CHECK(core::staircase_round(2.9, 2) == doctest::Approx(2.0));
    CHECK(core::staircase_round(-2.9, 2) == doctest::Approx(-2.0));
    CHECK_THROWS_AS(core::staircase_round(0.0, 0), std::invalid_argument);

    // round(n + delta) = n for |delta| <= 0.33, grid-enumerated.
    for (int a : {1, 2, 3}) {
        for (int n = -a; n <= a; ++n)
            for (double delta = -0.33; delta <= 0.3301; delta += 0.01) {
                CHECK(core::staircase_round(n + delta, a) ==
                      doctest::Approx(static_cast<double>(n)).epsilon(1e-12));
            }
        // range clamp
        for (double x = -a - 2.0; x <= a + 2.0; x += 0.0173) {
            double v = core::staircase_round(x, a);
            CHECK(v >= -a - 1e-12);
            CHECK(v <= a + 1e-12);
        }
    }
}

TEST_CASE("staircase as explicit 4a-ReLU sum matches closed form") {
    for (int a : {1, 2, 4}) {
        auto s = core::staircase_as_relus(a);
        CHECK(s.coeff.size() == static_cast<std::size_t>(4 * a));
        for (double x = -a - 2.0; x <= a + 2.0; x += 0.003) {
            CHECK(std::abs(s.eval(x) - core::staircase_round(x, a)) < 1e-12);
        }
    }
}

TEST_CASE("sbmat round trip is bit exact") {
    RngStream rng(6, 0);
    auto m = core::sample_gaussian_matrix(17, 23, 2.0, rng);
    m.at(0, 0) = 0.1 + 0.2; // not exactly representable sums welcome
    m.at(1, 1) = -0.0;
    auto dir = std::filesystem::temp_directory_path() / "sbmlp_core_test";
    std::filesystem::create_directories(dir);
    auto bin = (dir / "m.sbmat").string();
    auto csv = (dir / "m.csv").string();

    core::write_sbmat(bin, m);
    auto m2 = core::read_sbmat(bin);
    CHECK(m2.rows() == m.rows());
    CHECK(m2.cols() == m.cols());
    CHECK(std::memcmp(m.data(), m2.data(), m.size() * 8) == 0);

    core::write_matrix_csv(csv, m);
    auto m3 = core::read_matrix_csv(csv);
    CHECK(std::memcmp(m.data(), m3.data(), m.size() * 8) == 0);
}

TEST_CASE("mlp network evaluates layer stack") {
    core::MlpNetwork net;
    DenseMatrix w1(2, 2);
    w1.at(0, 0) = 1.0;
    w1.at(0, 1) = 1.0;
    w1.at(1, 0) = -1.0;
    w1.at(1, 1) = 1.0;
    net.add_layer({w1, {-1.0, 0.0}, core::ActivationKind::relu()});
    auto out = net.eval({1.0, 1.0});
    CHECK(out[0] == 1.0); // AND via ReLU(x1+x2-1)
    CHECK(out[1] == 0.0);

    DenseMatrix batch(2, 3);
    batch.at(0, 0) = 1.0; batch.at(1, 0) = 1.0;
    batch.at(0, 1) = 1.0; batch.at(1, 1) = 0.0;
    auto res = net.eval_batch(batch);
    CHECK(res.at(0, 0) == 1.0);
    CHECK(res.at(0, 1) == 0.0);
    CHECK(res.at(0, 2) == 0.0);
}

TEST_CASE("staircase layer expansion yields a pure-ReLU network") {
    core::RngStream rng(8, 0);
    core::MlpNetwork net;
    auto w1 = core::sample_gaussian_matrix(6, 4, 1.0, rng);
    auto b1 = std::vector<double>{0.1, -0.2, 0.3, 0.0, 0.5, -0.4};
    net.add_layer({w1, b1, core::ActivationKind::staircase(2)});
    auto w2 = core::sample_gaussian_matrix(3, 6, 1.0, rng);
    net.add_layer({w2, {0.0, 0.0, 0.0}, core::ActivationKind::relu()});
    auto w3 = core::sample_gaussian_matrix(2, 3, 1.0, rng);
    net.add_layer({w3, {0.1, 0.2}, core::ActivationKind::staircase(1)});

    core::DenseMatrix readout = core::sample_gaussian_matrix(2, 2, 1.0, rng);
    core::DenseMatrix folded = readout;
    auto pure = core::expand_staircase_layers(net, &folded);
    CHECK(pure.depth() == net.depth());
    for (const auto& layer : pure.layers())
        CHECK(layer.act.kind == core::ActivationKind::Relu);

    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> x(4);
        for (auto& v : x) v = 2.5 * (rng.next_double() - 0.5);
        auto direct = core::matvec(readout, net.eval(x));
        auto expanded = core::matvec(folded, pure.eval(x));
        REQUIRE(direct.size() == expanded.size());
        for (std::size_t i = 0; i < direct.size(); ++i)
            CHECK(direct[i] == doctest::Approx(expanded[i]).epsilon(1e-9));
    }
}
