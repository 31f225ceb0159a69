#include <array>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "sbmlp/kernels.hpp"
#include "sbmlp/rng.hpp"

using namespace sbmlp;

namespace {

std::vector<double> random_vec(std::size_t n, core::RngStream& rng, double scale = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = scale * (rng.next_double() * 2.0 - 1.0);
    return v;
}

bool bits_equal(double a, double b) { return std::memcmp(&a, &b, 8) == 0; }

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    return std::memcmp(a.data(), b.data(), a.size() * 8) == 0;
}

} // namespace

TEST_CASE("scalar and avx2 variants agree bitwise") {
    if (!kernels::set_impl(kernels::Impl::Avx2)) {
        MESSAGE("avx2 unavailable, dispatch check skipped");
        return;
    }
    core::RngStream rng(7, 0);
    for (std::size_t n : {0ul, 1ul, 2ul, 3ul, 4ul, 5ul, 7ul, 8ul, 14ul, 63ul, 64ul, 257ul, 4096ul}) {
        auto a = random_vec(n, rng, 3.0);
        auto b = random_vec(n, rng, 2.0);

        kernels::set_impl(kernels::Impl::Scalar);
        double dot_s = kernels::dot(a.data(), b.data(), n);
        double sum_s = kernels::sum(a.data(), n);
        double max_s = kernels::max_abs(a.data(), n);
        auto relu_s = a;
        kernels::relu_inplace(relu_s.data(), n);
        auto axpy_s = b;
        kernels::axpy(1.7, a.data(), axpy_s.data(), n);

        kernels::set_impl(kernels::Impl::Avx2);
        double dot_v = kernels::dot(a.data(), b.data(), n);
        double sum_v = kernels::sum(a.data(), n);
        double max_v = kernels::max_abs(a.data(), n);
        auto relu_v = a;
        kernels::relu_inplace(relu_v.data(), n);
        auto axpy_v = b;
        kernels::axpy(1.7, a.data(), axpy_v.data(), n);

        CHECK(bits_equal(dot_s, dot_v));
        CHECK(bits_equal(sum_s, sum_v));
        CHECK(bits_equal(max_s, max_v));
        CHECK(bits_equal(relu_s, relu_v));
        CHECK(bits_equal(axpy_s, axpy_v));
    }
    kernels::set_impl(kernels::Impl::Avx2);
}

TEST_CASE("gemv and gemm variants agree bitwise") {
    if (!kernels::set_impl(kernels::Impl::Avx2)) return;
    core::RngStream rng(11, 1);
    for (auto [m, k, n] : std::vector<std::array<std::size_t, 3>>{
             {1, 1, 1}, {3, 5, 2}, {8, 8, 8}, {13, 17, 9}, {32, 64, 24}}) {
        auto a = random_vec(m * k, rng);
        auto b = random_vec(k * n, rng);
        auto x = random_vec(k, rng);

        kernels::set_impl(kernels::Impl::Scalar);
        std::vector<double> y_s(m), yt_s(k), c_s(m * n);
        kernels::gemv(a.data(), m, k, x.data(), y_s.data());
        std::vector<double> xr = random_vec(m, rng);
        kernels::gemv_t(a.data(), m, k, xr.data(), yt_s.data());
        kernels::gemm(a.data(), b.data(), c_s.data(), m, k, n);

        kernels::set_impl(kernels::Impl::Avx2);
        std::vector<double> y_v(m), yt_v(k), c_v(m * n);
        kernels::gemv(a.data(), m, k, x.data(), y_v.data());
        kernels::gemv_t(a.data(), m, k, xr.data(), yt_v.data());
        kernels::gemm(a.data(), b.data(), c_v.data(), m, k, n);

        CHECK(bits_equal(y_s, y_v));
        CHECK(bits_equal(yt_s, yt_v));
        CHECK(bits_equal(c_s, c_v));
    }
    kernels::set_impl(kernels::Impl::Avx2);
}

TEST_CASE("reduction order is the documented 4-lane scheme") {
    // dot([1,2,3,4,5], ones) must equal ((1+5)+2)+(3+4) per the contract:
    // lanes get {1,5},{2},{3},{4}; combine (s0+s1)+(s2+s3); tail element 5
    // folds after the combine. Construct a case where order matters.
    std::vector<double> a = {1.0, 1e16, -1e16, 1.0, 1.0};
    std::vector<double> ones(a.size(), 1.0);
    // lanes: s0=1+..., with n=5: i=0..3 vectorized, tail=4.
    double expect = ((1.0 + 1e16) + (-1e16 + 1.0)) + 1.0;
    CHECK(bits_equal(kernels::dot(a.data(), ones.data(), a.size()), expect));
    CHECK(bits_equal(kernels::sum(a.data(), a.size()), expect));
}

TEST_CASE("gemm matches a naive triple loop") {
    core::RngStream rng(5, 2);
    std::size_t m = 9, k = 7, n = 11;
    auto a = random_vec(m * k, rng);
    auto b = random_vec(k * n, rng);
    std::vector<double> c(m * n);
    kernels::gemm(a.data(), b.data(), c.data(), m, k, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t p = 0; p < k; ++p) s += a[i * k + p] * b[p * n + j];
            CHECK(c[i * n + j] == doctest::Approx(s).epsilon(1e-13));
        }
}
