#include "sbmlp/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

// AVX2 variants. Lane j of a __m256d accumulator holds exactly the elements
// the scalar reference assigns to its j-th partial sum, so results match the
// scalar kernels bit for bit. No FMA: mul then add, as in the reference.

#define SBMLP_AVX2 __attribute__((target("avx2")))

namespace sbmlp::kernels::detail {

SBMLP_AVX2 static inline double hsum_fixed(__m256d acc) {
    // (s0+s1) + (s2+s3), matching the scalar combine order.
    __m128d lo = _mm256_castpd256_pd128(acc);
    __m128d hi = _mm256_extractf128_pd(acc, 1);
    __m128d lo_sum = _mm_add_sd(lo, _mm_unpackhi_pd(lo, lo));
    __m128d hi_sum = _mm_add_sd(hi, _mm_unpackhi_pd(hi, hi));
    return _mm_cvtsd_f64(_mm_add_sd(lo_sum, hi_sum));
}

SBMLP_AVX2 double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d va = _mm256_loadu_pd(a + i);
        __m256d vb = _mm256_loadu_pd(b + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(va, vb));
    }
    double s = hsum_fixed(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

SBMLP_AVX2 double sum_avx2(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
    double s = hsum_fixed(acc);
    for (; i < n; ++i) s += a[i];
    return s;
}

SBMLP_AVX2 double max_abs_avx2(const double* a, std::size_t n) {
    const __m256d mask = _mm256_set1_pd(-0.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_andnot_pd(mask, _mm256_loadu_pd(a + i));
        acc = _mm256_max_pd(acc, v);
    }
    double lanes[4];
    _mm256_storeu_pd(lanes, acc);
    double m = (lanes[0] > lanes[1] ? lanes[0] : lanes[1]);
    double mb = (lanes[2] > lanes[3] ? lanes[2] : lanes[3]);
    if (mb > m) m = mb;
    for (; i < n; ++i) {
        double v = a[i] < 0 ? -a[i] : a[i];
        if (v > m) m = v;
    }
    return m;
}

SBMLP_AVX2 void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        __m256d vx = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

SBMLP_AVX2 void scale_avx2(double alpha, double* x, std::size_t n) {
    __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= alpha;
}

SBMLP_AVX2 void relu_avx2(const double* x, double* y, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
    for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

SBMLP_AVX2 void gemv_avx2(const double* m, std::size_t rows, std::size_t cols, const double* x,
                          double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot_avx2(m + r * cols, x, cols);
}

SBMLP_AVX2 void gemv_t_avx2(const double* m, std::size_t rows, std::size_t cols, const double* x,
                            double* y) {
    for (std::size_t j = 0; j < cols; ++j) y[j] = 0.0;
    for (std::size_t r = 0; r < rows; ++r) axpy_avx2(x[r], m + r * cols, y, cols);
}

SBMLP_AVX2 void gemm_avx2(const double* a, const double* b, double* c, std::size_t m,
                          std::size_t k, std::size_t n, bool accumulate) {
    if (!accumulate)
        for (std::size_t i = 0; i < m * n; ++i) c[i] = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double* crow = c + i * n;
        const double* arow = a + i * k;
        for (std::size_t p = 0; p < k; ++p) {
            double av = arow[p];
            if (av == 0.0) continue;
            axpy_avx2(av, b + p * n, crow, n);
        }
    }
}

} // namespace sbmlp::kernels::detail

#endif // x86_64
