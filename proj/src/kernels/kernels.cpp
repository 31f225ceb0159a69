#include "sbmlp/kernels.hpp"

namespace sbmlp::kernels {

namespace detail {
double dot_scalar(const double*, const double*, std::size_t);
double sum_scalar(const double*, std::size_t);
double max_abs_scalar(const double*, std::size_t);
void axpy_scalar(double, const double*, double*, std::size_t);
void scale_scalar(double, double*, std::size_t);
void relu_scalar(const double*, double*, std::size_t);
void gemv_scalar(const double*, std::size_t, std::size_t, const double*, double*);
void gemv_t_scalar(const double*, std::size_t, std::size_t, const double*, double*);
void gemm_scalar(const double*, const double*, double*, std::size_t, std::size_t, std::size_t, bool);

#if defined(__x86_64__) || defined(_M_X64)
double dot_avx2(const double*, const double*, std::size_t);
double sum_avx2(const double*, std::size_t);
double max_abs_avx2(const double*, std::size_t);
void axpy_avx2(double, const double*, double*, std::size_t);
void scale_avx2(double, double*, std::size_t);
void relu_avx2(const double*, double*, std::size_t);
void gemv_avx2(const double*, std::size_t, std::size_t, const double*, double*);
void gemv_t_avx2(const double*, std::size_t, std::size_t, const double*, double*);
void gemm_avx2(const double*, const double*, double*, std::size_t, std::size_t, std::size_t, bool);
#endif
} // namespace detail

namespace {

struct Table {
    double (*dot)(const double*, const double*, std::size_t);
    double (*sum)(const double*, std::size_t);
    double (*max_abs)(const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*scale)(double, double*, std::size_t);
    void (*relu)(const double*, double*, std::size_t);
    void (*gemv)(const double*, std::size_t, std::size_t, const double*, double*);
    void (*gemv_t)(const double*, std::size_t, std::size_t, const double*, double*);
    void (*gemm)(const double*, const double*, double*, std::size_t, std::size_t, std::size_t, bool);
};

constexpr Table kScalar = {
    detail::dot_scalar,  detail::sum_scalar,    detail::max_abs_scalar,
    detail::axpy_scalar, detail::scale_scalar,  detail::relu_scalar,
    detail::gemv_scalar, detail::gemv_t_scalar, detail::gemm_scalar,
};

#if defined(__x86_64__) || defined(_M_X64)
constexpr Table kAvx2 = {
    detail::dot_avx2,  detail::sum_avx2,    detail::max_abs_avx2,
    detail::axpy_avx2, detail::scale_avx2,  detail::relu_avx2,
    detail::gemv_avx2, detail::gemv_t_avx2, detail::gemm_avx2,
};
#endif

bool avx2_supported() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Impl pick_default() { return avx2_supported() ? Impl::Avx2 : Impl::Scalar; }

Impl g_impl = pick_default();
const Table* g_table =
#if defined(__x86_64__) || defined(_M_X64)
    avx2_supported() ? &kAvx2 : &kScalar;
#else
    &kScalar;
#endif

} // namespace

Impl active_impl() { return g_impl; }

bool set_impl(Impl impl) {
    if (impl == Impl::Avx2) {
#if defined(__x86_64__) || defined(_M_X64)
        if (!avx2_supported()) return false;
        g_impl = Impl::Avx2;
        g_table = &kAvx2;
        return true;
#else
        return false;
#endif
    }
    g_impl = Impl::Scalar;
    g_table = &kScalar;
    return true;
}

const char* impl_name(Impl impl) { return impl == Impl::Avx2 ? "avx2" : "scalar"; }

double dot(const double* a, const double* b, std::size_t n) { return g_table->dot(a, b, n); }
double sum(const double* a, std::size_t n) { return g_table->sum(a, n); }
double max_abs(const double* a, std::size_t n) { return g_table->max_abs(a, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) { g_table->axpy(alpha, x, y, n); }
void scale(double alpha, double* x, std::size_t n) { g_table->scale(alpha, x, n); }
void relu(const double* x, double* y, std::size_t n) { g_table->relu(x, y, n); }
void relu_inplace(double* x, std::size_t n) { g_table->relu(x, x, n); }
void gemv(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y) {
    g_table->gemv(m, rows, cols, x, y);
}
void gemv_t(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y) {
    g_table->gemv_t(m, rows, cols, x, y);
}
void gemm(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n,
          bool accumulate) {
    g_table->gemm(a, b, c, m, k, n, accumulate);
}

} // namespace sbmlp::kernels
