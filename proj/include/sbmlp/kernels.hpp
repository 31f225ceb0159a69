#pragma once
// Dense double-precision kernels with a scalar reference implementation and an
// AVX2 variant selected at runtime. Both variants implement identical IEEE
// operation orders so results are bit-identical:
//   - reductions (dot, sum, max_abs) accumulate into 4 lanes, lane j holding
//     elements with index ≡ j (mod 4), combined as (s0+s1)+(s2+s3), then the
//     scalar tail (i >= 4*(n/4)) is folded in left to right;
//   - elementwise ops (axpy, scale, relu) have no reduction order at all;
//   - gemm accumulates C[i,:] += A[i,k]*B[k,:] in ascending k.
// FMA is never used (and -ffp-contract=off keeps the compiler from fusing).

#include <cstddef>

namespace sbmlp::kernels {

enum class Impl { Scalar, Avx2 };

Impl active_impl();
// Force a specific implementation (tests use this to cross-check variants).
// Returns false if the requested variant is unsupported on this CPU.
bool set_impl(Impl impl);
const char* impl_name(Impl impl);

double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double max_abs(const double* a, std::size_t n);

// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
void relu(const double* x, double* y, std::size_t n);
void relu_inplace(double* x, std::size_t n);

// y = M x, M row-major (rows x cols); y must not alias x.
void gemv(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y);
// y = M^T x (y has cols entries); axpy-based over rows of M.
void gemv_t(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y);
// C = A * B (+ C if accumulate), all row-major; A: m x k, B: k x n, C: m x n.
void gemm(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n,
          bool accumulate = false);

} // namespace sbmlp::kernels
