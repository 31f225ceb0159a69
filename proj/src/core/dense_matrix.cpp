#include "sbmlp/dense_matrix.hpp"

#include <cmath>
#include <stdexcept>

#include "sbmlp/kernels.hpp"

namespace sbmlp::core {

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t.at(c, r) = at(r, c);
    return t;
}

bool DenseMatrix::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

void DenseMatrix::check_finite(const char* what) const {
    if (!all_finite()) throw std::runtime_error(std::string("non-finite entries in ") + what);
}

std::vector<double> matvec(const DenseMatrix& m, const std::vector<double>& x) {
    if (x.size() != m.cols()) throw std::invalid_argument("matvec: dimension mismatch");
    std::vector<double> y(m.rows());
    kernels::gemv(m.data(), m.rows(), m.cols(), x.data(), y.data());
    return y;
}

std::vector<double> matvec_t(const DenseMatrix& m, const std::vector<double>& x) {
    if (x.size() != m.rows()) throw std::invalid_argument("matvec_t: dimension mismatch");
    std::vector<double> y(m.cols());
    kernels::gemv_t(m.data(), m.rows(), m.cols(), x.data(), y.data());
    return y;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: dimension mismatch");
    DenseMatrix c(a.rows(), b.cols());
    kernels::gemm(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
    return c;
}

double clamp_probability(double p) {
    if (p < 0.0) return 0.0;
    if (p > 1.0) return 1.0;
    return p;
}

DenseMatrix sample_bernoulli_matrix(std::size_t rows, std::size_t cols, double p, RngStream& rng) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("bernoulli: p outside [0,1]");
    DenseMatrix m(rows, cols);
    double* d = m.data();
    for (std::size_t i = 0; i < m.size(); ++i) d[i] = rng.next_bernoulli(p) ? 1.0 : 0.0;
    return m;
}

DenseMatrix sample_ternary_matrix(std::size_t rows, std::size_t cols, double p, RngStream& rng) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("ternary: p outside [0,1]");
    DenseMatrix m(rows, cols);
    double* d = m.data();
    for (std::size_t i = 0; i < m.size(); ++i) d[i] = static_cast<double>(rng.next_ternary(p));
    return m;
}

DenseMatrix sample_gaussian_matrix(std::size_t rows, std::size_t cols, double variance,
                                   RngStream& rng) {
    if (!(variance > 0.0)) throw std::invalid_argument("gaussian: variance must be positive");
    DenseMatrix m(rows, cols);
    double sd = std::sqrt(variance);
    double* d = m.data();
    for (std::size_t i = 0; i < m.size(); ++i) d[i] = sd * rng.next_gaussian();
    m.check_finite("gaussian sample");
    return m;
}

} // namespace sbmlp::core
