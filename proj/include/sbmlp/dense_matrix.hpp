#pragma once
#include <cstddef>
#include <vector>

#include "sbmlp/rng.hpp"

namespace sbmlp::core {

// Row-major dense matrix of 64-bit floats. All sampling and arithmetic keeps
// entries finite; check_finite() enforces it after construction paths.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* row(std::size_t r) { return data_.data() + r * cols_; }
    const double* row(std::size_t r) const { return data_.data() + r * cols_; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    std::vector<double>& storage() { return data_; }
    const std::vector<double>& storage() const { return data_; }

    DenseMatrix transposed() const;

    bool all_finite() const;
    void check_finite(const char* what) const; // throws std::runtime_error

    bool operator==(const DenseMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// y = M x
std::vector<double> matvec(const DenseMatrix& m, const std::vector<double>& x);
// y = M^T x
std::vector<double> matvec_t(const DenseMatrix& m, const std::vector<double>& x);
// C = A B
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

// i.i.d. samplers; probabilities are clamped to [0,1] by callers that derive
// them from formulas (see clamp_probability).
DenseMatrix sample_bernoulli_matrix(std::size_t rows, std::size_t cols, double p, RngStream& rng);
DenseMatrix sample_ternary_matrix(std::size_t rows, std::size_t cols, double p, RngStream& rng);
DenseMatrix sample_gaussian_matrix(std::size_t rows, std::size_t cols, double variance,
                                   RngStream& rng);

double clamp_probability(double p);

} // namespace sbmlp::core
