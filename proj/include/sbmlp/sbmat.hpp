#pragma once
// SBMAT v1: header line "SBMAT v1 <rows> <cols>\n" followed by rows*cols
// row-major little-endian 64-bit floats. Round trip is bit-exact. The CSV
// export is lossless via shortest round-trip decimal formatting.

#include <string>

#include "sbmlp/dense_matrix.hpp"

namespace sbmlp::core {

void write_sbmat(const std::string& path, const DenseMatrix& m);
DenseMatrix read_sbmat(const std::string& path);

void write_matrix_csv(const std::string& path, const DenseMatrix& m);
DenseMatrix read_matrix_csv(const std::string& path);

// Shortest decimal string that round-trips the exact double.
std::string format_double(double v);

} // namespace sbmlp::core
