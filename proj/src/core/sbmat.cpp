#include "sbmlp/sbmat.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sbmlp::core {

namespace {

std::uint64_t to_le(double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
    return u;
}

double from_le(std::uint64_t u) {
    if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
    double v;
    std::memcpy(&v, &u, 8);
    return v;
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_sbmat(const std::string& path, const DenseMatrix& m) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    f << "SBMAT v1 " << m.rows() << " " << m.cols() << "\n";
    for (double v : m.storage()) {
        std::uint64_t u = to_le(v);
        f.write(reinterpret_cast<const char*>(&u), 8);
    }
    if (!f) throw std::runtime_error("write failed: " + path);
}

DenseMatrix read_sbmat(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for read: " + path);
    std::string header;
    std::getline(f, header);
    std::istringstream hs(header);
    std::string magic, version;
    std::size_t rows = 0, cols = 0;
    hs >> magic >> version >> rows >> cols;
    if (magic != "SBMAT" || version != "v1" || hs.fail())
        throw std::runtime_error("bad SBMAT header in " + path);
    DenseMatrix m(rows, cols);
    for (double& v : m.storage()) {
        std::uint64_t u;
        f.read(reinterpret_cast<char*>(&u), 8);
        if (!f) throw std::runtime_error("truncated SBMAT payload in " + path);
        v = from_le(u);
    }
    return m;
}

void write_matrix_csv(const std::string& path, const DenseMatrix& m) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    f << "# SBMAT v1 " << m.rows() << " " << m.cols() << "\n";
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c) f << ",";
            f << format_double(m.at(r, c));
        }
        f << "\n";
    }
}

DenseMatrix read_matrix_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open for read: " + path);
    std::string header;
    std::getline(f, header);
    std::istringstream hs(header);
    std::string hash, magic, version;
    std::size_t rows = 0, cols = 0;
    hs >> hash >> magic >> version >> rows >> cols;
    if (hash != "#" || magic != "SBMAT" || hs.fail())
        throw std::runtime_error("bad CSV matrix header in " + path);
    DenseMatrix m(rows, cols);
    std::string line;
    for (std::size_t r = 0; r < rows; ++r) {
        if (!std::getline(f, line)) throw std::runtime_error("truncated CSV matrix in " + path);
        const char* p = line.data();
        const char* end = line.data() + line.size();
        for (std::size_t c = 0; c < cols; ++c) {
            double v;
            auto res = std::from_chars(p, end, v);
            if (res.ec != std::errc()) throw std::runtime_error("bad CSV value in " + path);
            m.at(r, c) = v;
            p = res.ptr;
            if (p < end && *p == ',') ++p;
        }
    }
    return m;
}

} // namespace sbmlp::core
