#include "sbmlp/rng.hpp"

#include <cmath>

namespace sbmlp::core {

double RngStream::next_gaussian() {
    // Box–Muller, two fresh uniforms per draw.
    double u1 = next_double_open();
    double u2 = next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(6.283185307179586476925286766559 * u2);
}

std::uint64_t RngStream::next_below(std::uint64_t n) {
    // Lemire's multiply-shift; bias < 2^-64 per draw, fine at our scales.
    unsigned __int128 wide = static_cast<unsigned __int128>(next_u64()) * n;
    return static_cast<std::uint64_t>(wide >> 64);
}

} // namespace sbmlp::core
