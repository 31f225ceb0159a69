#pragma once
// Counter-based splittable RNG (fixed for the 1.x series).
//
// Output i of a stream is splitmix64_finalize(key + GAMMA*(i+1)) where
// key = finalize(finalize(seed ^ K1) ^ rotl(finalize(stream ^ K2), 32)).
// A stream is a pure value: identical (seed, stream) gives identical draws
// on any thread count, and derived sub-streams are independent by key mixing.
// Gaussians use Box–Muller on two fresh uniforms (no cached second value),
// so the counter advances deterministically per draw kind.

#include <cstdint>

namespace sbmlp::core {

class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
        : seed_(seed), stream_(stream_id), key_(make_key(seed, stream_id)) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }

    // Independent sub-stream; does not disturb this stream's counter.
    RngStream derive(std::uint64_t sub) const {
        return RngStream(seed_, finalize(stream_ ^ finalize(sub + 0x9E3779B97F4A7C15ull)));
    }

    std::uint64_t next_u64() { return finalize(key_ + 0x9E3779B97F4A7C15ull * (++counter_)); }

    // Uniform in [0, 1), 53-bit mantissa.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1], safe as a log argument.
    double next_double_open() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    double next_gaussian();

    // Uniform integer in [0, n); n > 0. Rejection-free 128-bit scaling.
    std::uint64_t next_below(std::uint64_t n);

    bool next_bernoulli(double p) { return next_double() < p; }

    // +1 w.p. p/2, -1 w.p. p/2, 0 otherwise.
    int next_ternary(double p) {
        double u = next_double();
        if (u < 0.5 * p) return 1;
        if (u < p) return -1;
        return 0;
    }

private:
    static std::uint64_t finalize(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }
    static std::uint64_t rotl(std::uint64_t x, int r) { return (x << r) | (x >> (64 - r)); }
    static std::uint64_t make_key(std::uint64_t seed, std::uint64_t stream) {
        return finalize(finalize(seed ^ 0x8BB84B93962EACC9ull) ^
                        rotl(finalize(stream ^ 0x2545F4914F6CDD1Dull), 32));
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace sbmlp::core
