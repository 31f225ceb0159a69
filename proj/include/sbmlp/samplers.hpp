#pragma once
#include <cstdint>
#include <optional>
#include <vector>

#include "sbmlp/boolean_vector.hpp"
#include "sbmlp/rng.hpp"
#include "sbmlp/verify.hpp"

namespace sbmlp::harness {

// Number of s-sparse supports, saturating at the exhaustive guard.
std::uint64_t count_sparse_inputs(std::size_t m, std::size_t s);
constexpr std::uint64_t kExhaustiveGuard = 2'000'000;

// Exhaustive: every ||b||_1 <= s input, lexicographic.
// Monte Carlo: uniform among exactly-s supports.
// Targeted: the chosen pair active plus s-2 uniform others.
std::vector<features::BooleanVector> sample_sparse_inputs(std::size_t m, std::size_t s,
                                                          std::size_t count,
                                                          features::SamplingMode mode,
                                                          core::RngStream& rng,
                                                          std::optional<std::pair<std::uint32_t,
                                                                                  std::uint32_t>>
                                                              target = std::nullopt);

features::BooleanVector random_support(std::size_t m, std::size_t s, core::RngStream& rng);

} // namespace sbmlp::harness
