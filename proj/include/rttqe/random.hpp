#pragma once

// Portable seeded randomness. The standard distributions are
// implementation-defined, so everything here is built directly on
// std::mt19937_64, whose output sequence is fixed by the standard.

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace rttqe::random {

std::uint64_t fnv1a64(std::string_view bytes);

std::uint64_t splitmix64(std::uint64_t x);

/// Named sub-seed: the same (seed, name) always yields the same value.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view name);

/// Unbiased integer in [0, bound). bound must be positive.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

/// Real in [0, 1) with 53 random bits.
double uniform_unit(std::mt19937_64& rng);

/// Standard normal draw (Box-Muller).
double normal(std::mt19937_64& rng);

/// Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> permutation(std::mt19937_64& rng, std::size_t n);

}  // namespace rttqe::random
