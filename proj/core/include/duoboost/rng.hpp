#pragma once

#include <cstdint>
#include <random>

namespace duoboost {

using Rng = std::mt19937_64;

/// Derive an independent stream seed from a base seed and salts (splitmix64).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt_a, std::uint64_t salt_b);

} // namespace duoboost
