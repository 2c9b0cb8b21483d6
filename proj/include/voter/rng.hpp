#pragma once

#include <cstdint>
#include <random>

namespace voter {

using Engine = std::mt19937_64;

/// Independent stream for one realization. Seeds are spread through
/// splitmix64 before feeding seed_seq, so consecutive seeds do not produce
/// correlated engine states.
Engine make_stream(std::uint64_t seed);

std::uint64_t splitmix64(std::uint64_t x);

/// Uniform index in [0, n) by multiply-shift; portable across standard libraries.
inline std::size_t uniform_index(Engine& rng, std::size_t n) {
  return static_cast<std::size_t>((static_cast<unsigned __int128>(rng()) * n) >> 64);
}

// Bernoulli draws compare the top 53 bits of a 64-bit word with a fixed-point
// threshold, so p = 0 never fires and p = 1 always fires.
inline constexpr std::uint64_t kThresholdOne = std::uint64_t{1} << 53;

std::uint64_t probability_threshold(double p);

inline bool bernoulli_from_word(std::uint64_t word, std::uint64_t threshold) {
  return (word >> 11) < threshold;
}

}  // namespace voter
