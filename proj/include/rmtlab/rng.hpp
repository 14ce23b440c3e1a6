#pragma once

#include <cstdint>
#include <random>

namespace rmtlab {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of replica r under master seed m:
///   seed_r = splitmix64(splitmix64(m) ^ splitmix64(r + 0x632be59bd9b4e019)).
/// Distinct r give distinct seeds for a fixed m (splitmix64 is a bijection).
constexpr std::uint64_t replica_seed(std::uint64_t master_seed, std::uint64_t r) noexcept {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(r + 0x632be59bd9b4e019ULL));
}

inline Rng make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return Rng(seq);
}

}  // namespace rmtlab
