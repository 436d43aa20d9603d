#pragma once

#include <cstdint>
#include <span>

namespace gsi {
namespace rng {

/// splitmix64 finalizer: a bijective 64-bit mix with full avalanche.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kSeedPhase = 0x9E3779B97F4A7C15ull;
inline constexpr std::uint64_t kRepPhase = 0xD1B54A32D192ED03ull;
inline constexpr std::uint64_t kPairPhase = 0x8CB92BA72F3D8DD7ull;
inline constexpr std::uint64_t kSlotPhase = 0xEB44ACCAB455D165ull;

/// Stateless counter generator: every (seed, replicate, pair, slot) address
/// maps to one variate, so sample streams do not depend on evaluation order
/// or on how pairs are sheared across worker threads.
inline constexpr std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t rep,
                                            std::uint64_t pair, std::uint64_t slot) {
  std::uint64_t h = mix64(seed + kSeedPhase);
  h = mix64(h ^ (rep + kRepPhase));
  h = mix64(h ^ (pair + kPairPhase));
  h = mix64(h ^ (slot + kSlotPhase));
  return h;
}

/// Top 53 bits scaled into [0, 1).
inline constexpr double to_unit(std::uint64_t h) {
  return double(h >> 11) * 0x1.0p-53;
}

inline constexpr double uniform01(std::uint64_t seed, std::uint64_t rep,
                                  std::uint64_t pair, std::uint64_t slot) {
  return to_unit(counter_hash(seed, rep, pair, slot));
}

/// The two points of one pick-and-freeze pair. Coordinate j of the pick
/// point uses slot 2j, of the freeze point slot 2j+1.
inline void fill_pair(std::uint64_t seed, std::uint64_t rep, std::uint64_t pair,
                      std::span<double> x, std::span<double> z) {
  for (std::size_t j = 0; j < x.size(); ++j) {
    x[j] = uniform01(seed, rep, pair, 2 * j);
    z[j] = uniform01(seed, rep, pair, 2 * j + 1);
  }
}

}  // namespace rng
}  // namespace gsi
