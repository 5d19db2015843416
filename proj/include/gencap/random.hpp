#pragma once

#include <cstdint>
#include <random>

namespace gencap {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; decorrelates neighbouring seeds (seed, seed+1, ...).
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Generator for an independent stream derived from a user seed.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  return Rng(mix_seed(mix_seed(seed) ^ (stream * 0xD1B54A32D192ED03ULL)));
}

/// Uniform draw on the open interval (0,1) with 53 random bits. Written out
/// explicitly so streams are identical across standard libraries.
inline double uniform_open(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace gencap
