#pragma once

#include <cstdint>
#include <random>

namespace ust::rng {

// Every random draw in the library comes from an engine seeded by
// derive_seed(seed, stream, index). Streams are disjoint by construction, so
// e.g. adding replicate r+1 never changes the draws of replicate r.
enum class Stream : std::uint64_t {
  path = 1,         // innovations of a simulated trajectory
  latent = 2,       // mixture component choice, once per path
  monte_carlo = 3,  // product-measure draws for limit estimation
  replicate = 4,    // per-replicate seeds derived from a master seed
  incomplete = 5,   // random index tuples for incomplete U-statistics
  diagnostic = 6,   // symmetry spot checks, tail-mass subsampling
};

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream stream,
                                    std::uint64_t index = 0) noexcept {
  return mix64(mix64(mix64(seed) ^ static_cast<std::uint64_t>(stream)) + index);
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
  return Engine(derive_seed(seed, stream, index));
}

}  // namespace ust::rng
