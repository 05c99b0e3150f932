#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace plspower {

/// splitmix64 finalizer; good avalanche, used only to derive stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Collapses (seed, path...) into one 64-bit stream seed. The path length is
/// folded in so (s, {a}) and (s, {a, 0}) land on different streams.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(seed ^ 0xD1B54A32D192ED03ull);
  for (std::uint64_t v : path) h = mix64(h ^ mix64(v));
  return mix64(h ^ static_cast<std::uint64_t>(path.size()));
}

/// Independent generator for a derived substream. Work items draw from
/// substreams keyed by their index, so results do not depend on scheduling.
inline std::mt19937_64 substream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  return std::mt19937_64(derive_seed(seed, path));
}

// Stream tags keep unrelated uses of the same (seed, index) apart.
namespace stream_tag {
inline constexpr std::uint64_t pilot = 1;
inline constexpr std::uint64_t simulation = 2;
inline constexpr std::uint64_t permutation = 3;
}  // namespace stream_tag

}  // namespace plspower
