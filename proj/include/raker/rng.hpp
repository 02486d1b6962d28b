#pragma once

#include <cstdint>
#include <random>

namespace raker {

// splitmix64 finalizer; good avalanche, used only to derive child seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Independent, reproducible stream for (seed, stream_id). Kernel p of a
// dictionary uses stream_id = p, so each map can be regenerated alone.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_id) noexcept {
  return mix64(mix64(seed) ^ mix64(stream_id + 0x632be59bd9b4e019ULL));
}

inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id) {
  return std::mt19937_64(derive_seed(seed, stream_id));
}

// Stream ids reserved for the data generators, kept far from kernel indices.
namespace streams {
inline constexpr std::uint64_t kInputs = 0x1000;
inline constexpr std::uint64_t kCoefficients = 0x1001;
inline constexpr std::uint64_t kNoise = 0x1002;
inline constexpr std::uint64_t kCenters = 0x1003;
}  // namespace streams

}  // namespace raker
