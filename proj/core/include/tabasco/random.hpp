#pragma once

#include <cstdint>
#include <random>

namespace tabasco {

/// Counter-based substream seeding: stream s of master seed m gets its own
/// generator, so parallel and serial trial loops draw identical numbers.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(stream * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL)));
}

}  // namespace tabasco
