#pragma once

#include <cstdint>
#include <random>

namespace sandlab {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Replica streams: stream k of a run seeded with s is seeded with
// splitmix64(s ^ splitmix64(k)).  Adding or removing threads never changes
// which stream a replica draws from.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream));
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) { return Rng(stream_seed(seed, stream)); }

// Lemire's nearly-divisionless bounded draw.
inline std::uint32_t uniform_below(Rng& rng, std::uint32_t n) {
  std::uint32_t x = std::uint32_t(rng() >> 32);
  std::uint64_t m = std::uint64_t(x) * n;
  std::uint32_t l = std::uint32_t(m);
  if (l < n) {
    std::uint32_t t = std::uint32_t(-n) % n;
    while (l < t) {
      x = std::uint32_t(rng() >> 32);
      m = std::uint64_t(x) * n;
      l = std::uint32_t(m);
    }
  }
  return std::uint32_t(m >> 32);
}

inline double uniform01(Rng& rng) { return double(rng() >> 11) * 0x1.0p-53; }

}  // namespace sandlab
