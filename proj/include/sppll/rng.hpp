#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace sppll {

// All randomness in the library flows through std::mt19937_64 plus the
// rejection sampler below. mt19937_64 is fully specified by the standard,
// so seeded runs reproduce bit-identically across toolchains.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t salt) {
  return splitmix64(master + 0x9e3779b97f4a7c15ull * (salt + 1));
}

// Unbiased draw from {0, ..., bound-1} by rejection.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

// Uniform double in [0,1) with 53 random bits.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline void shuffle_in_place(std::mt19937_64& rng, std::vector<int>& v) {
  const std::size_t n = v.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::swap(v[i], v[i + uniform_below(rng, n - i)]);
  }
}

// First k entries of a Fisher-Yates shuffle of {0, ..., n-1}, in draw order.
inline std::vector<int> sample_without_replacement(std::mt19937_64& rng, int n, int k) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < k; ++i) {
    std::swap(idx[static_cast<std::size_t>(i)],
              idx[static_cast<std::size_t>(i) +
                  uniform_below(rng, static_cast<std::uint64_t>(n - i))]);
  }
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

}  // namespace sppll
