// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <string_view>

namespace qbn {

// splitmix64: the project-wide random source. Chosen over std::mt19937_64 +
// <random> distributions because the distribution algorithms are not pinned
// by the standard; this generator produces identical streams on every
// platform, which the reproducibility contract requires.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit mantissa.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Multiply-shift; the modulo bias of ~n/2^64 is
  // far below anything observable here.
  uint64_t next_below(uint64_t n) {
    return static_cast<uint64_t>((static_cast<__uint128_t>(next_u64()) * n) >> 64);
  }

 private:
  uint64_t state_;
};

// FNV-1a over raw bytes; used for seed derivation and document hashes.
inline uint64_t fnv1a64(const void* data, size_t len, uint64_t h = 14695981039346656037ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

inline uint64_t fnv1a64(std::string_view s, uint64_t h = 14695981039346656037ULL) {
  return fnv1a64(s.data(), s.size(), h);
}

inline uint64_t fnv1a64_u64(uint64_t v, uint64_t h = 14695981039346656037ULL) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  return fnv1a64(b, 8, h);
}

}  // namespace qbn
