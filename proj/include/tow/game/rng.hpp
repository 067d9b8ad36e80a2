#pragma once

#include <cstdint>

namespace tow::game {

// Small seeded generator whose whole state is one word, so simulator states
// compare and copy as plain values.
struct SplitMix64 {
  std::uint64_t state = 0;

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  friend bool operator==(const SplitMix64&, const SplitMix64&) = default;
};

}  // namespace tow::game
