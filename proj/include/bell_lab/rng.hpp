// SPDX-License-Identifier: Apache-2.0
//
// bell-lab: counter-based splittable random streams.

#pragma once

#include <cstdint>

namespace bell_lab {

/// Counter-based pseudorandom stream in the SplitMix64 family.
///
/// A stream is fully determined by a (seed, stream_index) pair: the key is a
/// hash of both, and each output is a hash of (key, counter). Streams with
/// distinct indices are statistically independent, so a master seed can be
/// fanned out across workers or trials without coordination. Skipping ahead
/// is O(1) via set_counter().
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream_index = 0)
      : key_(mix(mix(seed) + kGamma * (stream_index + 1))) {}

  std::uint64_t next_u64() { return mix(key_ + kGamma * ++counter_); }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [-1, 1).
  double next_symmetric() { return 2.0 * next_unit() - 1.0; }

  std::uint64_t counter() const { return counter_; }
  void set_counter(std::uint64_t c) { counter_ = c; }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  // SplitMix64 finalizer (Steele, Lea, Flood 2014 / Vigna 2015).
  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace bell_lab
