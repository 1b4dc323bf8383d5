#pragma once

#include <cstdint>
#include <random>

namespace kwex {

/// Mixes a master seed and a stream index into one decorrelated 64-bit seed
/// (SplitMix64 finalizer). Nearby indices map to unrelated seeds.
std::uint64_t mix_seed(std::uint64_t master_seed, std::uint64_t stream_index);

/// Deterministic random stream for one realization.
///
/// The generator family is pinned: a std::mt19937_64 engine seeded with
/// mix_seed(master_seed, stream_index), with the mappings to [0,1) doubles
/// and bounded integers implemented here rather than through the standard
/// distributions. The full draw sequence is therefore bit-exact for a given
/// (master_seed, stream_index) on any conforming platform.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t stream_index)
      : engine_(mix_seed(master_seed, stream_index)) {}

  /// Uniform double in [0, 1): the top 53 bits of one engine output.
  double next_unit() {
    return static_cast<double>(next_raw() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n), n >= 1. Unbiased via rejection.
  std::uint64_t next_index(std::uint64_t n) {
    // Reject raw values below 2^64 mod n, then reduce.
    const std::uint64_t cutoff = (0 - n) % n;
    std::uint64_t x = next_raw();
    while (x < cutoff) x = next_raw();
    return x % n;
  }

  /// Raw engine outputs consumed so far.
  std::uint64_t draws() const { return draws_; }

 private:
  std::uint64_t next_raw() {
    ++draws_;
    return engine_();
  }

  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

}  // namespace kwex
