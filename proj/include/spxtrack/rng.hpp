#pragma once

#include <cstdint>

namespace spxtrack {

/// 64-bit SplitMix generator.
///
/// Every random decision in the pipeline flows through this generator so
/// that a run is fully determined by its master seed. The state advances
/// by the golden-ratio increment and each output is a finalized mix of
/// the state (Steele et al. "Fast splittable pseudorandom number
/// generators" variant).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [0, n), n >= 1. Rejects the low 2^64 mod n values
  /// so the draw is unbiased.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (~n + 1) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  /// Uniform double in [0, 1) built from the top 53 bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// Derive an independent stream seed from a base seed and a stream tag.
/// Order-free: derive_seed(b, t) depends only on (b, t), never on how many
/// other streams were derived before it.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
  SplitMix64 g(base);
  SplitMix64 h(g.next_u64() ^ (tag * 0x9E3779B97F4A7C15ULL));
  return h.next_u64();
}

/// Tag for per-ordered-pair streams (e.g. one classifier training per
/// ordered frame pair).
inline std::uint64_t pair_tag(int first, int second) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(first)) << 32) |
         static_cast<std::uint64_t>(static_cast<std::uint32_t>(second));
}

}  // namespace spxtrack
