#pragma once

#include <cstdint>
#include <random>

namespace ucbmq {

/// SplitMix64 finalizer; maps (seed, stream id) pairs onto well-separated
/// generator seeds.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

/// Seeded random stream with a bit-reproducible uniform draw.
///
/// `uniform()` takes the top 53 bits of one mt19937_64 output, so the
/// sequence does not depend on the standard library's distribution code.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  int uniform_int(int n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace ucbmq
