#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace circlestab {

/// Per-trial random stream keyed by (seed, stream). Two generators with the
/// same key produce the same sequence regardless of how many other streams
/// were created before, so batch trials can run in any order.
class KeyedRng {
 public:
  explicit KeyedRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform in {0, ..., n-1}; n must be positive.
  std::size_t below(std::size_t n);
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace circlestab
