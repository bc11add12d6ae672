#ifndef UIC_RNG_HPP_
#define UIC_RNG_HPP_

#include <cmath>
#include <cstdint>

#include "uic/math.hpp"

namespace uic {

/// Counter-based generator (SplitMix64 core). The i-th output of a stream is
/// a pure function of (key, i), so streams can be split hierarchically:
/// substream(k) derives an independent key from (key, k). Every consumer of
/// randomness in this project draws from a substream addressed by its cell
/// index (sample index, experiment cell, chunk id), which makes results
/// independent of thread scheduling.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : key_(mix(seed ^ kKeyTag)) {}

  /// Independent stream derived from this stream's key and an index.
  CounterRng substream(std::uint64_t index) const {
    CounterRng r(0);
    r.key_ = mix(key_ + kStreamTag + index * kGamma);
    r.counter_ = 0;
    return r;
  }

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGamma); }

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on {0, ..., n-1}; n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) %
           n;
  }

  /// Standard normal via Box-Muller. Consumes exactly two uniforms per call,
  /// keeping the stream position deterministic.
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(2.0 * kPi * u2);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  static constexpr std::uint64_t kKeyTag = 0x8d1b5c6e2f0a9d3bULL;
  static constexpr std::uint64_t kStreamTag = 0x5851f42d4c957f2dULL;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace uic

#endif  // UIC_RNG_HPP_
