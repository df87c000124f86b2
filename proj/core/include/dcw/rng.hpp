#pragma once

#include <cstdint>

namespace dcw {

/// SplitMix64 finalizer. Good avalanche, cheap, identical on every platform.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Counter-based generator: the value at (stream, counter) depends only on
/// the seed, so draws are reproducible regardless of evaluation order or
/// thread scheduling.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const {
    return mix64(mix64(mix64(seed_) ^ stream) ^ counter);
  }

  /// Uniform on the open interval (0, 1).
  double uniform(std::uint64_t stream, std::uint64_t counter) const {
    const std::uint64_t b = bits(stream, counter);
    return (static_cast<double>(b >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

/// Sequential facade over CounterRng for code that wants a call-after-call
/// stream (bootstrap index draws, random restarts).
class SeqRng {
 public:
  SeqRng(std::uint64_t seed, std::uint64_t stream) : rng_(seed), stream_(stream) {}

  double uniform() { return rng_.uniform(stream_, counter_++); }

  /// Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
  }

 private:
  CounterRng rng_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace dcw
