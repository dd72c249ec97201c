#pragma once

#include <cstdint>
#include <random>

namespace lpconc {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// Thin wrapper over mt19937_64 with transforms written out explicitly, so a
/// given seed yields the same variates on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Engine for chunk `chunk` of stream `stream` under the user seed.
  static Rng for_chunk(std::uint64_t seed, std::uint64_t stream, std::uint64_t chunk) {
    return Rng(mix_seed(mix_seed(seed, stream), chunk));
  }

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1).
  double uniform_open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
  double normal();
  double exponential(double rate);
  bool bernoulli(double prob) { return uniform() < prob; }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace lpconc
