#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace btcost {

/// Seeded generator with platform-independent draws. The standard
/// distributions are implementation-defined, so the mappings from raw 64-bit
/// output to doubles and indices live here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on {0, ..., n - 1}; n must be positive.
  std::size_t uniform_index(std::size_t n);

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

/// Independent child seed for substream `stream` of `seed` (splitmix64 mix).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// `k` distinct values from {0, ..., n - 1} in draw order (partial Fisher-Yates).
std::vector<std::size_t> sample_distinct(Rng& rng, std::size_t n, std::size_t k);

}  // namespace btcost
