#pragma once

#include "pnest/types.hpp"

#include <cstdint>
#include <initializer_list>
#include <random>

namespace pnest {

/// Sub-stream tags; each trial draws its channel, phases, data and noise from
/// independent streams so one can be disabled without shifting the others.
enum class StreamId : std::uint64_t {
  Channel = 1,
  Phase = 2,
  Data = 3,
  Noise = 4,
  Problem = 5,
};

/// Mixes a key tuple into a 64-bit seed (splitmix64 finalizer chained over the keys).
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> keys);

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t sweep_index,
                         std::uint64_t trial_index, StreamId stream);

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  /// Circularly-symmetric complex Gaussian with total variance `variance`.
  cplx complex_normal(double variance) {
    const double s = std::sqrt(variance / 2.0);
    const double re = s * normal();
    const double im = s * normal();
    return {re, im};
  }
  std::uint64_t next_u64() { return engine_(); }
  unsigned bit() { return static_cast<unsigned>(engine_() >> 63); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace pnest
