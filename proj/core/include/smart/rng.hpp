#pragma once

#include <cstdint>

namespace smart {

/// Counter-based 64-bit generator (splitmix64 stream). The bit stream is a
/// pure function of the seed, so datasets and fitting runs are reproducible
/// across platforms. Uniforms use the top 53 bits; normals use Box-Muller.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform();

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);

  /// Standard normal via Box-Muller; second deviate is cached.
  double normal();

  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n);

  /// Derives an independent stream keyed by (this seed, tag).
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t tag);

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace smart
