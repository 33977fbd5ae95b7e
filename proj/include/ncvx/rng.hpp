#pragma once

#include <cstdint>

namespace ncvx {

/// Counter-based generator: the k-th draw of a stream is
/// splitmix64(key + k * 0x9E3779B97F4A7C15), with key derived from
/// (seed, stream). Output depends only on integer arithmetic, so streams
/// are identical on every platform; normals use Box-Muller on top.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  /// Independent stream for Monte Carlo trial `trial` under `master_seed`.
  static Rng for_trial(std::uint64_t master_seed, std::uint64_t trial);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  double normal();
  double exponential();
  /// Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace ncvx
