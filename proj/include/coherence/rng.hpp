#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace coherence {

/// Seed type used by every stochastic routine in the library.
using RngSeed = std::uint64_t;

/// SplitMix64 step. Used to expand a 64-bit seed into generator state and to
/// derive independent child seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Derives a child seed from a parent seed and a stream index. Distinct
/// (parent, stream) pairs give statistically independent children.
RngSeed derive_seed(RngSeed parent, std::uint64_t stream);

/// xoshiro256** generator seeded through SplitMix64.
///
/// Normal deviates are produced with the Box-Muller transform so that draws
/// are bit-identical across standard library implementations.
class Rng {
public:
  explicit Rng(RngSeed seed);

  std::uint64_t next_u64();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  /// Uniform integer in [lo, hi] (inclusive).
  int uniform_int(int lo, int hi);

  /// Standard normal deviate.
  double normal();

  /// Standard complex Gaussian: real and imaginary parts each N(0, 1/2).
  std::complex<double> complex_normal();

private:
  std::array<std::uint64_t, 4> s_{};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

} // namespace coherence
