#pragma once

#include <cstdint>

namespace apo::rng {

// Counter-based generator built on the SplitMix64 finalizer.  The state
// advances by the 64-bit golden-ratio constant each draw, so draw i is a pure
// function of (seed, i) and the sequence reproduces in any language that
// implements the same three constants:
//
//   increment  0x9E3779B97F4A7C15
//   mix mul 1  0xBF58476D1CE4E5B9   (xor-shift 30 before, 27 after)
//   mix mul 2  0x94D049BB133111EB   (xor-shift 31 after)
//
// uniform() maps the top 53 bits onto [0,1); normal() uses the Marsaglia
// polar method with a cached spare; uniform_int() reduces by modulo.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  /// Uniform double in [0, 1).
  double uniform();

  /// Uniform double in [a, b).
  double uniform(double a, double b);

  /// Standard normal deviate.
  double normal();

  /// Uniform integer in [0, n); n must be positive.
  std::uint64_t uniform_int(std::uint64_t n);

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Derives a decorrelated seed for a named substream (worker index, epoch,
/// environment instance, ...) of a base seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Reads the APO_THREADS env var; returns min(requested, cap, hardware).
int worker_count(int requested);

}  // namespace apo::rng
