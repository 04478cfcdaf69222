#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

namespace qboost {

/// Seedable random source used everywhere randomness is needed.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Distributions are implemented here rather than taken from
/// <random> because the standard distributions are implementation-defined:
///
///  - uniform():  top 53 bits of one engine draw, scaled by 2^-53, in [0, 1).
///  - normal():   Box-Muller on two uniforms; the sine branch is cached and
///                returned by the following call.
///  - index(n):   rejection sampling on the raw 64-bit draw (no modulo bias).
///
/// Datasets generated with the same seed are therefore identical across
/// compilers and standard libraries (up to libm's log/cos/sin rounding).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  std::size_t index(std::size_t n);
  bool coin() { return (next() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Derives an independent seed for a named sub-stream of a root seed:
/// mix64(root ^ fnv1a64(stream)).
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream);

/// Derives the seed of the i-th replica of a named sub-stream.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream, std::uint64_t i);

}  // namespace qboost
