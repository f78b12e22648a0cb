#pragma once

#include <cstdint>
#include <random>

namespace ge {

// Seeded generator used for every sampled check.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. The standard distributions are not (their algorithms are
// implementation-defined), so the conversions below are written out here to
// keep reports identical across standard libraries:
//   uniform01: top 53 bits of one draw, scaled by 2^-53, in [0, 1)
//   normal:    Box-Muller on two uniform01 draws, cosine branch only
//   index(n):  floor(uniform01 * n)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  double normal();
  // Uniform in {0, ..., n-1}; n must be positive.
  std::uint64_t index(std::uint64_t n);
  bool coin() { return index(2) == 1; }

  // Independent child stream, for checks that must not perturb each other.
  Rng fork();

 private:
  std::mt19937_64 engine_;
};

}  // namespace ge
