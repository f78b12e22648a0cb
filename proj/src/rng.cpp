#include "groupoid_effect/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ge {

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  // Guard against log(0).
  const double u1 = std::max(uniform01(), 0x1.0p-60);
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::index(std::uint64_t n) {
  const auto i = static_cast<std::uint64_t>(uniform01() * static_cast<double>(n));
  return std::min(i, n - 1);
}

Rng Rng::fork() {
  return Rng(engine_() ^ 0x9E3779B97F4A7C15ULL);
}

}  // namespace ge
