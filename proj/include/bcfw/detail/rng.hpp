#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace bcfw {
namespace detail {

// Unbiased draw from [0, bound). Rejection sampling on the raw 64-bit
// stream; the draw sequence depends only on the seed, not on the standard
// library's distribution internals.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = bound * (UINT64_MAX / bound);
  std::uint64_t r = rng();
  while (r >= limit) r = rng();
  return r % bound;
}

// Uniform on [0, 1) with 53-bit resolution.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform on (0, 1].
inline double uniform01_open_low(std::mt19937_64& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

// Box-Muller standard normal; avoids distribution objects for the same
// cross-library reproducibility reason as uniform_below.
class NormalSampler {
 public:
  double operator()(std::mt19937_64& rng) {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01_open_low(rng);
    const double u2 = uniform01(rng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace detail
}  // namespace bcfw
