#pragma once

#include <cstdint>
#include <stdexcept>

namespace bcfw {
namespace fw {

// Predefined step size 2n / (nu*k + 2n) for the k-th iteration over n
// blocks; n = 1 gives the batch schedule 2/(k+2). nu < 1 is the enlarged
// schedule that compensates a multiplicative-quality oracle.
inline double predefined_step_size(std::int64_t k, int n_blocks, double nu = 1.0) {
  if (k < 0) throw std::invalid_argument("step index must be >= 0");
  if (n_blocks < 1) throw std::invalid_argument("n_blocks must be >= 1");
  if (!(nu > 0.0) || nu > 1.0) throw std::invalid_argument("nu must lie in (0, 1]");
  const double n = static_cast<double>(n_blocks);
  return 2.0 * n / (nu * static_cast<double>(k) + 2.0 * n);
}

}  // namespace fw
}  // namespace bcfw
