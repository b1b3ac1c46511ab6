#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <type_traits>

#include "bcfw/detail/rng.hpp"
#include "bcfw/fw/block_problem.hpp"

namespace bcfw {
namespace fw {

// One term of the block curvature supremum at (x, corner, gamma):
//   (2/gamma^2) * (f(y) - f(x) - <y_(i) - x_(i), grad_i f(x)>)
// with y the gamma-step toward the corner; the inner product equals
// -gamma * block_gap.
template <class It, class G, class C>
double curvature_sample(const BlockProblem<It, G, C>& p, const It& x, int i, const C& corner,
                        double gamma) {
  if (!(gamma > 0.0) || gamma > 1.0) throw std::invalid_argument("gamma must lie in (0, 1]");
  const double fx = p.objective_value(x);
  const G slice = p.block_gradient(x, i);
  const double gap = p.block_gap(x, slice, i, corner);
  It y = x;
  p.apply_step(y, i, corner, gamma);
  const double fy = p.objective_value(y);
  return 2.0 / (gamma * gamma) * (fy - fx + gamma * gap);
}

// Sampled lower estimate of the block-i curvature constant: the maximum of
// curvature_sample over drawn (iterate, corner, gamma) triples. gamma = 1 is
// always included. A lower estimate by construction, so it can never exceed
// a valid analytic bound.
template <class It, class G, class C>
double estimate_curvature(
    const BlockProblem<It, G, C>& p,
    const std::type_identity_t<std::function<It(std::mt19937_64&)>>& sample_iterate,
    const std::type_identity_t<std::function<C(std::mt19937_64&, const It&, int)>>& sample_corner,
    int i, int num_samples, std::uint64_t seed) {
  if (num_samples < 1) throw std::invalid_argument("num_samples must be >= 1");
  std::mt19937_64 rng(seed);
  double best = 0.0;
  bool first = true;
  for (int s = 0; s < num_samples; ++s) {
    const It x = sample_iterate(rng);
    const C corner = sample_corner(rng, x, i);
    const double gamma = (s % 4 == 0) ? 1.0 : detail::uniform01_open_low(rng);
    const double v = curvature_sample(p, x, i, corner, gamma);
    if (first || v > best) {
      best = v;
      first = false;
    }
  }
  return best;
}

}  // namespace fw
}  // namespace bcfw
