#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace bcfw {
namespace fw {

// A block-separable constrained problem: minimize a convex f over a product
// of compact convex blocks, accessed only through the callbacks below.
//
// Iterate is opaque to the solver. GradSlice represents grad_i f(x) and may
// be lazy (a view of the iterate) when the block dimension is exponential.
// Corner is an extreme point of one block plus whatever the problem wants to
// cache about it (the structural SVM corner stores its mapped quantities).
//
// Required contracts:
//   block_lmo      exact linear minimization over block i; may read the
//                  iterate but must depend only on what the slice encodes.
//   block_gap      <x_(i) - s_(i), grad_i f(x)> for a candidate corner s.
//   apply_step     x_(i) <- (1-gamma) x_(i) + gamma s, gamma in [0,1];
//                  gamma = 0 must leave the objective value unchanged.
// Optional:
//   exact_line_search  argmin over gamma in [0,1] of f after the step;
//                      required by StepRule::line_search.
//   enumerate_corners  all corners of block i with their gaps at x; enables
//                      the approximate-oracle wrappers and exhaustive tests
//                      (desk scale only).
//   block_curvature_bounds  per-block curvature upper bounds, used by the
//                      additive oracle tolerance.
template <class Iterate, class GradSlice, class Corner>
struct BlockProblem {
  using iterate_type = Iterate;
  using grad_slice_type = GradSlice;
  using corner_type = Corner;

  int n_blocks = 0;
  std::function<Iterate()> initial_iterate;
  std::function<double(const Iterate&)> objective_value;
  std::function<GradSlice(const Iterate&, int)> block_gradient;
  std::function<Corner(const Iterate&, const GradSlice&, int)> block_lmo;
  std::function<double(const Iterate&, const GradSlice&, int, const Corner&)> block_gap;
  std::function<void(Iterate&, int, const Corner&, double)> apply_step;
  std::function<double(const Iterate&, int, const Corner&)> exact_line_search;
  std::function<std::vector<std::pair<Corner, double>>(const Iterate&, const GradSlice&, int)>
      enumerate_corners;
  std::vector<double> block_curvature_bounds;
};

}  // namespace fw
}  // namespace bcfw
