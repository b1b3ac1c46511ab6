#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>

#include "bcfw/fw/block_problem.hpp"
#include "bcfw/fw/step_rules.hpp"

namespace bcfw {
namespace fw {

// A step-direction oracle: (iterate, gradient slice, block, iteration) -> corner.
template <class It, class G, class C>
using StepOracle = std::function<C(const It&, const G&, int, std::int64_t)>;

template <class It, class G, class C>
StepOracle<It, G, C> make_exact_oracle(const BlockProblem<It, G, C>& p) {
  return [&p](const It& x, const G& slice, int i, std::int64_t) { return p.block_lmo(x, slice, i); };
}

// Approximate oracle of multiplicative quality nu and additive slack delta:
// among the block's corners it returns the one with the smallest gap
// satisfying
//   gap(s) >= nu * max_gap - (delta/2) * step_ref(k) * C_i,
// with step_ref(k) = 2n/(nu*k + 2n) the predefined reference step (used
// regardless of the solver's actual step rule) and C_i the block curvature
// bound. Picking the worst admissible corner stress-tests convergence; ties
// break toward the first corner in enumeration order. The exact maximizer is
// always admissible, so the selection never comes up empty.
template <class It, class G, class C>
StepOracle<It, G, C> make_approximate_oracle(const BlockProblem<It, G, C>& p, double nu, double delta) {
  if (!(nu > 0.0) || nu > 1.0) throw std::invalid_argument("nu must lie in (0, 1]");
  if (!(delta >= 0.0)) throw std::invalid_argument("delta must be >= 0");
  if (!p.enumerate_corners) {
    throw std::invalid_argument("approximate oracle requires a corner enumerator");
  }
  if (delta > 0.0 && p.block_curvature_bounds.size() != static_cast<std::size_t>(p.n_blocks)) {
    throw std::invalid_argument("additive oracle requires per-block curvature bounds");
  }
  return [&p, nu, delta](const It& x, const G& slice, int i, std::int64_t k) -> C {
    const auto corners = p.enumerate_corners(x, slice, i);
    if (corners.empty()) throw std::logic_error("corner enumerator returned no corners");
    const std::pair<C, double>* best = &corners[0];
    for (const auto& cg : corners) {
      if (cg.second > best->second) best = &cg;
    }
    double tol = 0.0;
    if (delta > 0.0) {
      const double step_ref = predefined_step_size(k, p.n_blocks, nu);
      tol = 0.5 * delta * step_ref * p.block_curvature_bounds[static_cast<std::size_t>(i)];
    }
    const double threshold = nu * best->second - tol;
    const std::pair<C, double>* pick = nullptr;
    for (const auto& cg : corners) {
      if (cg.second >= threshold && (pick == nullptr || cg.second < pick->second)) pick = &cg;
    }
    // The exact maximizer satisfies the bound by construction; rounding can
    // still exclude it when the true max gap sits at or below zero, so it
    // backstops the selection.
    if (pick == nullptr) pick = best;
    return pick->first;
  };
}

template <class It, class G, class C>
StepOracle<It, G, C> wrap_oracle_multiplicative(const BlockProblem<It, G, C>& p, double nu) {
  return make_approximate_oracle(p, nu, 0.0);
}

template <class It, class G, class C>
StepOracle<It, G, C> wrap_oracle_additive(const BlockProblem<It, G, C>& p, double delta, double nu = 1.0) {
  return make_approximate_oracle(p, nu, delta);
}

}  // namespace fw
}  // namespace bcfw
