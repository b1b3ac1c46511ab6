#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bcfw/detail/rng.hpp"
#include "bcfw/fw/averaging.hpp"
#include "bcfw/fw/block_problem.hpp"
#include "bcfw/fw/gap.hpp"
#include "bcfw/fw/oracles.hpp"
#include "bcfw/fw/step_rules.hpp"
#include "bcfw/fw/types.hpp"
#include "bcfw/trace.hpp"

namespace bcfw {
namespace fw {

// Optional solver callbacks.
//   on_checkpoint  invoked for every trace row, with the row (metrics may be
//                  added), the evaluation-point iterate, and the sweep's
//                  exact corners.
//   on_iterate     invoked after every applied step.
//   step_oracle    replaces the exact LMO for step directions only (an
//                  approximate-decoder instrument); certificates always use
//                  the exact LMO. Incompatible with a non-exact
//                  SolverConfig::oracle.
template <class It, class G, class C>
struct SolveHooks {
  std::function<void(TraceRecord&, const It&, const std::vector<C>&)> on_checkpoint;
  std::function<void(std::int64_t, const It&)> on_iterate;
  StepOracle<It, G, C> step_oracle;
};

template <class It>
struct FwResult {
  It x{};
  ConvergenceTrace trace;
  std::int64_t oracle_calls = 0;
  bool converged = false;
};

template <class It>
struct BcfwResult {
  It x{};
  AveragingState<It> averaging;
  ConvergenceTrace trace;
  std::int64_t oracle_calls = 0;
  bool converged = false;
};

namespace detail_solver {

inline double elapsed_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class It, class G, class C>
void check_step_rule(const BlockProblem<It, G, C>& p, const SolverConfig& config) {
  if (config.step_rule == StepRule::line_search && !p.exact_line_search) {
    throw std::invalid_argument("line search requested but the problem provides none");
  }
}

}  // namespace detail_solver

// Batch Frank-Wolfe on a single-block problem. Each iteration's LMO answer
// doubles as the gap certificate, so the trace records the gap at every
// iterate for free. Stops when the gap reaches the tolerance or after
// max_iterations steps; the final iterate always gets a trace row.
template <class It, class G, class C>
FwResult<It> fw_solve(const BlockProblem<It, G, C>& p, const SolverConfig& config,
                      const SolveHooks<It, G, C>& hooks = {}) {
  validate(config);
  if (p.n_blocks != 1) throw std::invalid_argument("fw_solve requires exactly one block");
  detail_solver::check_step_rule(p, config);
  const bool wrapped = config.oracle.nu < 1.0 || config.oracle.delta > 0.0;
  if (wrapped && hooks.step_oracle) {
    throw std::invalid_argument("oracle accuracy and a custom step oracle are mutually exclusive");
  }
  StepOracle<It, G, C> approx;
  if (wrapped) approx = make_approximate_oracle(p, config.oracle.nu, config.oracle.delta);

  FwResult<It> res;
  res.x = p.initial_iterate();
  const auto t0 = std::chrono::steady_clock::now();
  for (std::int64_t k = 0;; ++k) {
    const G slice = p.block_gradient(res.x, 0);
    std::vector<C> corners;
    corners.push_back(p.block_lmo(res.x, slice, 0));
    res.oracle_calls += 1;
    const double f = p.objective_value(res.x);
    if (!std::isfinite(f)) throw std::runtime_error("objective value is not finite");
    TraceRecord row;
    row.effective_passes = static_cast<double>(res.oracle_calls);
    row.k = k;
    row.dual = f;
    row.gap = p.block_gap(res.x, slice, 0, corners[0]);
    row.wall_seconds = detail_solver::elapsed_seconds(t0);
    if (hooks.on_checkpoint) hooks.on_checkpoint(row, res.x, corners);
    res.trace.push_back(row);
    if (*row.gap <= config.gap_tolerance) {
      res.converged = true;
      break;
    }
    if (k >= config.max_iterations) break;

    C step_corner = corners[0];
    if (approx) {
      step_corner = approx(res.x, slice, 0, k);
      res.oracle_calls += 1;
    } else if (hooks.step_oracle) {
      step_corner = hooks.step_oracle(res.x, slice, 0, k);
      res.oracle_calls += 1;
    }
    const double gamma = config.step_rule == StepRule::line_search
                             ? p.exact_line_search(res.x, 0, step_corner)
                             : predefined_step_size(k, 1, config.oracle.nu);
    p.apply_step(res.x, 0, step_corner, gamma);
    if (hooks.on_iterate) hooks.on_iterate(k, res.x);
  }
  return res;
}

// Block-coordinate Frank-Wolfe over n blocks: each iteration samples one
// block uniformly with replacement and steps toward its LMO corner. A full
// certificate sweep runs every gap_check_every effective passes (and at
// termination); its n oracle calls are counted. When averaging is on, the
// checkpoint evaluates the averaged iterate, which is also the point the
// stopping rule certifies. When no averaging and no approximate oracle is
// active, the step right after a sweep reuses the sweep's corner for the
// sampled block (same iterate, same exact answer), which keeps n = 1 runs
// identical to fw_solve, trace for trace.
template <class It, class G, class C>
BcfwResult<It> bcfw_solve(const BlockProblem<It, G, C>& p, const SolverConfig& config,
                          const SolveHooks<It, G, C>& hooks = {}) {
  validate(config);
  if (p.n_blocks < 1) throw std::invalid_argument("bcfw_solve requires at least one block");
  detail_solver::check_step_rule(p, config);
  const bool wrapped = config.oracle.nu < 1.0 || config.oracle.delta > 0.0;
  if (wrapped && hooks.step_oracle) {
    throw std::invalid_argument("oracle accuracy and a custom step oracle are mutually exclusive");
  }
  StepOracle<It, G, C> step_oracle;
  if (wrapped) {
    step_oracle = make_approximate_oracle(p, config.oracle.nu, config.oracle.delta);
  } else if (hooks.step_oracle) {
    step_oracle = hooks.step_oracle;
  }

  const int n = p.n_blocks;
  BcfwResult<It> res;
  res.x = p.initial_iterate();
  if (config.averaging != Averaging::none) init_averaging(res.averaging, res.x);
  std::mt19937_64 rng(config.seed);
  const bool reuse_ok = !step_oracle && config.averaging == Averaging::none;
  std::vector<C> cache;
  std::vector<C> scratch;
  bool cache_valid = false;
  const std::int64_t cadence = config.gap_check_every * static_cast<std::int64_t>(n);
  const auto t0 = std::chrono::steady_clock::now();

  for (std::int64_t k = 0;; ++k) {
    if (k % cadence == 0 || k >= config.max_iterations) {
      It suffix_tmp;
      const It* eval = &res.x;
      if (config.averaging == Averaging::weighted) {
        eval = &res.averaging.weighted_avg;
      } else if (config.averaging == Averaging::suffix) {
        suffix_tmp = suffix_average(res.averaging);
        eval = &suffix_tmp;
      }
      std::vector<C>& corners = reuse_ok ? cache : scratch;
      GapCertificate cert = gap_sweep(p, *eval, &corners);
      cert.iteration = k;
      res.oracle_calls += n;
      cache_valid = reuse_ok;
      const double f = p.objective_value(*eval);
      if (!std::isfinite(f)) throw std::runtime_error("objective value is not finite");
      TraceRecord row;
      row.effective_passes = static_cast<double>(res.oracle_calls) / static_cast<double>(n);
      row.k = k;
      row.dual = f;
      row.gap = cert.total_gap;
      row.wall_seconds = detail_solver::elapsed_seconds(t0);
      if (hooks.on_checkpoint) hooks.on_checkpoint(row, *eval, corners);
      res.trace.push_back(row);
      if (cert.total_gap <= config.gap_tolerance) {
        res.converged = true;
        break;
      }
      if (k >= config.max_iterations) break;
    }

    const int i = static_cast<int>(detail::uniform_below(rng, static_cast<std::uint64_t>(n)));
    const G slice = p.block_gradient(res.x, i);
    C corner;
    if (step_oracle) {
      corner = step_oracle(res.x, slice, i, k);
      res.oracle_calls += 1;
    } else if (cache_valid) {
      corner = cache[static_cast<std::size_t>(i)];
    } else {
      corner = p.block_lmo(res.x, slice, i);
      res.oracle_calls += 1;
    }
    const double gamma = config.step_rule == StepRule::line_search
                             ? p.exact_line_search(res.x, i, corner)
                             : predefined_step_size(k, n, config.oracle.nu);
    p.apply_step(res.x, i, corner, gamma);
    cache_valid = false;
    if (config.averaging == Averaging::weighted) {
      update_weighted_average(res.averaging, res.x, k);
    } else if (config.averaging == Averaging::suffix) {
      update_suffix_average(res.averaging, res.x, k);
    }
    if (hooks.on_iterate) hooks.on_iterate(k, res.x);
  }
  return res;
}

}  // namespace fw
}  // namespace bcfw
