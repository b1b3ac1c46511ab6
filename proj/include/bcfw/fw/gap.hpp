#pragma once

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "bcfw/fw/block_problem.hpp"
#include "bcfw/fw/types.hpp"

namespace bcfw {
namespace fw {

// Concurrency cap for full-gap sweeps (and other per-block fan-outs).
// BCFW_THREADS overrides; unset or invalid means single-threaded.
inline int sweep_threads(int n_blocks) {
  const char* env = std::getenv("BCFW_THREADS");
  int cap = 1;
  if (env != nullptr) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 1) cap = static_cast<int>(v);
  }
  if (cap > n_blocks) cap = n_blocks;
  return cap < 1 ? 1 : cap;
}

// Runs fn(i) for i in [0, n). Results must be written to per-index slots;
// any reduction is the caller's job and must run in ascending order so that
// traces stay deterministic under any thread count.
template <class Fn>
void for_each_block(int n, const Fn& fn) {
  const int threads = sweep_threads(n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    const int lo = static_cast<int>(static_cast<long long>(n) * t / threads);
    const int hi = static_cast<int>(static_cast<long long>(n) * (t + 1) / threads);
    pool.emplace_back([lo, hi, &fn] {
      for (int i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

// Full certificate at x: one exact LMO call per block. When corners_out is
// non-null the per-block corners are returned for reuse.
template <class It, class G, class C>
GapCertificate gap_sweep(const BlockProblem<It, G, C>& p, const It& x, std::vector<C>* corners_out) {
  GapCertificate cert;
  cert.block_gaps.assign(static_cast<std::size_t>(p.n_blocks), 0.0);
  std::vector<C> corners(static_cast<std::size_t>(p.n_blocks));
  for_each_block(p.n_blocks, [&](int i) {
    const G slice = p.block_gradient(x, i);
    corners[static_cast<std::size_t>(i)] = p.block_lmo(x, slice, i);
    cert.block_gaps[static_cast<std::size_t>(i)] =
        p.block_gap(x, slice, i, corners[static_cast<std::size_t>(i)]);
  });
  double total = 0.0;
  for (int i = 0; i < p.n_blocks; ++i) total += cert.block_gaps[static_cast<std::size_t>(i)];
  cert.total_gap = total;
  if (corners_out != nullptr) *corners_out = std::move(corners);
  return cert;
}

template <class It, class G, class C>
GapCertificate duality_gap(const BlockProblem<It, G, C>& p, const It& x) {
  return gap_sweep(p, x, static_cast<std::vector<C>*>(nullptr));
}

}  // namespace fw
}  // namespace bcfw
