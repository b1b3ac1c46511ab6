#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bcfw/chain/decode.hpp"
#include "bcfw/chain/metrics.hpp"
#include "bcfw/chain/model.hpp"
#include "bcfw/detail/rng.hpp"
#include "bcfw/detail/vec.hpp"
#include "bcfw/fw/gap.hpp"
#include "bcfw/fw/step_rules.hpp"
#include "bcfw/fw/types.hpp"
#include "bcfw/svm/objectives.hpp"
#include "bcfw/svm/problem.hpp"
#include "bcfw/svm/types.hpp"
#include "bcfw/trace.hpp"

namespace bcfw {
namespace svm {

// Kernel on joint feature maps. declared_linear promises k(a,b) = <a,b>,
// which unlocks dense materialization of w and exact Viterbi decoding; any
// other kernel decodes by enumeration, so it is for small label spaces only.
struct KernelSpec {
  std::function<double(const SparseVec&, const SparseVec&)> k;
  bool declared_linear = false;
};

inline KernelSpec linear_kernel() {
  KernelSpec s;
  s.k = [](const SparseVec& a, const SparseVec& b) { return dot(a, b); };
  s.declared_linear = true;
  return s;
}

// Canonical dedup key for a labeling: length-prefixed, comma-separated.
inline std::string labeling_key(const std::vector<int>& y) {
  std::string s = std::to_string(y.size());
  s += ':';
  for (std::size_t t = 0; t < y.size(); ++t) {
    if (t != 0) s += ',';
    s += std::to_string(y[t]);
  }
  return s;
}

// Sparse dual iterate: per block, the labelings with nonzero weight. Sums to
// one per block (convex combinations of corners starting from the gold
// corner).
struct DualSparseState {
  std::vector<std::map<std::string, double>> alpha;
  double ell = 0.0;
  std::vector<double> ell_blocks;

  std::int64_t support_count() const {
    std::int64_t c = 0;
    for (const auto& m : alpha) c += static_cast<std::int64_t>(m.size());
    return c;
  }
};

struct KernelTrainResult {
  DualSparseState state;
  ConvergenceTrace trace;
  std::int64_t oracle_calls = 0;
  bool converged = false;
  DenseVec w;  // materialized primal point; declared-linear kernels only
  double ell = 0.0;
};

struct KernelTrainOptions {
  const chain::SequenceDataset* test_data = nullptr;
  bool record_errors = true;  // needs a materializable w, so linear only
  // Invariant-checking hook, called with the rebuilt sparse state after
  // every applied step.
  std::function<void(std::int64_t, const DualSparseState&)> on_iterate;
  std::int64_t enumeration_cap = 4096;  // decode cap for generic kernels
};

namespace detail_kernel {

struct Entry {
  std::vector<int> labels;
  SparseVec phi;
  int gid = -1;  // global id, cache key component
};

// Support registry plus kernel-value cache. alpha weights are stored aligned
// with each block's entry list; entry 0 of every block is the gold labeling.
struct Engine {
  const chain::ChainModel& model;
  const chain::SequenceDataset& data;
  SvmHyperparams hp;
  KernelSpec kernel;
  int n;
  std::vector<std::vector<Entry>> entries;
  std::vector<std::map<std::string, int>> index;  // labeling key -> entry idx
  std::vector<std::vector<double>> alpha;
  std::vector<double> ell_blocks;
  double ell = 0.0;
  int next_gid = 0;
  std::unordered_map<std::uint64_t, double> kcache;

  Engine(const chain::ChainModel& m, const chain::SequenceDataset& d, const SvmHyperparams& h,
         const KernelSpec& ks)
      : model(m), data(d), hp(h), kernel(ks), n(static_cast<int>(d.size())) {
    entries.resize(static_cast<std::size_t>(n));
    index.resize(static_cast<std::size_t>(n));
    alpha.resize(static_cast<std::size_t>(n));
    ell_blocks.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
      const int idx = ensure_entry(i, data.examples[static_cast<std::size_t>(i)].labels);
      alpha[static_cast<std::size_t>(i)][static_cast<std::size_t>(idx)] = 1.0;
    }
  }

  int ensure_entry(int i, const std::vector<int>& labels) {
    auto& idx_map = index[static_cast<std::size_t>(i)];
    const std::string key = labeling_key(labels);
    const auto it = idx_map.find(key);
    if (it != idx_map.end()) return it->second;
    Entry e;
    e.labels = labels;
    e.phi = chain::joint_feature_map(model, data.examples[static_cast<std::size_t>(i)], labels);
    e.gid = next_gid++;
    entries[static_cast<std::size_t>(i)].push_back(std::move(e));
    alpha[static_cast<std::size_t>(i)].push_back(0.0);
    const int pos = static_cast<int>(entries[static_cast<std::size_t>(i)].size()) - 1;
    idx_map.emplace(key, pos);
    return pos;
  }

  double raw_k(const SparseVec& a, const SparseVec& b) const {
    const double v = kernel.k(a, b);
    if (!std::isfinite(v)) throw std::runtime_error("kernel produced a non-finite value");
    return v;
  }

  double kv(const Entry& a, const Entry& b) {
    const std::uint64_t lo = static_cast<std::uint64_t>(a.gid < b.gid ? a.gid : b.gid);
    const std::uint64_t hi = static_cast<std::uint64_t>(a.gid < b.gid ? b.gid : a.gid);
    const std::uint64_t key = (lo << 32) | hi;
    const auto it = kcache.find(key);
    if (it != kcache.end()) return it->second;
    const double v = raw_k(a.phi, b.phi);
    kcache.emplace(key, v);
    return v;
  }

  // <psi_i(a), psi_r(b)> in the kernel's feature space; psi of entry 0 (the
  // gold labeling) is identically zero.
  double psi_pair(int i, int a, int r, int b) {
    if (a == 0 || b == 0) return 0.0;
    Entry& gi = entries[static_cast<std::size_t>(i)][0];
    Entry& gr = entries[static_cast<std::size_t>(r)][0];
    Entry& pa = entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)];
    Entry& pb = entries[static_cast<std::size_t>(r)][static_cast<std::size_t>(b)];
    return kv(gi, gr) - kv(gi, pb) - kv(pa, gr) + kv(pa, pb);
  }

  // <S_i, S_r> with S_i = sum_a alpha_i(a) psi_i(a) (unscaled by 1/(lambda n)).
  double block_pair_sum(int i, int r) {
    double s = 0.0;
    const auto& ai = alpha[static_cast<std::size_t>(i)];
    const auto& ar = alpha[static_cast<std::size_t>(r)];
    for (std::size_t a = 1; a < ai.size(); ++a) {
      if (ai[a] == 0.0) continue;
      for (std::size_t b = 1; b < ar.size(); ++b) {
        if (ar[b] == 0.0) continue;
        s += ai[a] * ar[b] * psi_pair(i, static_cast<int>(a), r, static_cast<int>(b));
      }
    }
    return s;
  }

  // <psi_i(a), S_r>.
  double corner_block_sum(int i, int a, int r) {
    double s = 0.0;
    const auto& ar = alpha[static_cast<std::size_t>(r)];
    for (std::size_t b = 1; b < ar.size(); ++b) {
      if (ar[b] == 0.0) continue;
      s += ar[b] * psi_pair(i, a, r, static_cast<int>(b));
    }
    return s;
  }

  // <w, Phi(phi)> * (lambda n), for a candidate feature map of example i.
  double rel_score_unscaled(const SparseVec& phi) {
    double s = 0.0;
    for (int r = 0; r < n; ++r) {
      const auto& ar = alpha[static_cast<std::size_t>(r)];
      const Entry& gr = entries[static_cast<std::size_t>(r)][0];
      for (std::size_t b = 1; b < ar.size(); ++b) {
        if (ar[b] == 0.0) continue;
        const Entry& pb = entries[static_cast<std::size_t>(r)][b];
        s += ar[b] * (raw_k(gr.phi, phi) - raw_k(pb.phi, phi));
      }
    }
    return s;
  }

  // Exhaustive loss-augmented decode through kernel scores.
  chain::DecodeResult decode_generic(int i, std::int64_t cap) {
    const auto& ex = data.examples[static_cast<std::size_t>(i)];
    if (chain::detail_decode::labelings_count(ex.length(), model.n_labels, cap) < 0) {
      throw std::invalid_argument("generic kernels need enumerable label spaces");
    }
    const double inv = 1.0 / (hp.lambda * static_cast<double>(n));
    const double rel_gold =
        inv * rel_score_unscaled(entries[static_cast<std::size_t>(i)][0].phi);
    double best = -std::numeric_limits<double>::infinity();
    std::vector<int> best_y;
    chain::detail_decode::for_each_labeling(ex.length(), model.n_labels,
                                            [&](const std::vector<int>& y) {
      const SparseVec phi = chain::joint_feature_map(model, ex, y);
      const double h =
          chain::loss(hp.loss, ex.labels, y) + inv * rel_score_unscaled(phi) - rel_gold;
      if (h > best) {
        best = h;
        best_y = y;
      }
    });
    chain::DecodeResult out;
    out.labels = std::move(best_y);
    out.h_value = best;
    out.augmented_score = best;
    return out;
  }

  void apply_alpha_step(int i, int idx, double gamma) {
    auto& ai = alpha[static_cast<std::size_t>(i)];
    if (gamma == 1.0) {
      for (auto& v : ai) v = 0.0;
    } else {
      for (auto& v : ai) v *= 1.0 - gamma;
    }
    ai[static_cast<std::size_t>(idx)] += gamma;
  }

  void apply_ell_step(int i, double ell_s, double gamma) {
    double& elli = ell_blocks[static_cast<std::size_t>(i)];
    const double next = (1.0 - gamma) * elli + gamma * ell_s;
    ell += next - elli;
    elli = next;
  }

  DualSparseState snapshot() const {
    DualSparseState st;
    st.alpha.resize(static_cast<std::size_t>(n));
    st.ell = ell;
    st.ell_blocks = ell_blocks;
    for (int i = 0; i < n; ++i) {
      const auto& ai = alpha[static_cast<std::size_t>(i)];
      const auto& ei = entries[static_cast<std::size_t>(i)];
      for (std::size_t a = 0; a < ai.size(); ++a) {
        if (ai[a] != 0.0) {
          st.alpha[static_cast<std::size_t>(i)].emplace(labeling_key(ei[a].labels), ai[a]);
        }
      }
    }
    return st;
  }
};

}  // namespace detail_kernel

// Block-coordinate Frank-Wolfe on the dual with all inner products routed
// through the kernel. Same sampling, cadence, and stopping semantics as the
// primal trainer, so shared seeds align the two solvers step for step.
// Averaging and approximate oracles are not offered here.
inline KernelTrainResult kernelized_bcfw_train(const chain::ChainModel& model,
                                               const chain::SequenceDataset& data,
                                               const SvmHyperparams& hp,
                                               const fw::SolverConfig& config,
                                               const KernelSpec& kernel,
                                               const KernelTrainOptions& opts = {}) {
  validate(hp);
  fw::validate(config);
  detail_svm::check_dataset(model, data);
  if (!kernel.k) throw std::invalid_argument("kernel callback required");
  if (config.averaging != fw::Averaging::none) {
    throw std::invalid_argument("averaging is not offered for the kernelized trainer");
  }
  if (config.oracle.nu != 1.0 || config.oracle.delta != 0.0) {
    throw std::invalid_argument("approximate oracles are not offered for the kernelized trainer");
  }

  const int n = static_cast<int>(data.size());
  const double lambda = hp.lambda;
  const double scale = 1.0 / ((lambda * static_cast<double>(n)) * (lambda * static_cast<double>(n)));
  detail_kernel::Engine eng(model, data, hp, kernel);

  // Declared-linear fast path: the primal image is maintained through the
  // same problem closures the primal trainer uses, so decodes, line search,
  // and the iterate trajectory match it bitwise under a shared seed.
  SvmBlockProblem linear_problem;
  PrimalState shadow;
  if (kernel.declared_linear) {
    linear_problem = build_block_problem(model, data, hp);
    shadow = linear_problem.initial_iterate();
  }

  KernelTrainResult res;
  std::mt19937_64 rng(config.seed);
  const std::int64_t cadence = config.gap_check_every * static_cast<std::int64_t>(n);
  const auto t0 = std::chrono::steady_clock::now();

  struct SweepSlot {
    std::vector<int> labels;
    double h = 0.0;
  };
  std::vector<SweepSlot> sweep(static_cast<std::size_t>(n));
  bool sweep_valid = false;

  for (std::int64_t k = 0;; ++k) {
    if (k % cadence == 0 || k >= config.max_iterations) {
      if (kernel.declared_linear) {
        fw::for_each_block(n, [&](int i) {
          const SvmCorner c = linear_problem.block_lmo(shadow, SvmSlice{}, i);
          sweep[static_cast<std::size_t>(i)] = {c.labels, c.h};
        });
      } else {
        for (int i = 0; i < n; ++i) {
          const auto dec = eng.decode_generic(i, opts.enumeration_cap);
          sweep[static_cast<std::size_t>(i)] = {dec.labels, dec.h_value};
        }
      }
      res.oracle_calls += n;
      sweep_valid = true;

      double ss = 0.0;
      double gap = 0.0;
      double mean_h = 0.0;
      for (int i = 0; i < n; ++i) {
        double si_s = 0.0;
        for (int r = 0; r < n; ++r) si_s += eng.block_pair_sum(i, r);
        ss += si_s;
        gap += lambda * scale * si_s - eng.ell_blocks[static_cast<std::size_t>(i)] +
               sweep[static_cast<std::size_t>(i)].h / static_cast<double>(n);
        mean_h += sweep[static_cast<std::size_t>(i)].h / static_cast<double>(n);
      }
      const double wnorm_sq = scale * ss;
      TraceRecord row;
      row.effective_passes = static_cast<double>(res.oracle_calls) / static_cast<double>(n);
      row.k = k;
      row.primal = 0.5 * lambda * wnorm_sq + mean_h;
      row.dual = eng.ell - 0.5 * lambda * wnorm_sq;
      row.gap = gap;
      if (kernel.declared_linear && opts.record_errors) {
        row.train_error = chain::test_error(model, shadow.w, data, hp.loss);
        if (opts.test_data != nullptr) {
          row.test_error = chain::test_error(model, shadow.w, *opts.test_data, hp.loss);
        }
      }
      row.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      res.trace.push_back(row);
      if (gap <= config.gap_tolerance) {
        res.converged = true;
        break;
      }
      if (k >= config.max_iterations) break;
    }

    const int i = static_cast<int>(detail::uniform_below(rng, static_cast<std::uint64_t>(n)));
    const auto& ex = data.examples[static_cast<std::size_t>(i)];
    std::vector<int> labels;
    double h = 0.0;
    if (sweep_valid) {
      labels = sweep[static_cast<std::size_t>(i)].labels;
      h = sweep[static_cast<std::size_t>(i)].h;
    } else if (kernel.declared_linear) {
      const SvmCorner c = linear_problem.block_lmo(shadow, SvmSlice{}, i);
      labels = c.labels;
      h = c.h;
      res.oracle_calls += 1;
    } else {
      const auto dec = eng.decode_generic(i, opts.enumeration_cap);
      labels = dec.labels;
      h = dec.h_value;
      res.oracle_calls += 1;
    }
    const double ell_s = chain::loss(hp.loss, ex.labels, labels) / static_cast<double>(n);
    const int idx = eng.ensure_entry(i, labels);

    double gamma;
    SvmCorner corner;
    corner.example = i;
    corner.labels = labels;
    corner.h = h;
    corner.ell_s = ell_s;
    if (config.step_rule == fw::StepRule::line_search) {
      if (kernel.declared_linear) {
        gamma = linear_problem.exact_line_search(shadow, i, corner);
      } else {
        double si_s = 0.0;
        double c_s = 0.0;
        for (int r = 0; r < n; ++r) {
          si_s += eng.block_pair_sum(i, r);
          c_s += eng.corner_block_sum(i, idx, r);
        }
        const double num = lambda * scale * (si_s - c_s) -
                           eng.ell_blocks[static_cast<std::size_t>(i)] + ell_s;
        const double den = lambda * scale *
                           (eng.block_pair_sum(i, i) - 2.0 * eng.corner_block_sum(i, idx, i) +
                            eng.psi_pair(i, idx, i, idx));
        gamma = detail_svm::line_search_from_parts(num, den);
      }
    } else {
      gamma = fw::predefined_step_size(k, n, 1.0);
    }

    eng.apply_alpha_step(i, idx, gamma);
    eng.apply_ell_step(i, ell_s, gamma);
    if (kernel.declared_linear) linear_problem.apply_step(shadow, i, corner, gamma);
    sweep_valid = false;
    if (opts.on_iterate) opts.on_iterate(k, eng.snapshot());
  }

  res.state = eng.snapshot();
  if (kernel.declared_linear) {
    res.w = shadow.w;
    res.ell = shadow.ell;
  } else {
    res.ell = eng.ell;
  }
  return res;
}

}  // namespace svm
}  // namespace bcfw
