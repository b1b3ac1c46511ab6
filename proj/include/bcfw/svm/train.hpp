#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bcfw/chain/decode.hpp"
#include "bcfw/chain/metrics.hpp"
#include "bcfw/chain/model.hpp"
#include "bcfw/detail/rng.hpp"
#include "bcfw/detail/vec.hpp"
#include "bcfw/fw/solver.hpp"
#include "bcfw/svm/objectives.hpp"
#include "bcfw/svm/problem.hpp"
#include "bcfw/svm/types.hpp"

namespace bcfw {
namespace svm {

// Pluggable loss-augmented decoder for step directions (beam, brute force,
// anything honoring the decode contract). Certificate sweeps always run the
// exact Viterbi decoder regardless, so stopping stays sound.
using Decoder = std::function<chain::DecodeResult(const chain::ChainModel&, const DenseVec&,
                                                  const chain::SequenceExample&,
                                                  const chain::LossSpec&)>;

inline Decoder beam_step_decoder(int width) {
  return [width](const chain::ChainModel& m, const DenseVec& w, const chain::SequenceExample& x,
                 const chain::LossSpec& spec) { return chain::beam_decode(m, w, x, spec, width); };
}

struct TrainOptions {
  const chain::SequenceDataset* test_data = nullptr;
  bool record_errors = true;
  // Replays the step log in extended precision after the run and reports the
  // worst deviation of the incrementally maintained ell values.
  bool check_ell_drift = false;
  Decoder step_decoder;  // empty: exact decodes through the problem's LMO
};

struct BcfwTrainResult {
  PrimalState state;
  fw::AveragingState<PrimalState> averaging;
  ConvergenceTrace trace;
  std::int64_t oracle_calls = 0;
  bool converged = false;
  double ell_drift = 0.0;
  // Final evaluation point: the averaged iterate under averaging, else the
  // last iterate. Matches the last trace row.
  DenseVec eval_w;
  double eval_ell = 0.0;
};

namespace detail_svm {

inline void fill_checkpoint_metrics(TraceRecord& row, const chain::ChainModel& model,
                                    const chain::SequenceDataset& data, const SvmHyperparams& hp,
                                    const TrainOptions& opts, const DenseVec& w, double ell,
                                    double mean_h) {
  row.primal = primal_value(hp.lambda, w, mean_h);
  row.dual = dual_objective(hp.lambda, w, ell);
  if (opts.record_errors) {
    row.train_error = chain::test_error(model, w, data, hp.loss);
    if (opts.test_data != nullptr) {
      row.test_error = chain::test_error(model, w, *opts.test_data, hp.loss);
    }
  }
}

struct StepLogEntry {
  int block = -1;
  double gamma = 0.0;
  double ell_s = 0.0;
};

// Replays the ell recurrences in extended precision and returns the largest
// absolute deviation from the incrementally maintained values.
inline double ell_drift_from_log(const std::vector<StepLogEntry>& log, const PrimalState& st) {
  std::vector<long double> replay(st.ell_blocks.size(), 0.0L);
  for (const auto& e : log) {
    auto& l = replay[static_cast<std::size_t>(e.block)];
    l = (1.0L - static_cast<long double>(e.gamma)) * l +
        static_cast<long double>(e.gamma) * static_cast<long double>(e.ell_s);
  }
  long double total = 0.0L;
  double worst = 0.0;
  for (std::size_t i = 0; i < replay.size(); ++i) {
    total += replay[i];
    const double d = std::fabs(static_cast<double>(replay[i]) - st.ell_blocks[i]);
    if (d > worst) worst = d;
  }
  const double dt = std::fabs(static_cast<double>(total) - st.ell);
  return dt > worst ? dt : worst;
}

}  // namespace detail_svm

// Block-coordinate Frank-Wolfe training (one decode per step, periodic full
// gap certificates). The trace carries primal, dual, gap, and error columns
// at every checkpoint, all evaluated at the same point the stopping rule
// certifies.
inline BcfwTrainResult bcfw_train(const chain::ChainModel& model, const chain::SequenceDataset& data,
                                  const SvmHyperparams& hp, const fw::SolverConfig& config,
                                  const TrainOptions& opts = {}) {
  SvmBlockProblem p = build_block_problem(model, data, hp);
  const int n = p.n_blocks;

  auto log = std::make_shared<std::vector<detail_svm::StepLogEntry>>();
  if (opts.check_ell_drift) {
    auto inner = p.apply_step;
    p.apply_step = [inner, log](PrimalState& x, int i, const SvmCorner& c, double gamma) {
      log->push_back({i, gamma, c.ell_s});
      inner(x, i, c, gamma);
    };
  }

  fw::SolveHooks<PrimalState, SvmSlice, SvmCorner> hooks;
  if (opts.step_decoder) {
    const chain::ChainModel* pm = &model;
    const chain::SequenceDataset* pd = &data;
    hooks.step_oracle = [pm, pd, hp, n, dec = opts.step_decoder](
                            const PrimalState& x, const SvmSlice&, int i, std::int64_t) {
      const auto& ex = pd->examples[static_cast<std::size_t>(i)];
      auto d = dec(*pm, x.w, ex, hp.loss);
      SvmCorner c;
      c.example = i;
      c.h = d.h_value;
      c.ell_s = chain::loss(hp.loss, ex.labels, d.labels) / static_cast<double>(n);
      c.labels = std::move(d.labels);
      return c;
    };
  }
  hooks.on_checkpoint = [&](TraceRecord& row, const PrimalState& st,
                            const std::vector<SvmCorner>& corners) {
    double mean_h = 0.0;
    for (const auto& c : corners) mean_h += c.h;
    mean_h /= static_cast<double>(n);
    detail_svm::fill_checkpoint_metrics(row, model, data, hp, opts, st.w, st.ell, mean_h);
  };

  auto res = fw::bcfw_solve(p, config, hooks);
  BcfwTrainResult out;
  out.state = std::move(res.x);
  out.averaging = std::move(res.averaging);
  out.trace = std::move(res.trace);
  out.oracle_calls = res.oracle_calls;
  out.converged = res.converged;
  if (config.averaging == fw::Averaging::weighted) {
    out.eval_w = out.averaging.weighted_avg.w;
    out.eval_ell = out.averaging.weighted_avg.ell;
  } else if (config.averaging == fw::Averaging::suffix) {
    const PrimalState s = fw::suffix_average(out.averaging);
    out.eval_w = s.w;
    out.eval_ell = s.ell;
  } else {
    out.eval_w = out.state.w;
    out.eval_ell = out.state.ell;
  }
  if (opts.check_ell_drift) out.ell_drift = detail_svm::ell_drift_from_log(*log, out.state);
  return out;
}

struct BatchTrainResult {
  BatchState state;
  ConvergenceTrace trace;
  std::int64_t oracle_calls = 0;  // full decode passes
  bool converged = false;
};

// Plain Frank-Wolfe on the batch view: every iteration decodes the whole
// dataset and the certificate comes free.
inline BatchTrainResult batch_fw_train(const chain::ChainModel& model,
                                       const chain::SequenceDataset& data, const SvmHyperparams& hp,
                                       const fw::SolverConfig& config, const TrainOptions& opts = {}) {
  if (opts.step_decoder) {
    throw std::invalid_argument("custom step decoders apply to the block solver only");
  }
  SvmBatchProblem p = build_batch_problem(model, data, hp);
  fw::SolveHooks<BatchState, SvmSlice, BatchCorner> hooks;
  hooks.on_checkpoint = [&](TraceRecord& row, const BatchState& st,
                            const std::vector<BatchCorner>& corners) {
    detail_svm::fill_checkpoint_metrics(row, model, data, hp, opts, st.w, st.ell,
                                        corners.front().mean_h);
  };
  auto res = fw::fw_solve(p, config, hooks);
  BatchTrainResult out;
  out.state = std::move(res.x);
  out.trace = std::move(res.trace);
  out.oracle_calls = res.oracle_calls;
  out.converged = res.converged;
  return out;
}

struct SsgResult {
  DenseVec w;
  DenseVec w_avg;                  // weighted-average iterate, always maintained
  std::vector<DenseVec> iterates;  // w^(0..K) when recorded
  ConvergenceTrace trace;
  std::int64_t oracle_calls = 0;
};

struct SsgOptions {
  const chain::SequenceDataset* test_data = nullptr;
  bool record_errors = true;
  bool record_iterates = false;
};

// Stochastic subgradient on the primal with the step size 1/(lambda (k+1)):
//   w <- w - gamma_k (lambda w - psi_i(y_i*)).
// Primal-only: trace rows carry primal and errors; dual and gap stay empty.
// config.averaging selects the point checkpoints evaluate (none -> the
// iterate, weighted -> the running average); suffix is not offered.
// config.gap_tolerance must be 0 (there is no gap to stop on) and
// config.step_rule is ignored.
inline SsgResult ssg_train(const chain::ChainModel& model, const chain::SequenceDataset& data,
                           const SvmHyperparams& hp, const fw::SolverConfig& config,
                           const SsgOptions& opts = {}) {
  validate(hp);
  validate(config);
  detail_svm::check_dataset(model, data);
  if (config.gap_tolerance > 0.0) {
    throw std::invalid_argument("subgradient training has no gap certificate to stop on");
  }
  if (config.averaging == fw::Averaging::suffix) {
    throw std::invalid_argument("suffix averaging is not offered for subgradient training");
  }
  const int n = static_cast<int>(data.size());
  SsgResult out;
  out.w.assign(static_cast<std::size_t>(model.weight_dim()), 0.0);
  fw::AveragingState<DenseVec> avg;
  fw::init_averaging(avg, out.w);
  if (opts.record_iterates) out.iterates.push_back(out.w);
  std::mt19937_64 rng(config.seed);
  const std::int64_t cadence = config.gap_check_every * static_cast<std::int64_t>(n);
  const auto t0 = std::chrono::steady_clock::now();

  TrainOptions metric_opts;
  metric_opts.test_data = opts.test_data;
  metric_opts.record_errors = opts.record_errors;

  for (std::int64_t k = 0;; ++k) {
    if (k % cadence == 0 || k >= config.max_iterations) {
      const DenseVec& eval = config.averaging == fw::Averaging::weighted ? avg.weighted_avg : out.w;
      const SweepResult sweep = sweep_decodes(model, data, hp, eval);
      out.oracle_calls += n;
      TraceRecord row;
      row.effective_passes = static_cast<double>(out.oracle_calls) / static_cast<double>(n);
      row.k = k;
      row.primal = primal_value(hp.lambda, eval, sweep.mean_h);
      if (metric_opts.record_errors) {
        row.train_error = chain::test_error(model, eval, data, hp.loss);
        if (metric_opts.test_data != nullptr) {
          row.test_error = chain::test_error(model, eval, *metric_opts.test_data, hp.loss);
        }
      }
      row.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      out.trace.push_back(row);
      if (k >= config.max_iterations) break;
    }
    const int i = static_cast<int>(detail::uniform_below(rng, static_cast<std::uint64_t>(n)));
    const auto& ex = data.examples[static_cast<std::size_t>(i)];
    const auto dec = chain::viterbi_loss_augmented_decode(model, out.w, ex, hp.loss);
    out.oracle_calls += 1;
    const double gamma = 1.0 / (hp.lambda * static_cast<double>(k + 1));
    const SparseVec psi = chain::feature_difference(model, ex, dec.labels);
    const double keep = 1.0 - gamma * hp.lambda;
    for (auto& v : out.w) v *= keep;
    add_scaled(out.w, psi, gamma);
    fw::update_weighted_average(avg, out.w, k);
    if (opts.record_iterates) out.iterates.push_back(out.w);
  }
  out.w_avg = avg.weighted_avg;
  return out;
}

// Batch subgradient descent with a caller-supplied step schedule; returns the
// whole iterate sequence w^(0..K). With beta_k = gamma_k / lambda this is the
// batch Frank-Wolfe update written in primal variables.
inline std::vector<DenseVec> batch_subgradient_train(const chain::ChainModel& model,
                                                     const chain::SequenceDataset& data,
                                                     const SvmHyperparams& hp,
                                                     const std::function<double(std::int64_t)>& beta,
                                                     std::int64_t iterations) {
  validate(hp);
  detail_svm::check_dataset(model, data);
  if (!beta) throw std::invalid_argument("step schedule required");
  std::vector<DenseVec> out;
  out.reserve(static_cast<std::size_t>(iterations) + 1);
  DenseVec w(static_cast<std::size_t>(model.weight_dim()), 0.0);
  out.push_back(w);
  for (std::int64_t k = 0; k < iterations; ++k) {
    const double b = beta(k);
    if (!(b >= 0.0 && b <= 1.0 / hp.lambda)) {
      throw std::invalid_argument("beta_k must lie in [0, 1/lambda]");
    }
    const SweepResult sweep = sweep_decodes(model, data, hp, w);
    bcfw::scale_add(w, 1.0 - b * hp.lambda, sweep.w_s, b * hp.lambda);
    out.push_back(w);
  }
  return out;
}

}  // namespace svm
}  // namespace bcfw
