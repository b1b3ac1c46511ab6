#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "bcfw/chain/decode.hpp"
#include "bcfw/chain/model.hpp"
#include "bcfw/detail/vec.hpp"
#include "bcfw/fw/gap.hpp"
#include "bcfw/svm/types.hpp"

namespace bcfw {
namespace svm {

// Dual objective in its maximization form, b^T alpha - (lambda/2)||A alpha||^2.
// The solvers minimize its negation f(alpha) = (lambda/2)||w||^2 - ell.
inline double dual_objective(double lambda, const DenseVec& w, double ell) {
  return ell - 0.5 * lambda * norm_sq(w);
}

inline double primal_value(double lambda, const DenseVec& w, double mean_h) {
  return 0.5 * lambda * norm_sq(w) + mean_h;
}

namespace detail_svm {

// Closed-form step for the quadratic restricted to the segment toward the
// corner, clipped to [0, 1]:
//   gamma = [lambda (w_i - w_s)^T w - ell_i + ell_s] / [lambda ||w_i - w_s||^2]
// Degenerate denominator (w_i = w_s): 1 if the numerator is positive else 0.
inline double line_search_from_parts(double num, double den) {
  if (den <= 0.0) return num > 0.0 ? 1.0 : 0.0;
  return std::clamp(num / den, 0.0, 1.0);
}

}  // namespace detail_svm

inline double block_line_search(double lambda, const DenseVec& w, const DenseVec& w_i,
                                const DenseVec& w_s, double ell_i, double ell_s) {
  const double num = lambda * (dot(w_i, w) - dot(w_s, w)) - ell_i + ell_s;
  double den = 0.0;
  for (std::size_t j = 0; j < w_i.size(); ++j) {
    const double d = w_i[j] - w_s[j];
    den += d * d;
  }
  return detail_svm::line_search_from_parts(num, lambda * den);
}

inline double block_line_search(double lambda, const DenseVec& w, const SparseVec& w_i,
                                const SparseVec& w_s, double ell_i, double ell_s) {
  const double num = lambda * (dot(w_i, w) - dot(w_s, w)) - ell_i + ell_s;
  return detail_svm::line_search_from_parts(num, lambda * diff_norm_sq(w_i, w_s));
}

// One full pass of exact loss-augmented decodes at w, with the aggregates
// every consumer needs. Decodes may fan out across threads (BCFW_THREADS);
// aggregation always runs in ascending example order.
struct SweepResult {
  std::vector<chain::DecodeResult> decodes;  // per example
  DenseVec w_s;                              // sum_i psi_i(y_i*) / (lambda n)
  double ell_s = 0.0;                        // sum_i Delta_i(y_i*) / n
  double mean_h = 0.0;                       // (1/n) sum_i H_i(y_i*; w)
};

inline SweepResult sweep_decodes(const chain::ChainModel& model, const chain::SequenceDataset& data,
                                 const SvmHyperparams& hp, const DenseVec& w) {
  validate(hp);
  const int n = static_cast<int>(data.size());
  if (n < 1) throw std::invalid_argument("empty dataset");
  SweepResult out;
  out.decodes.resize(static_cast<std::size_t>(n));
  fw::for_each_block(n, [&](int i) {
    out.decodes[static_cast<std::size_t>(i)] =
        chain::viterbi_loss_augmented_decode(model, w, data.examples[static_cast<std::size_t>(i)], hp.loss);
  });
  out.w_s.assign(w.size(), 0.0);
  const double inv_ln = 1.0 / (hp.lambda * static_cast<double>(n));
  for (int i = 0; i < n; ++i) {
    const auto& dec = out.decodes[static_cast<std::size_t>(i)];
    const auto& x = data.examples[static_cast<std::size_t>(i)];
    const SparseVec psi = chain::feature_difference(model, x, dec.labels);
    add_scaled(out.w_s, psi, inv_ln);
    out.ell_s += chain::loss(hp.loss, x.labels, dec.labels) / static_cast<double>(n);
    out.mean_h += dec.h_value / static_cast<double>(n);
  }
  return out;
}

// Primal objective at w: (lambda/2)||w||^2 + (1/n) sum_i max_y H_i(y; w).
// Costs one effective pass of decodes.
inline double primal_objective(const chain::ChainModel& model, const chain::SequenceDataset& data,
                               const SvmHyperparams& hp, const DenseVec& w) {
  return primal_value(hp.lambda, w, sweep_decodes(model, data, hp, w).mean_h);
}

struct GapEvaluation {
  double gap = 0.0;     // lambda w^T (w - w_s) - ell + ell_s
  double primal = 0.0;  // (lambda/2)||w||^2 + mean_h
  double dual = 0.0;    // ell - (lambda/2)||w||^2
  double mean_h = 0.0;
};

// Duality gap of the state (w, ell), from one pass of exact decodes. Needs
// only the totals, not the per-block split, so it also serves saved models.
inline GapEvaluation svm_duality_gap(const chain::ChainModel& model, const chain::SequenceDataset& data,
                                     const SvmHyperparams& hp, const DenseVec& w, double ell) {
  const SweepResult sweep = sweep_decodes(model, data, hp, w);
  GapEvaluation out;
  out.gap = hp.lambda * (dot(w, w) - dot(sweep.w_s, w)) - ell + sweep.ell_s;
  out.primal = primal_value(hp.lambda, w, sweep.mean_h);
  out.dual = dual_objective(hp.lambda, w, ell);
  out.mean_h = sweep.mean_h;
  return out;
}

}  // namespace svm
}  // namespace bcfw
