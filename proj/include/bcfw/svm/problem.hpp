#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bcfw/chain/decode.hpp"
#include "bcfw/chain/model.hpp"
#include "bcfw/detail/vec.hpp"
#include "bcfw/fw/block_problem.hpp"
#include "bcfw/svm/constants.hpp"
#include "bcfw/svm/objectives.hpp"
#include "bcfw/svm/types.hpp"

namespace bcfw {
namespace svm {

using SvmBlockProblem = fw::BlockProblem<PrimalState, SvmSlice, SvmCorner>;

namespace detail_svm {

inline void check_dataset(const chain::ChainModel& model, const chain::SequenceDataset& data) {
  if (data.examples.empty()) throw std::invalid_argument("empty dataset");
  if (data.n_labels != model.n_labels || data.n_features != model.n_features) {
    throw std::invalid_argument("dataset does not match the model layout");
  }
}

inline void check_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("step size outside [0, 1]");
}

// w_s = psi_i(y) / (lambda n), the corner's image under A.
inline SparseVec corner_direction(const chain::ChainModel& model, const chain::SequenceExample& x,
                                  const std::vector<int>& labels, double lambda, int n) {
  SparseVec ws = chain::feature_difference(model, x, labels);
  const double inv = 1.0 / (lambda * static_cast<double>(n));
  for (auto& v : ws.val) v *= inv;
  return ws;
}

}  // namespace detail_svm

// The structural SVM dual as a block problem over the product of one simplex
// per example: minimize (lambda/2)||A alpha||^2 - b^T alpha, represented by
// its primal image (w, ell) plus per-block contributions. The returned
// problem holds references to model and data; both must outlive it.
//
// block_lmo runs the exact loss-augmented Viterbi decode. enumerate_corners
// is provided only when every example's label space fits under
// enumeration_cap.
inline SvmBlockProblem build_block_problem(const chain::ChainModel& model,
                                           const chain::SequenceDataset& data,
                                           const SvmHyperparams& hp,
                                           std::int64_t enumeration_cap = 4096) {
  validate(hp);
  detail_svm::check_dataset(model, data);
  const int n = static_cast<int>(data.size());
  const double lambda = hp.lambda;
  const int dim = model.weight_dim();
  const chain::ChainModel* pm = &model;
  const chain::SequenceDataset* pd = &data;
  const chain::LossSpec loss = hp.loss;

  SvmBlockProblem p;
  p.n_blocks = n;
  p.block_curvature_bounds = per_block_curvature_bounds(model, data, lambda, enumeration_cap);
  p.initial_iterate = [n, dim] { return zero_state(n, dim); };
  p.objective_value = [lambda](const PrimalState& x) {
    return 0.5 * lambda * norm_sq(x.w) - x.ell;
  };
  p.block_gradient = [](const PrimalState&, int) { return SvmSlice{}; };
  p.block_lmo = [pm, pd, loss, n](const PrimalState& x, const SvmSlice&, int i) {
    const auto& ex = pd->examples[static_cast<std::size_t>(i)];
    auto dec = chain::viterbi_loss_augmented_decode(*pm, x.w, ex, loss);
    SvmCorner c;
    c.example = i;
    c.h = dec.h_value;
    c.ell_s = chain::loss(loss, ex.labels, dec.labels) / static_cast<double>(n);
    c.labels = std::move(dec.labels);
    return c;
  };
  p.block_gap = [lambda, n](const PrimalState& x, const SvmSlice&, int i, const SvmCorner& c) {
    return lambda * dot(x.w_blocks[static_cast<std::size_t>(i)], x.w) -
           x.ell_blocks[static_cast<std::size_t>(i)] + c.h / static_cast<double>(n);
  };
  p.apply_step = [pm, pd, lambda, n](PrimalState& x, int i, const SvmCorner& c, double gamma) {
    detail_svm::check_gamma(gamma);
    const auto& ex = pd->examples[static_cast<std::size_t>(i)];
    const SparseVec ws = detail_svm::corner_direction(*pm, ex, c.labels, lambda, n);
    SparseVec& wi = x.w_blocks[static_cast<std::size_t>(i)];
    SparseVec wi_new = linear_combine(1.0 - gamma, wi, gamma, ws);
    add_scaled(x.w, sparse_diff(wi_new, wi), 1.0);  // w += w_i_new - w_i
    wi = std::move(wi_new);
    double& elli = x.ell_blocks[static_cast<std::size_t>(i)];
    const double elli_new = (1.0 - gamma) * elli + gamma * c.ell_s;
    x.ell += elli_new - elli;
    elli = elli_new;
  };
  p.exact_line_search = [pm, pd, lambda, n](const PrimalState& x, int i, const SvmCorner& c) {
    const auto& ex = pd->examples[static_cast<std::size_t>(i)];
    const SparseVec ws = detail_svm::corner_direction(*pm, ex, c.labels, lambda, n);
    return block_line_search(lambda, x.w, x.w_blocks[static_cast<std::size_t>(i)], ws,
                             x.ell_blocks[static_cast<std::size_t>(i)], c.ell_s);
  };

  bool enumerable = true;
  for (const auto& ex : data.examples) {
    if (chain::detail_decode::labelings_count(ex.length(), model.n_labels, enumeration_cap) < 0) {
      enumerable = false;
      break;
    }
  }
  if (enumerable) {
    p.enumerate_corners = [pm, pd, loss, lambda, n,
                           enumeration_cap](const PrimalState& x, const SvmSlice&, int i) {
      const auto& ex = pd->examples[static_cast<std::size_t>(i)];
      const double base = lambda * dot(x.w_blocks[static_cast<std::size_t>(i)], x.w) -
                          x.ell_blocks[static_cast<std::size_t>(i)];
      const auto tb = chain::detail_decode::build_tables(*pm, x.w, ex, true, loss);
      const double gold = chain::detail_decode::path_score(tb, ex.labels);
      std::vector<std::pair<SvmCorner, double>> out;
      out.reserve(static_cast<std::size_t>(
          chain::detail_decode::labelings_count(ex.length(), pm->n_labels, enumeration_cap)));
      chain::detail_decode::for_each_labeling(ex.length(), pm->n_labels, [&](const std::vector<int>& y) {
        SvmCorner c;
        c.example = i;
        c.labels = y;
        c.h = chain::detail_decode::path_score(tb, y) - gold;
        c.ell_s = chain::loss(loss, ex.labels, y) / static_cast<double>(n);
        const double gap = base + c.h / static_cast<double>(n);
        out.emplace_back(std::move(c), gap);
      });
      return out;
    };
  }
  return p;
}

// Batch view of the same dual: a single block whose LMO stacks all n decodes
// into one aggregated corner. Used by plain Frank-Wolfe and by the
// FW/subgradient equivalence.
struct BatchState {
  DenseVec w;
  double ell = 0.0;
};

inline void scale_add(BatchState& y, double a, const BatchState& x, double b) {
  bcfw::scale_add(y.w, a, x.w, b);
  y.ell = a * y.ell + b * x.ell;
}

struct BatchCorner {
  DenseVec w_s;
  double ell_s = 0.0;
  double mean_h = 0.0;  // (1/n) sum_i H_i at the originating iterate
};

using SvmBatchProblem = fw::BlockProblem<BatchState, SvmSlice, BatchCorner>;

inline SvmBatchProblem build_batch_problem(const chain::ChainModel& model,
                                           const chain::SequenceDataset& data,
                                           const SvmHyperparams& hp) {
  validate(hp);
  detail_svm::check_dataset(model, data);
  const double lambda = hp.lambda;
  const int dim = model.weight_dim();
  const chain::ChainModel* pm = &model;
  const chain::SequenceDataset* pd = &data;
  const SvmHyperparams hyper = hp;

  SvmBatchProblem p;
  p.n_blocks = 1;
  p.block_curvature_bounds = {curvature_bounds(model, data, hp).Cf_bound};
  p.initial_iterate = [dim] {
    BatchState st;
    st.w.assign(static_cast<std::size_t>(dim), 0.0);
    return st;
  };
  p.objective_value = [lambda](const BatchState& x) {
    return 0.5 * lambda * norm_sq(x.w) - x.ell;
  };
  p.block_gradient = [](const BatchState&, int) { return SvmSlice{}; };
  p.block_lmo = [pm, pd, hyper](const BatchState& x, const SvmSlice&, int) {
    const SweepResult sweep = sweep_decodes(*pm, *pd, hyper, x.w);
    BatchCorner c;
    c.w_s = sweep.w_s;
    c.ell_s = sweep.ell_s;
    c.mean_h = sweep.mean_h;
    return c;
  };
  p.block_gap = [lambda](const BatchState& x, const SvmSlice&, int, const BatchCorner& c) {
    return lambda * (dot(x.w, x.w) - dot(c.w_s, x.w)) - x.ell + c.ell_s;
  };
  p.apply_step = [](BatchState& x, int, const BatchCorner& c, double gamma) {
    detail_svm::check_gamma(gamma);
    bcfw::scale_add(x.w, 1.0 - gamma, c.w_s, gamma);
    x.ell = (1.0 - gamma) * x.ell + gamma * c.ell_s;
  };
  p.exact_line_search = [lambda](const BatchState& x, int, const BatchCorner& c) {
    return block_line_search(lambda, x.w, x.w, c.w_s, x.ell, c.ell_s);
  };
  return p;
}

}  // namespace svm
}  // namespace bcfw
