#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "bcfw/chain/decode.hpp"
#include "bcfw/chain/model.hpp"
#include "bcfw/detail/vec.hpp"
#include "bcfw/svm/types.hpp"

namespace bcfw {
namespace svm {

// max_y ||psi_i(y)||_2 for one example. Exact by enumeration when the label
// space fits under cap; otherwise the triangle-inequality bound
//   sqrt(2) * (sum_t ||x_t||_2 + (T-1) + 2),
// from per-position emission differences (disjoint slices of norm
// sqrt(2)*||x_t|| at worst), one +/-1 transition pair per boundary, and the
// start/stop indicator pairs. Returns (value, exact?).
inline std::pair<double, bool> block_feature_radius(const chain::ChainModel& model,
                                                    const chain::SequenceExample& x,
                                                    std::int64_t cap = 4096) {
  const int T = x.length();
  if (chain::detail_decode::labelings_count(T, model.n_labels, cap) >= 0) {
    double best_sq = 0.0;
    chain::detail_decode::for_each_labeling(T, model.n_labels, [&](const std::vector<int>& y) {
      const double nsq = norm_sq(chain::feature_difference(model, x, y));
      if (nsq > best_sq) best_sq = nsq;
    });
    return {std::sqrt(best_sq), true};
  }
  double per_position = 0.0;
  for (const auto& pos : x.positions) {
    double nsq = 0.0;
    for (const auto& [f, v] : pos) nsq += v * v;
    per_position += std::sqrt(nsq);
  }
  return {std::sqrt(2.0) * (per_position + static_cast<double>(T - 1) + 2.0), false};
}

// Scale constants of the instantiated dual: R, L_max, and the curvature
// bounds Cf <= 4R^2/lambda (single block) and Cprod = Cf/n (sum over the
// product domain).
inline ProblemConstants curvature_bounds(const chain::ChainModel& model,
                                         const chain::SequenceDataset& data,
                                         const SvmHyperparams& hp, std::int64_t cap = 4096) {
  validate(hp);
  ProblemConstants out;
  out.R_exact = true;
  for (const auto& x : data.examples) {
    const auto [r, exact] = block_feature_radius(model, x, cap);
    if (r > out.R) out.R = r;
    out.R_exact = out.R_exact && exact;
    // A fully mismatched labeling exists whenever there are >= 2 labels.
    const double lmax = model.n_labels > 1
                            ? chain::loss_unit(hp.loss, x.length()) * static_cast<double>(x.length())
                            : 0.0;
    if (lmax > out.L_max) out.L_max = lmax;
  }
  out.Cf_bound = 4.0 * out.R * out.R / hp.lambda;
  out.Cprod_bound = out.Cf_bound / static_cast<double>(data.size());
  return out;
}

// Per-block curvature bounds 4 R_i^2 / (lambda n^2), the constants the
// additive-oracle wrapper consumes.
inline std::vector<double> per_block_curvature_bounds(const chain::ChainModel& model,
                                                      const chain::SequenceDataset& data,
                                                      double lambda, std::int64_t cap = 4096) {
  const double n = static_cast<double>(data.size());
  std::vector<double> out;
  out.reserve(data.size());
  for (const auto& x : data.examples) {
    const double r = block_feature_radius(model, x, cap).first;
    out.push_back(4.0 * r * r / (lambda * n * n));
  }
  return out;
}

}  // namespace svm
}  // namespace bcfw
