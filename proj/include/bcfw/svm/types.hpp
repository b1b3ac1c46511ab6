#pragma once

#include <stdexcept>
#include <vector>

#include "bcfw/chain/model.hpp"
#include "bcfw/detail/vec.hpp"

namespace bcfw {
namespace svm {

struct SvmHyperparams {
  double lambda = 0.0;
  chain::LossSpec loss{};
};

inline void validate(const SvmHyperparams& hp) {
  if (!(hp.lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
}

// Primal image of the block-separable dual iterate: w = A alpha (dense) and
// ell = b^T alpha, together with the per-example contributions they sum.
// w_i are kept sparse; each block's support is the union of the feature
// differences it has stepped toward. The dual vector alpha itself
// (exponentially many coordinates) is never materialized.
struct PrimalState {
  DenseVec w;
  double ell = 0.0;
  std::vector<SparseVec> w_blocks;
  std::vector<double> ell_blocks;

  int n_blocks() const { return static_cast<int>(w_blocks.size()); }
};

inline PrimalState zero_state(int n, int dim) {
  PrimalState st;
  st.w.assign(static_cast<std::size_t>(dim), 0.0);
  st.w_blocks.resize(static_cast<std::size_t>(n));
  st.ell_blocks.assign(static_cast<std::size_t>(n), 0.0);
  return st;
}

// y = a*y + b*x over every component; the averaging recurrences run on whole
// states so that averaged iterates still carry per-block data for gap sweeps.
inline void scale_add(PrimalState& y, double a, const PrimalState& x, double b) {
  if (y.w_blocks.size() != x.w_blocks.size()) {
    throw std::invalid_argument("scale_add: block count mismatch");
  }
  bcfw::scale_add(y.w, a, x.w, b);
  y.ell = a * y.ell + b * x.ell;
  for (std::size_t i = 0; i < y.w_blocks.size(); ++i) {
    y.w_blocks[i] = linear_combine(a, y.w_blocks[i], b, x.w_blocks[i]);
  }
  for (std::size_t i = 0; i < y.ell_blocks.size(); ++i) {
    y.ell_blocks[i] = a * y.ell_blocks[i] + b * x.ell_blocks[i];
  }
}

// Simplex corner of one block: the unit weight on labeling `labels` of
// example `example`. h and ell_s are the decode byproducts at the iterate
// the corner was computed from; block_gap and the trace metrics read h, so
// a corner is only meaningful at that iterate. The feature difference is
// materialized lazily when the corner is stepped toward.
struct SvmCorner {
  int example = -1;
  std::vector<int> labels;
  double h = 0.0;     // H_i(labels; w) at the originating iterate
  double ell_s = 0.0; // Delta_i(labels) / n
};

// The block gradient is fully determined by the current w, which block_lmo
// and block_gap read straight from the iterate; nothing to carry.
struct SvmSlice {};

// Curvature and scale constants of one instantiated problem.
struct ProblemConstants {
  double R = 0.0;            // max_{i,y} ||psi_i(y)||_2 (or documented upper bound)
  double L_max = 0.0;        // max_{i,y} Delta_i(y)
  double Cf_bound = 0.0;     // 4 R^2 / lambda
  double Cprod_bound = 0.0;  // Cf_bound / n
  bool R_exact = false;      // true when R came from exhaustive enumeration
};

}  // namespace svm
}  // namespace bcfw
