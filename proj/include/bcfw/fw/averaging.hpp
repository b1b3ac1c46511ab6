#pragma once

#include <cstdint>
#include <stdexcept>

#include "bcfw/detail/vec.hpp"  // scale_add overloads for vectors and scalars

namespace bcfw {
namespace fw {

// Iterate-averaging state. The weighted average carries weight (t) for the
// t-th iterate, maintained by a two-coefficient recurrence; the suffix
// average uniformly averages the iterates since the last power-of-two index
// (doubling trick), which realizes (1-mu)-suffix averaging with mu = 1/2.
//
// Iterate must provide scale_add(y, a, x, b) meaning y = a*y + b*x (found by
// ADL); aliasing x with y must be allowed.
template <class Iterate>
struct AveragingState {
  Iterate weighted_avg{};
  Iterate suffix_sum{};
  std::int64_t suffix_count = 0;
  std::int64_t suffix_window_start = 0;
  std::int64_t k = 0;  // index of the last update applied
  bool initialized = false;
};

template <class Iterate>
void init_averaging(AveragingState<Iterate>& st, const Iterate& x0) {
  st.weighted_avg = x0;
  st.suffix_sum = x0;
  st.suffix_count = 1;
  st.suffix_window_start = 0;
  st.k = 0;
  st.initialized = true;
}

// Folds in x_new = x^(k+1), produced by step k >= 0:
//   avg <- k/(k+2) * avg + 2/(k+2) * x_new
// so after step k the state holds 2/((k+1)(k+2)) * sum_{t=1}^{k+1} t * x^(t).
template <class Iterate>
void update_weighted_average(AveragingState<Iterate>& st, const Iterate& x_new, std::int64_t k) {
  if (!st.initialized) throw std::logic_error("averaging state not initialized");
  if (k < 0) throw std::invalid_argument("step index must be >= 0");
  const double kk = static_cast<double>(k);
  scale_add(st.weighted_avg, kk / (kk + 2.0), x_new, 2.0 / (kk + 2.0));
  st.k = k;
}

inline bool is_power_of_two(std::int64_t j) { return j > 0 && (j & (j - 1)) == 0; }

// Folds in x_new = x^(k+1). The window restarts whenever the iterate index
// j = k+1 is a power of two, so a query after iterate j averages the
// iterates {2^floor(log2 j), ..., j}.
template <class Iterate>
void update_suffix_average(AveragingState<Iterate>& st, const Iterate& x_new, std::int64_t k) {
  if (!st.initialized) throw std::logic_error("averaging state not initialized");
  if (k < 0) throw std::invalid_argument("step index must be >= 0");
  const std::int64_t j = k + 1;
  if (is_power_of_two(j)) {
    st.suffix_sum = x_new;
    st.suffix_count = 1;
    st.suffix_window_start = j;
  } else {
    scale_add(st.suffix_sum, 1.0, x_new, 1.0);
    st.suffix_count += 1;
  }
  st.k = k;
}

template <class Iterate>
Iterate suffix_average(const AveragingState<Iterate>& st) {
  if (!st.initialized || st.suffix_count < 1) throw std::logic_error("averaging state not initialized");
  Iterate out = st.suffix_sum;
  scale_add(out, 1.0 / static_cast<double>(st.suffix_count), out, 0.0);
  return out;
}

}  // namespace fw
}  // namespace bcfw
