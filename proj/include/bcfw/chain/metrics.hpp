#pragma once

#include <stdexcept>

#include "bcfw/chain/decode.hpp"
#include "bcfw/chain/model.hpp"
#include "bcfw/detail/vec.hpp"

namespace bcfw {
namespace chain {

// Mean loss(spec, y_i, predict(x_i)) over the dataset. Not monotone along a
// training run; callers record it, they do not assert on its trend.
inline double test_error(const ChainModel& model, const DenseVec& w, const SequenceDataset& data,
                         const LossSpec& spec) {
  if (data.examples.empty()) throw std::invalid_argument("empty dataset");
  double total = 0.0;
  for (const auto& x : data.examples) {
    total += loss(spec, x.labels, predict(model, w, x));
  }
  return total / static_cast<double>(data.examples.size());
}

}  // namespace chain
}  // namespace bcfw
