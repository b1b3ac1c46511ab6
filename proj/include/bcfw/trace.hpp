#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace bcfw {

// One checkpoint row of a solver run. Optional metrics stay empty when the
// solver cannot produce them (SSG has no dual value or gap certificate).
struct TraceRecord {
  double effective_passes = 0.0;
  std::int64_t k = 0;
  std::optional<double> primal;
  std::optional<double> dual;
  std::optional<double> gap;
  std::optional<double> train_error;
  std::optional<double> test_error;
  double wall_seconds = 0.0;
};

using ConvergenceTrace = std::vector<TraceRecord>;

}  // namespace bcfw
