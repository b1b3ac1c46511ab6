#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace bcfw {
namespace fw {

enum class StepRule { predefined, line_search };
enum class Averaging { none, weighted, suffix };

// Oracle quality knobs. nu in (0,1] is the multiplicative quality of the
// step-direction oracle, delta >= 0 its additive slack; (1, 0) is exact.
struct OracleAccuracy {
  double nu = 1.0;
  double delta = 0.0;
};

struct SolverConfig {
  std::int64_t max_iterations = 0;
  double gap_tolerance = 0.0;
  StepRule step_rule = StepRule::line_search;
  Averaging averaging = Averaging::none;
  std::uint64_t seed = 1;
  // Cadence of full-gap evaluations, in effective passes (one pass = one
  // oracle call per block). The sweep's oracle calls are themselves counted.
  std::int64_t gap_check_every = 10;
  OracleAccuracy oracle;
};

inline void validate(const SolverConfig& c) {
  if (c.max_iterations < 0) throw std::invalid_argument("max_iterations must be >= 0");
  if (!(c.gap_tolerance >= 0.0)) throw std::invalid_argument("gap tolerance must be >= 0");
  if (c.gap_check_every < 1) throw std::invalid_argument("gap_check_every must be >= 1");
  if (!(c.oracle.nu > 0.0) || c.oracle.nu > 1.0) throw std::invalid_argument("nu must lie in (0, 1]");
  if (!(c.oracle.delta >= 0.0)) throw std::invalid_argument("delta must be >= 0");
}

// Full linearization-gap certificate: block_gaps[i] = <x_(i) - s_(i), grad_i f(x)>
// with s_(i) an exact block LMO answer; total_gap is their sum and upper-bounds
// f(x) - f(x*).
struct GapCertificate {
  double total_gap = 0.0;
  std::vector<double> block_gaps;
  std::int64_t iteration = 0;
};

}  // namespace fw
}  // namespace bcfw
