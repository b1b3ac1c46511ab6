#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bcfw/detail/vec.hpp"

namespace bcfw {
namespace chain {

// One labeled sequence: sparse input features per position plus the gold
// label sequence.
struct SequenceExample {
  std::vector<std::vector<std::pair<int, double>>> positions;
  std::vector<int> labels;

  int length() const { return static_cast<int>(positions.size()); }
};

struct SequenceDataset {
  int n_labels = 0;    // q
  int n_features = 0;  // p
  std::vector<SequenceExample> examples;

  int size() const { return static_cast<int>(examples.size()); }
};

// Weight-vector layout for a first-order chain model over q labels and p
// input features:
//   [0, p*q)              emission: feature f with label a at a*p + f
//   [p*q, p*q + q^2)      transition: (a -> b) at p*q + a*q + b
//   [p*q + q^2, .. + q)   start unary
//   [.. + q, .. + 2q)     stop unary
struct ChainModel {
  int n_labels = 0;
  int n_features = 0;

  ChainModel() = default;
  ChainModel(int q, int p) : n_labels(q), n_features(p) {
    if (q < 1 || p < 1) throw std::invalid_argument("chain model needs q >= 1, p >= 1");
  }

  int weight_dim() const { return n_features * n_labels + n_labels * n_labels + 2 * n_labels; }
  int emission_index(int a, int f) const { return a * n_features + f; }
  int transition_index(int a, int b) const { return n_features * n_labels + a * n_labels + b; }
  int start_index(int a) const { return n_features * n_labels + n_labels * n_labels + a; }
  int stop_index(int a) const { return n_features * n_labels + n_labels * n_labels + n_labels + a; }
};

enum class LossKind { normalized_hamming, hamming };

struct LossSpec {
  LossKind kind = LossKind::normalized_hamming;
};

// Per-position loss contribution of one mismatch in a length-T sequence.
inline double loss_unit(const LossSpec& spec, int T) {
  return spec.kind == LossKind::normalized_hamming ? 1.0 / static_cast<double>(T) : 1.0;
}

inline double loss(const LossSpec& spec, const std::vector<int>& gold, const std::vector<int>& y) {
  if (gold.size() != y.size()) throw std::invalid_argument("label sequences differ in length");
  if (gold.empty()) throw std::invalid_argument("empty label sequence");
  int mismatches = 0;
  for (std::size_t t = 0; t < gold.size(); ++t) mismatches += gold[t] != y[t] ? 1 : 0;
  return static_cast<double>(mismatches) * loss_unit(spec, static_cast<int>(gold.size()));
}

// Joint feature map phi(x, y): emission indicators scaled by the input
// values, transition counts, and start/stop unaries.
inline SparseVec joint_feature_map(const ChainModel& model, const SequenceExample& x,
                                   const std::vector<int>& y) {
  const int T = x.length();
  if (static_cast<int>(y.size()) != T) throw std::invalid_argument("labeling length mismatch");
  std::vector<std::pair<int, double>> entries;
  entries.reserve(static_cast<std::size_t>(T) * 3 + 2);
  for (int t = 0; t < T; ++t) {
    for (const auto& [f, v] : x.positions[static_cast<std::size_t>(t)]) {
      entries.emplace_back(model.emission_index(y[static_cast<std::size_t>(t)], f), v);
    }
  }
  for (int t = 1; t < T; ++t) {
    entries.emplace_back(
        model.transition_index(y[static_cast<std::size_t>(t - 1)], y[static_cast<std::size_t>(t)]),
        1.0);
  }
  entries.emplace_back(model.start_index(y.front()), 1.0);
  entries.emplace_back(model.stop_index(y.back()), 1.0);
  return make_sparse(std::move(entries));
}

// phi(x, gold) - phi(x, y); identically zero when y is the gold labeling.
inline SparseVec feature_difference(const ChainModel& model, const SequenceExample& x,
                                    const std::vector<int>& y) {
  const int T = x.length();
  if (static_cast<int>(y.size()) != T) throw std::invalid_argument("labeling length mismatch");
  std::vector<std::pair<int, double>> entries;
  entries.reserve(static_cast<std::size_t>(T) * 6 + 4);
  for (int t = 0; t < T; ++t) {
    const int g = x.labels[static_cast<std::size_t>(t)];
    const int a = y[static_cast<std::size_t>(t)];
    if (g == a) continue;
    for (const auto& [f, v] : x.positions[static_cast<std::size_t>(t)]) {
      entries.emplace_back(model.emission_index(g, f), v);
      entries.emplace_back(model.emission_index(a, f), -v);
    }
  }
  for (int t = 1; t < T; ++t) {
    entries.emplace_back(model.transition_index(x.labels[static_cast<std::size_t>(t - 1)],
                                                x.labels[static_cast<std::size_t>(t)]),
                         1.0);
    entries.emplace_back(
        model.transition_index(y[static_cast<std::size_t>(t - 1)], y[static_cast<std::size_t>(t)]),
        -1.0);
  }
  entries.emplace_back(model.start_index(x.labels.front()), 1.0);
  entries.emplace_back(model.start_index(y.front()), -1.0);
  entries.emplace_back(model.stop_index(x.labels.back()), 1.0);
  entries.emplace_back(model.stop_index(y.back()), -1.0);
  return make_sparse(std::move(entries));
}

}  // namespace chain
}  // namespace bcfw
