#pragma once

#include <cmath>
#include <random>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bcfw/chain/decode.hpp"
#include "bcfw/chain/model.hpp"
#include "bcfw/detail/rng.hpp"
#include "bcfw/detail/vec.hpp"

namespace bcfw {
namespace io {

struct SyntheticSpec {
  int n_sequences = 0;
  int length = 0;
  int n_labels = 0;
  int n_features = 0;
  double noise = 0.0;  // per-position flip probability
  std::uint64_t seed = 1;
};

struct SyntheticResult {
  chain::SequenceDataset data;
  DenseVec planted_w;  // unit-norm emission/transition/start/stop blocks
};

namespace detail_io {

// Normalizes w[lo, lo+len) to unit Euclidean norm.
inline void normalize_block(DenseVec& w, int lo, int len) {
  double s = 0.0;
  for (int i = 0; i < len; ++i) s += w[lo + i] * w[lo + i];
  if (!(s > 0.0)) {
    w[lo] = 1.0;
    for (int i = 1; i < len; ++i) w[lo + i] = 0.0;
    return;
  }
  const double inv = 1.0 / std::sqrt(s);
  for (int i = 0; i < len; ++i) w[lo + i] *= inv;
}

}  // namespace detail_io

// Deterministic in spec alone. Draw order: planted parameter normals
// (emission, transition, start, stop blocks), then per sequence the two
// indicator feature ids per position, then one flip coin per position and a
// replacement label only when the coin fires.
inline SyntheticResult generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n_sequences < 1 || spec.length < 1 || spec.n_labels < 1 || spec.n_features < 2) {
    throw std::invalid_argument("generate_synthetic: need n >= 1, length >= 1, q >= 1, p >= 2");
  }
  if (!(spec.noise >= 0.0 && spec.noise <= 1.0)) {
    throw std::invalid_argument("generate_synthetic: noise must lie in [0, 1]");
  }
  const int q = spec.n_labels;
  const int p = spec.n_features;
  const chain::ChainModel model(q, p);

  std::mt19937_64 rng(spec.seed);
  detail::NormalSampler normal;

  SyntheticResult out;
  out.planted_w.assign(static_cast<std::size_t>(model.weight_dim()), 0.0);
  for (int i = 0; i < model.weight_dim(); ++i) out.planted_w[i] = normal(rng);
  detail_io::normalize_block(out.planted_w, 0, q * p);
  detail_io::normalize_block(out.planted_w, q * p, q * q);
  detail_io::normalize_block(out.planted_w, q * p + q * q, q);
  detail_io::normalize_block(out.planted_w, q * p + q * q + q, q);

  out.data.n_labels = q;
  out.data.n_features = p;
  out.data.examples.reserve(static_cast<std::size_t>(spec.n_sequences));
  for (int e = 0; e < spec.n_sequences; ++e) {
    chain::SequenceExample ex;
    ex.positions.resize(static_cast<std::size_t>(spec.length));
    for (int t = 0; t < spec.length; ++t) {
      const int f0 = static_cast<int>(detail::uniform_below(rng, static_cast<std::uint64_t>(p)));
      int f1 = f0;
      while (f1 == f0) f1 = static_cast<int>(detail::uniform_below(rng, static_cast<std::uint64_t>(p)));
      ex.positions[t] = {{f0, 1.0}, {f1, 1.0}};
    }
    ex.labels = chain::predict(model, out.planted_w, ex);
    for (int t = 0; t < spec.length; ++t) {
      const double u = detail::uniform01(rng);
      if (u < spec.noise && q > 1) {
        const int shift = 1 + static_cast<int>(detail::uniform_below(rng, static_cast<std::uint64_t>(q - 1)));
        ex.labels[t] = (ex.labels[t] + shift) % q;
      }
    }
    out.data.examples.push_back(std::move(ex));
  }
  return out;
}

}  // namespace io
}  // namespace bcfw
