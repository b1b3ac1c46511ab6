#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bcfw/chain/model.hpp"
#include "bcfw/detail/vec.hpp"

namespace bcfw {
namespace chain {

struct DecodeResult {
  std::vector<int> labels;
  // H(y) = Delta(y) + <w, phi(x,y)> - <w, phi(x,gold)>, the margin-rescaled
  // decode value. Nonnegative for the exact maximizer since y = gold scores 0.
  double h_value = 0.0;
  // Delta(y) + <w, phi(x,y)>, before subtracting the gold path score.
  double augmented_score = 0.0;
};

namespace detail_decode {

// Precomputed per-position scores. All decoders (Viterbi, brute force, beam)
// score paths through these tables with identical operation order, so their
// values agree bitwise, not just within tolerance:
//   acc = start[y0] + node[0][y0]
//   acc += trans[y_{t-1}][y_t]; acc += node[t][y_t]   (t = 1..T-1)
//   acc += stop[y_{T-1}]
struct ScoreTables {
  int T = 0;
  int q = 0;
  std::vector<double> node;   // T*q, node[t*q + a]
  std::vector<double> trans;  // q*q, trans[b*q + a] scores b -> a
  std::vector<double> start;
  std::vector<double> stop;

  double node_at(int t, int a) const { return node[static_cast<std::size_t>(t * q + a)]; }
  double trans_at(int b, int a) const { return trans[static_cast<std::size_t>(b * q + a)]; }
};

// loss_aug: add the margin-rescaling bonus loss_unit * [a != gold_t] to the
// node scores. Pass loss_aug = false for plain prediction.
inline ScoreTables build_tables(const ChainModel& model, const DenseVec& w, const SequenceExample& x,
                                bool loss_aug, const LossSpec& spec) {
  const int T = x.length();
  const int q = model.n_labels;
  if (T < 1) throw std::invalid_argument("empty sequence");
  if (static_cast<int>(w.size()) != model.weight_dim()) {
    throw std::invalid_argument("weight vector does not match the model layout");
  }
  ScoreTables tb;
  tb.T = T;
  tb.q = q;
  tb.node.assign(static_cast<std::size_t>(T) * static_cast<std::size_t>(q), 0.0);
  const double unit = loss_aug ? loss_unit(spec, T) : 0.0;
  for (int t = 0; t < T; ++t) {
    for (int a = 0; a < q; ++a) {
      double s = 0.0;
      for (const auto& [f, v] : x.positions[static_cast<std::size_t>(t)]) {
        s += w[static_cast<std::size_t>(model.emission_index(a, f))] * v;
      }
      if (loss_aug && a != x.labels[static_cast<std::size_t>(t)]) s += unit;
      tb.node[static_cast<std::size_t>(t * q + a)] = s;
    }
  }
  tb.trans.resize(static_cast<std::size_t>(q) * static_cast<std::size_t>(q));
  for (int b = 0; b < q; ++b) {
    for (int a = 0; a < q; ++a) {
      tb.trans[static_cast<std::size_t>(b * q + a)] =
          w[static_cast<std::size_t>(model.transition_index(b, a))];
    }
  }
  tb.start.resize(static_cast<std::size_t>(q));
  tb.stop.resize(static_cast<std::size_t>(q));
  for (int a = 0; a < q; ++a) {
    tb.start[static_cast<std::size_t>(a)] = w[static_cast<std::size_t>(model.start_index(a))];
    tb.stop[static_cast<std::size_t>(a)] = w[static_cast<std::size_t>(model.stop_index(a))];
  }
  return tb;
}

inline double path_score(const ScoreTables& tb, const std::vector<int>& y) {
  double acc = tb.start[static_cast<std::size_t>(y[0])] + tb.node_at(0, y[0]);
  for (int t = 1; t < tb.T; ++t) {
    acc += tb.trans_at(y[static_cast<std::size_t>(t - 1)], y[static_cast<std::size_t>(t)]);
    acc += tb.node_at(t, y[static_cast<std::size_t>(t)]);
  }
  acc += tb.stop[static_cast<std::size_t>(y[static_cast<std::size_t>(tb.T - 1)])];
  return acc;
}

// Max-score path. Ties break toward the smaller label index at each
// backpointer and at the final state, which selects the maximizer that is
// smallest in reverse-lexicographic order (last position most significant).
inline std::pair<std::vector<int>, double> viterbi_on_tables(const ScoreTables& tb) {
  const int T = tb.T;
  const int q = tb.q;
  std::vector<double> v(static_cast<std::size_t>(T) * static_cast<std::size_t>(q));
  std::vector<int> bp(static_cast<std::size_t>(T) * static_cast<std::size_t>(q), -1);
  for (int a = 0; a < q; ++a) {
    v[static_cast<std::size_t>(a)] = tb.start[static_cast<std::size_t>(a)] + tb.node_at(0, a);
  }
  for (int t = 1; t < T; ++t) {
    for (int a = 0; a < q; ++a) {
      double best = -std::numeric_limits<double>::infinity();
      int best_b = -1;
      for (int b = 0; b < q; ++b) {
        const double cand = v[static_cast<std::size_t>((t - 1) * q + b)] + tb.trans_at(b, a);
        if (cand > best) {
          best = cand;
          best_b = b;
        }
      }
      v[static_cast<std::size_t>(t * q + a)] = best + tb.node_at(t, a);
      bp[static_cast<std::size_t>(t * q + a)] = best_b;
    }
  }
  double best = -std::numeric_limits<double>::infinity();
  int best_a = -1;
  for (int a = 0; a < q; ++a) {
    const double cand = v[static_cast<std::size_t>((T - 1) * q + a)] + tb.stop[static_cast<std::size_t>(a)];
    if (cand > best) {
      best = cand;
      best_a = a;
    }
  }
  std::vector<int> y(static_cast<std::size_t>(T));
  y[static_cast<std::size_t>(T - 1)] = best_a;
  for (int t = T - 1; t > 0; --t) {
    y[static_cast<std::size_t>(t - 1)] =
        bp[static_cast<std::size_t>(t * q + y[static_cast<std::size_t>(t)])];
  }
  return {std::move(y), best};
}

// Number of labelings q^T, or -1 if it exceeds cap.
inline std::int64_t labelings_count(int T, int q, std::int64_t cap) {
  std::int64_t m = 1;
  for (int t = 0; t < T; ++t) {
    if (m > cap / q) return -1;
    m *= q;
    if (m > cap) return -1;
  }
  return m;
}

// Visits every labeling in odometer order with position 0 the fastest digit,
// which is exactly ascending reverse-lexicographic order. A first-strict-max
// scan over this order therefore picks the same maximizer as the Viterbi tie
// rule.
template <class Fn>
void for_each_labeling(int T, int q, const Fn& fn) {
  std::vector<int> y(static_cast<std::size_t>(T), 0);
  for (;;) {
    fn(static_cast<const std::vector<int>&>(y));
    int t = 0;
    while (t < T) {
      y[static_cast<std::size_t>(t)] += 1;
      if (y[static_cast<std::size_t>(t)] < q) break;
      y[static_cast<std::size_t>(t)] = 0;
      ++t;
    }
    if (t == T) break;
  }
}

}  // namespace detail_decode

// Loss-augmented decode by dynamic programming:
//   argmax_y Delta(y) + <w, phi(x,y)>
// returning the labeling, its H value, and the augmented score.
inline DecodeResult viterbi_loss_augmented_decode(const ChainModel& model, const DenseVec& w,
                                                  const SequenceExample& x, const LossSpec& spec) {
  const auto tb = detail_decode::build_tables(model, w, x, true, spec);
  auto [labels, value] = detail_decode::viterbi_on_tables(tb);
  // Gold is scored on the same augmented tables; its loss bonus is zero.
  const double gold = detail_decode::path_score(tb, x.labels);
  DecodeResult out;
  out.labels = std::move(labels);
  out.augmented_score = value;
  out.h_value = value - gold;
  return out;
}

// Exhaustive maximization with the same tie rule as the DP; the oracle the
// DP is tested against. Refuses instances with more than cap labelings.
inline DecodeResult brute_force_decode(const ChainModel& model, const DenseVec& w,
                                       const SequenceExample& x, const LossSpec& spec,
                                       std::int64_t cap = 4096) {
  const auto tb = detail_decode::build_tables(model, w, x, true, spec);
  if (detail_decode::labelings_count(x.length(), model.n_labels, cap) < 0) {
    throw std::invalid_argument("label space exceeds the enumeration cap");
  }
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> best_y;
  detail_decode::for_each_labeling(x.length(), model.n_labels, [&](const std::vector<int>& y) {
    const double s = detail_decode::path_score(tb, y);
    if (s > best) {
      best = s;
      best_y = y;
    }
  });
  const double gold = detail_decode::path_score(tb, x.labels);
  DecodeResult out;
  out.labels = std::move(best_y);
  out.augmented_score = best;
  out.h_value = best - gold;
  return out;
}

// Beam-pruned DP: per-position candidates are merged by label (best scoring
// prefix per label) and only the B best labels survive to the next position.
// B >= q keeps the full frontier, so the beam equals the exact DP value; in
// particular B = q^2 recovers exactness. B = 1 is greedy. The returned H
// never exceeds the exact maximum.
inline DecodeResult beam_decode(const ChainModel& model, const DenseVec& w, const SequenceExample& x,
                                const LossSpec& spec, int beam_width) {
  if (beam_width < 1) throw std::invalid_argument("beam width must be >= 1");
  const auto tb = detail_decode::build_tables(model, w, x, true, spec);
  const int T = tb.T;
  const int q = tb.q;
  const double ninf = -std::numeric_limits<double>::infinity();

  struct Item {
    int label = -1;
    double score = 0.0;
    int parent = -1;  // index into the previous layer
  };
  std::vector<std::vector<Item>> layers;
  layers.reserve(static_cast<std::size_t>(T));

  auto select = [&](std::vector<Item> merged) {
    std::sort(merged.begin(), merged.end(), [](const Item& a, const Item& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.label < b.label;
    });
    if (static_cast<int>(merged.size()) > beam_width) {
      merged.resize(static_cast<std::size_t>(beam_width));
    }
    return merged;
  };

  {
    std::vector<Item> first;
    first.reserve(static_cast<std::size_t>(q));
    for (int a = 0; a < q; ++a) {
      first.push_back({a, tb.start[static_cast<std::size_t>(a)] + tb.node_at(0, a), -1});
    }
    layers.push_back(select(std::move(first)));
  }
  for (int t = 1; t < T; ++t) {
    const auto& prev = layers.back();
    std::vector<double> best_score(static_cast<std::size_t>(q), ninf);
    std::vector<int> best_parent(static_cast<std::size_t>(q), -1);
    for (std::size_t pidx = 0; pidx < prev.size(); ++pidx) {
      for (int a = 0; a < q; ++a) {
        const double cand = prev[pidx].score + tb.trans_at(prev[pidx].label, a);
        if (cand > best_score[static_cast<std::size_t>(a)]) {
          best_score[static_cast<std::size_t>(a)] = cand;
          best_parent[static_cast<std::size_t>(a)] = static_cast<int>(pidx);
        }
      }
    }
    std::vector<Item> merged;
    merged.reserve(static_cast<std::size_t>(q));
    for (int a = 0; a < q; ++a) {
      if (best_parent[static_cast<std::size_t>(a)] < 0) continue;
      merged.push_back({a, best_score[static_cast<std::size_t>(a)] + tb.node_at(t, a),
                        best_parent[static_cast<std::size_t>(a)]});
    }
    layers.push_back(select(std::move(merged)));
  }

  const auto& last = layers.back();
  double best = ninf;
  int best_idx = -1;
  for (std::size_t idx = 0; idx < last.size(); ++idx) {
    const double cand = last[idx].score + tb.stop[static_cast<std::size_t>(last[idx].label)];
    if (cand > best) {
      best = cand;
      best_idx = static_cast<int>(idx);
    }
  }
  std::vector<int> y(static_cast<std::size_t>(T));
  int idx = best_idx;
  for (int t = T - 1; t >= 0; --t) {
    y[static_cast<std::size_t>(t)] = layers[static_cast<std::size_t>(t)][static_cast<std::size_t>(idx)].label;
    idx = layers[static_cast<std::size_t>(t)][static_cast<std::size_t>(idx)].parent;
  }
  const double gold = detail_decode::path_score(tb, x.labels);
  DecodeResult out;
  out.labels = std::move(y);
  out.augmented_score = best;
  out.h_value = best - gold;
  return out;
}

// Plain MAP prediction (no loss augmentation).
inline std::vector<int> predict(const ChainModel& model, const DenseVec& w, const SequenceExample& x) {
  const auto tb = detail_decode::build_tables(model, w, x, false, LossSpec{});
  return detail_decode::viterbi_on_tables(tb).first;
}

// Slack-rescaling variant: argmax_y Delta(y) * (1 - <w, psi(y)>). The loss
// multiplies the margin instead of adding to it, which does not decompose
// over positions, so only the exhaustive decoder supports it.
inline DecodeResult brute_force_slack_rescaled_decode(const ChainModel& model, const DenseVec& w,
                                                      const SequenceExample& x, const LossSpec& spec,
                                                      std::int64_t cap = 4096) {
  const auto tb = detail_decode::build_tables(model, w, x, false, spec);
  if (detail_decode::labelings_count(x.length(), model.n_labels, cap) < 0) {
    throw std::invalid_argument("label space exceeds the enumeration cap");
  }
  const double gold = detail_decode::path_score(tb, x.labels);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> best_y;
  detail_decode::for_each_labeling(x.length(), model.n_labels, [&](const std::vector<int>& y) {
    const double value = loss(spec, x.labels, y) * (1.0 + detail_decode::path_score(tb, y) - gold);
    if (value > best) {
      best = value;
      best_y = y;
    }
  });
  DecodeResult out;
  out.labels = std::move(best_y);
  out.augmented_score = best;
  out.h_value = best;
  return out;
}

}  // namespace chain
}  // namespace bcfw
