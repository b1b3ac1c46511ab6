#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "bcfw/chain/decode.hpp"
#include "bcfw/chain/metrics.hpp"
#include "bcfw/chain/model.hpp"
#include "bcfw/detail/rng.hpp"

namespace {

using bcfw::DenseVec;
using bcfw::SparseVec;
namespace chain = bcfw::chain;

chain::SequenceExample random_example(std::mt19937_64& rng, int T, int q, int p) {
  chain::SequenceExample ex;
  ex.positions.resize(static_cast<std::size_t>(T));
  ex.labels.resize(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    const int nf = 1 + static_cast<int>(bcfw::detail::uniform_below(rng, 3));
    for (int f = 0; f < nf; ++f) {
      const int fid = static_cast<int>(bcfw::detail::uniform_below(rng, static_cast<std::uint64_t>(p)));
      ex.positions[static_cast<std::size_t>(t)].emplace_back(
          fid, bcfw::detail::uniform01(rng) * 2.0 - 1.0);
    }
    ex.labels[static_cast<std::size_t>(t)] =
        static_cast<int>(bcfw::detail::uniform_below(rng, static_cast<std::uint64_t>(q)));
  }
  return ex;
}

DenseVec random_weights(std::mt19937_64& rng, int dim) {
  bcfw::detail::NormalSampler normal;
  DenseVec w(static_cast<std::size_t>(dim));
  for (auto& v : w) v = normal(rng);
  return w;
}

// Independent scorer: emission/transition/start/stop contributions computed
// straight from the index layout, plus the per-mismatch loss bonus.
double direct_augmented_score(const chain::ChainModel& model, const DenseVec& w,
                              const chain::SequenceExample& x, const std::vector<int>& y,
                              const chain::LossSpec& spec) {
  const int T = x.length();
  const double unit = chain::loss_unit(spec, T);
  double s = 0.0;
  for (int t = 0; t < T; ++t) {
    for (const auto& [f, v] : x.positions[static_cast<std::size_t>(t)]) {
      s += w[static_cast<std::size_t>(model.emission_index(y[static_cast<std::size_t>(t)], f))] * v;
    }
    if (y[static_cast<std::size_t>(t)] != x.labels[static_cast<std::size_t>(t)]) s += unit;
  }
  for (int t = 1; t < T; ++t) {
    s += w[static_cast<std::size_t>(
        model.transition_index(y[static_cast<std::size_t>(t - 1)], y[static_cast<std::size_t>(t)]))];
  }
  s += w[static_cast<std::size_t>(model.start_index(y.front()))];
  s += w[static_cast<std::size_t>(model.stop_index(y.back()))];
  return s;
}

}  // namespace

TEST_CASE("joint feature map places mass at the layout indices") {
  const chain::ChainModel model(2, 3);  // q = 2, p = 3, d = 6 + 4 + 2 + 2 = 14
  REQUIRE(model.weight_dim() == 14);

  chain::SequenceExample x;
  x.positions = {{{0, 1.0}, {2, 0.5}}, {{1, 2.0}}};
  x.labels = {1, 0};

  const SparseVec phi = chain::joint_feature_map(model, x, x.labels);
  DenseVec dense(14, 0.0);
  for (std::size_t j = 0; j < phi.idx.size(); ++j) {
    dense[static_cast<std::size_t>(phi.idx[j])] += phi.val[j];
  }
  CHECK(dense[static_cast<std::size_t>(model.emission_index(1, 0))] == 1.0);
  CHECK(dense[static_cast<std::size_t>(model.emission_index(1, 2))] == 0.5);
  CHECK(dense[static_cast<std::size_t>(model.emission_index(0, 1))] == 2.0);
  CHECK(dense[static_cast<std::size_t>(model.transition_index(1, 0))] == 1.0);
  CHECK(dense[static_cast<std::size_t>(model.start_index(1))] == 1.0);
  CHECK(dense[static_cast<std::size_t>(model.stop_index(0))] == 1.0);
  // Everything else is zero.
  double total = 0.0;
  for (double v : dense) total += std::abs(v);
  CHECK(total == Catch::Approx(1.0 + 0.5 + 2.0 + 1.0 + 1.0 + 1.0));

  // The feature difference against the gold labeling vanishes.
  const SparseVec zero = chain::feature_difference(model, x, x.labels);
  CHECK(bcfw::norm_sq(zero) == 0.0);
}

TEST_CASE("augmented path scores match a direct index-layout computation") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const int q = 2 + static_cast<int>(bcfw::detail::uniform_below(rng, 2));
    const int T = 3;
    const int p = 4;
    const chain::ChainModel model(q, p);
    const auto x = random_example(rng, T, q, p);
    const auto w = random_weights(rng, model.weight_dim());
    const chain::LossSpec spec;

    const auto tb = chain::detail_decode::build_tables(model, w, x, true, spec);
    std::vector<int> y(static_cast<std::size_t>(T), 0);
    chain::detail_decode::for_each_labeling(T, q, [&](const std::vector<int>& labels) {
      const double got = chain::detail_decode::path_score(tb, labels);
      const double want = direct_augmented_score(model, w, x, labels, spec);
      REQUIRE(got == Catch::Approx(want).margin(1e-12));
    });
  }
}

TEST_CASE("Viterbi agrees with brute force on random instances") {
  std::mt19937_64 rng(13);
  int checked = 0;
  const chain::LossSpec nh;
  chain::LossSpec h;
  h.kind = chain::LossKind::hamming;
  while (checked < 200) {
    const int q = 2 + static_cast<int>(bcfw::detail::uniform_below(rng, 3));
    const int T = 1 + static_cast<int>(bcfw::detail::uniform_below(rng, 6));
    if (chain::detail_decode::labelings_count(T, q, 1024) < 0) continue;
    const int p = 5;
    const chain::ChainModel model(q, p);
    const auto x = random_example(rng, T, q, p);
    const auto w = random_weights(rng, model.weight_dim());
    const auto& spec = (checked % 2 == 0) ? nh : h;

    const auto vit = chain::viterbi_loss_augmented_decode(model, w, x, spec);
    const auto bf = chain::brute_force_decode(model, w, x, spec);
    REQUIRE(vit.labels == bf.labels);
    REQUIRE(vit.h_value == bf.h_value);
    REQUIRE(vit.augmented_score == bf.augmented_score);
    REQUIRE(vit.h_value >= 0.0);  // gold scores zero, the max cannot be below it
    ++checked;
  }
}

TEST_CASE("ties resolve toward the smallest labels") {
  const int q = 3;
  const int p = 2;
  const chain::ChainModel model(q, p);
  const DenseVec w(static_cast<std::size_t>(model.weight_dim()), 0.0);
  chain::SequenceExample x;
  x.positions = {{}, {}, {}};
  x.labels = {0, 0, 0};

  // Plain prediction: every labeling scores zero, so the smallest wins.
  CHECK(chain::predict(model, w, x) == std::vector<int>{0, 0, 0});

  // Loss-augmented with zero weights: every all-mismatch labeling ties at the
  // maximum; the smallest such labeling is all-ones.
  const chain::LossSpec spec;
  const auto vit = chain::viterbi_loss_augmented_decode(model, w, x, spec);
  const auto bf = chain::brute_force_decode(model, w, x, spec);
  CHECK(vit.labels == std::vector<int>{1, 1, 1});
  CHECK(bf.labels == vit.labels);
  CHECK(vit.h_value == Catch::Approx(1.0));  // normalized Hamming, all mismatched
}

TEST_CASE("beam search is exact at width q and monotone in the width") {
  std::mt19937_64 rng(29);
  const chain::LossSpec spec;
  for (int rep = 0; rep < 50; ++rep) {
    const int q = 2 + static_cast<int>(bcfw::detail::uniform_below(rng, 3));
    const int T = 2 + static_cast<int>(bcfw::detail::uniform_below(rng, 4));
    const int p = 4;
    const chain::ChainModel model(q, p);
    const auto x = random_example(rng, T, q, p);
    const auto w = random_weights(rng, model.weight_dim());

    const auto vit = chain::viterbi_loss_augmented_decode(model, w, x, spec);
    const auto exact_q = chain::beam_decode(model, w, x, spec, q);
    const auto exact_qq = chain::beam_decode(model, w, x, spec, q * q);
    REQUIRE(exact_q.labels == vit.labels);
    REQUIRE(exact_q.augmented_score == vit.augmented_score);
    REQUIRE(exact_qq.labels == vit.labels);

    double prev = -1e300;
    for (int b = 1; b <= q; ++b) {
      const auto r = chain::beam_decode(model, w, x, spec, b);
      REQUIRE(r.augmented_score >= prev);
      REQUIRE(r.augmented_score <= vit.augmented_score + 1e-12);
      prev = r.augmented_score;
    }
  }
}

TEST_CASE("a width-1 beam can be strictly suboptimal") {
  // Start scores lure the greedy beam to label 0, but the big 1->1 transition
  // makes [1, 1] the true maximizer.
  const chain::ChainModel model(2, 1);
  DenseVec w(static_cast<std::size_t>(model.weight_dim()), 0.0);
  w[static_cast<std::size_t>(model.start_index(0))] = 0.1;
  w[static_cast<std::size_t>(model.transition_index(1, 1))] = 10.0;
  chain::SequenceExample x;
  x.positions = {{}, {}};
  x.labels = {1, 1};
  const chain::LossSpec spec;

  const auto greedy = chain::beam_decode(model, w, x, spec, 1);
  const auto full = chain::beam_decode(model, w, x, spec, 2);
  const auto vit = chain::viterbi_loss_augmented_decode(model, w, x, spec);
  CHECK(greedy.labels == std::vector<int>{0, 0});
  CHECK(full.labels == std::vector<int>{1, 1});
  CHECK(full.labels == vit.labels);
  CHECK(full.augmented_score == vit.augmented_score);
  CHECK(greedy.augmented_score < vit.augmented_score);
}

TEST_CASE("enumeration caps are enforced") {
  CHECK(chain::detail_decode::labelings_count(10, 2, 4096) == 1024);
  CHECK(chain::detail_decode::labelings_count(6, 4, 4096) == 4096);
  CHECK(chain::detail_decode::labelings_count(7, 4, 4096) == -1);
  CHECK(chain::detail_decode::labelings_count(100, 3, 4096) == -1);  // no overflow

  const chain::ChainModel model(4, 2);
  const DenseVec w(static_cast<std::size_t>(model.weight_dim()), 0.0);
  std::mt19937_64 rng(3);
  const auto x = random_example(rng, 7, 4, 2);
  const chain::LossSpec spec;
  REQUIRE_THROWS_AS(chain::brute_force_decode(model, w, x, spec), std::invalid_argument);
  REQUIRE_NOTHROW(chain::viterbi_loss_augmented_decode(model, w, x, spec));
}

TEST_CASE("decoders validate their inputs") {
  const chain::ChainModel model(2, 3);
  const DenseVec w(static_cast<std::size_t>(model.weight_dim()), 0.0);
  const DenseVec bad_w(5, 0.0);
  chain::SequenceExample x;
  x.positions = {{{0, 1.0}}};
  x.labels = {0};
  const chain::LossSpec spec;
  REQUIRE_THROWS_AS(chain::viterbi_loss_augmented_decode(model, bad_w, x, spec),
                    std::invalid_argument);
  chain::SequenceExample empty;
  REQUIRE_THROWS_AS(chain::predict(model, w, empty), std::invalid_argument);
  REQUIRE_THROWS_AS(chain::beam_decode(model, w, x, spec, 0), std::invalid_argument);
}

TEST_CASE("slack-rescaled decoding maximizes loss times margin violation") {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 30; ++rep) {
    const int q = 2 + static_cast<int>(bcfw::detail::uniform_below(rng, 2));
    const int T = 2 + static_cast<int>(bcfw::detail::uniform_below(rng, 3));
    const int p = 3;
    const chain::ChainModel model(q, p);
    const auto x = random_example(rng, T, q, p);
    const auto w = random_weights(rng, model.weight_dim());
    const chain::LossSpec spec;

    const auto got = chain::brute_force_slack_rescaled_decode(model, w, x, spec);

    // Independent enumeration of Delta(y) * (1 + <w, phi(y)> - <w, phi(gold)>).
    const auto tb = chain::detail_decode::build_tables(model, w, x, false, spec);
    const double gold = chain::detail_decode::path_score(tb, x.labels);
    double best = -1e300;
    std::vector<int> best_y;
    chain::detail_decode::for_each_labeling(T, q, [&](const std::vector<int>& y) {
      const double v =
          chain::loss(spec, x.labels, y) * (1.0 + chain::detail_decode::path_score(tb, y) - gold);
      if (v > best) {
        best = v;
        best_y = y;
      }
    });
    REQUIRE(got.labels == best_y);
    REQUIRE(got.h_value == Catch::Approx(best).margin(1e-12));
  }
}

TEST_CASE("single-label chains decode to the gold labeling") {
  const chain::ChainModel model(1, 2);
  DenseVec w(static_cast<std::size_t>(model.weight_dim()), 0.5);
  chain::SequenceExample x;
  x.positions = {{{0, 1.0}}, {{1, 1.0}}};
  x.labels = {0, 0};
  const chain::LossSpec spec;
  const auto vit = chain::viterbi_loss_augmented_decode(model, w, x, spec);
  CHECK(vit.labels == x.labels);
  CHECK(vit.h_value == 0.0);
  CHECK(chain::predict(model, w, x) == x.labels);
}

TEST_CASE("test error averages the chosen loss over predictions") {
  const chain::ChainModel model(2, 2);
  DenseVec w(static_cast<std::size_t>(model.weight_dim()), 0.0);
  // Reward label 1 whenever feature 0 fires.
  w[static_cast<std::size_t>(model.emission_index(1, 0))] = 1.0;

  chain::SequenceDataset data;
  data.n_labels = 2;
  data.n_features = 2;
  chain::SequenceExample a;  // predicted [1, 1], gold [1, 0]: one mismatch
  a.positions = {{{0, 1.0}}, {{0, 1.0}}};
  a.labels = {1, 0};
  chain::SequenceExample b;  // predicted [1, 1], gold [1, 1]: correct
  b.positions = {{{0, 1.0}}, {{0, 1.0}}};
  b.labels = {1, 1};
  data.examples = {a, b};

  chain::LossSpec nh;
  CHECK(chain::test_error(model, w, data, nh) == Catch::Approx(0.25));  // (0.5 + 0) / 2
  chain::LossSpec h;
  h.kind = chain::LossKind::hamming;
  CHECK(chain::test_error(model, w, data, h) == Catch::Approx(0.5));  // (1 + 0) / 2

  chain::SequenceDataset empty;
  empty.n_labels = 2;
  empty.n_features = 2;
  REQUIRE_THROWS_AS(chain::test_error(model, w, empty, nh), std::invalid_argument);
}
