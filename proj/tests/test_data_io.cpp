#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "bcfw/chain/decode.hpp"
#include "bcfw/io/dataset.hpp"
#include "bcfw/io/model.hpp"
#include "bcfw/io/synthetic.hpp"
#include "bcfw/io/trace_csv.hpp"

namespace {

namespace io = bcfw::io;
namespace chain = bcfw::chain;
using bcfw::DenseVec;
using Catch::Matchers::ContainsSubstring;

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("bcfw_io_" + name)).string();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f);
  return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

bool same_dataset(const chain::SequenceDataset& a, const chain::SequenceDataset& b) {
  if (a.n_labels != b.n_labels || a.n_features != b.n_features) return false;
  if (a.examples.size() != b.examples.size()) return false;
  for (std::size_t e = 0; e < a.examples.size(); ++e) {
    if (a.examples[e].labels != b.examples[e].labels) return false;
    if (a.examples[e].positions != b.examples[e].positions) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("datasets survive a save/load round trip") {
  chain::SequenceDataset ds;
  ds.n_labels = 3;
  ds.n_features = 5;
  chain::SequenceExample a;
  a.positions = {{{0, 1.0}, {4, -0.25}}, {{2, 0.1234567890123456}}};
  a.labels = {2, 0};
  chain::SequenceExample b;
  b.positions = {{{1, 1e-17}}};
  b.labels = {1};
  ds.examples = {a, b};

  const auto path = tmp_path("roundtrip.txt");
  io::save_sequence_dataset(ds, path);
  const auto back = io::load_sequence_dataset(path);
  REQUIRE(same_dataset(ds, back));

  // Serialization is idempotent: parse -> serialize -> parse is the identity.
  const auto path2 = tmp_path("roundtrip2.txt");
  io::save_sequence_dataset(back, path2);
  REQUIRE(read_file(path) == read_file(path2));
}

TEST_CASE("dataset parse errors carry their line numbers") {
  const auto path = tmp_path("bad.txt");

  write_file(path, "#seq p=x q=2\n");
  REQUIRE_THROWS_WITH(io::load_sequence_dataset(path), ContainsSubstring(":1:"));
  write_file(path, "not a header\n");
  REQUIRE_THROWS_WITH(io::load_sequence_dataset(path),
                      ContainsSubstring("malformed header"));

  write_file(path, "#seq p=2 q=2\n0 1:0.5\n2 0:1\n");
  REQUIRE_THROWS_WITH(io::load_sequence_dataset(path),
                      ContainsSubstring(":3: label out of range"));

  write_file(path, "#seq p=2 q=2\n0 5:0.5\n");
  REQUIRE_THROWS_WITH(io::load_sequence_dataset(path),
                      ContainsSubstring(":2: feature id out of range"));

  write_file(path, "#seq p=2 q=2\n0 1:0.5\n\n1 nonsense\n");
  REQUIRE_THROWS_WITH(io::load_sequence_dataset(path),
                      ContainsSubstring(":4: malformed feature token"));

  write_file(path, "#seq p=2 q=2\nbad 0:1\n");
  REQUIRE_THROWS_WITH(io::load_sequence_dataset(path), ContainsSubstring(":2: malformed label"));

  write_file(path, "");
  REQUIRE_THROWS_WITH(io::load_sequence_dataset(path), ContainsSubstring("missing header"));

  REQUIRE_THROWS_WITH(io::load_sequence_dataset(tmp_path("does_not_exist.txt")),
                      ContainsSubstring("cannot open"));
}

TEST_CASE("a bare header is an empty dataset and CRLF is tolerated") {
  const auto path = tmp_path("empty.txt");
  write_file(path, "#seq p=4 q=2\n");
  const auto ds = io::load_sequence_dataset(path);
  CHECK(ds.n_features == 4);
  CHECK(ds.n_labels == 2);
  CHECK(ds.examples.empty());

  write_file(path, "#seq p=4 q=2\r\n1 0:1\r\n\r\n0 3:2\r\n");
  const auto crlf = io::load_sequence_dataset(path);
  REQUIRE(crlf.examples.size() == 2);
  CHECK(crlf.examples[0].labels == std::vector<int>{1});
  CHECK(crlf.examples[1].positions[0][0] == std::pair<int, double>{3, 2.0});
}

TEST_CASE("synthetic generation is a pure function of its spec") {
  io::SyntheticSpec spec;
  spec.n_sequences = 12;
  spec.length = 4;
  spec.n_labels = 3;
  spec.n_features = 6;
  spec.noise = 0.3;
  spec.seed = 99;

  auto a = io::generate_synthetic(spec);
  auto b = io::generate_synthetic(spec);
  REQUIRE(a.planted_w == b.planted_w);
  REQUIRE(same_dataset(a.data, b.data));

  spec.seed = 100;
  auto c = io::generate_synthetic(spec);
  REQUIRE_FALSE(same_dataset(a.data, c.data));

  // Unit-norm parameter blocks: emission, transition, start, stop.
  const int q = spec.n_labels;
  const int p = spec.n_features;
  const auto norm_of = [&](int lo, int len) {
    double s = 0.0;
    for (int j = 0; j < len; ++j) s += a.planted_w[static_cast<std::size_t>(lo + j)] *
                                        a.planted_w[static_cast<std::size_t>(lo + j)];
    return std::sqrt(s);
  };
  CHECK(norm_of(0, q * p) == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(norm_of(q * p, q * q) == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(norm_of(q * p + q * q, q) == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(norm_of(q * p + q * q + q, q) == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("noise extremes pin the synthetic labels") {
  io::SyntheticSpec spec;
  spec.n_sequences = 10;
  spec.length = 5;
  spec.n_labels = 2;
  spec.n_features = 4;
  spec.seed = 7;

  spec.noise = 0.0;
  auto clean = io::generate_synthetic(spec);
  const chain::ChainModel model(2, 4);
  for (const auto& ex : clean.data.examples) {
    REQUIRE(ex.labels == chain::predict(model, clean.planted_w, ex));
  }

  spec.noise = 1.0;
  auto flipped = io::generate_synthetic(spec);
  for (const auto& ex : flipped.data.examples) {
    const auto pred = chain::predict(model, flipped.planted_w, ex);
    for (std::size_t t = 0; t < pred.size(); ++t) {
      REQUIRE(ex.labels[t] == 1 - pred[t]);  // q = 2: flips are complements
    }
  }

  io::SyntheticSpec bad = spec;
  bad.noise = 1.5;
  REQUIRE_THROWS_AS(io::generate_synthetic(bad), std::invalid_argument);
  bad = spec;
  bad.n_features = 1;
  REQUIRE_THROWS_AS(io::generate_synthetic(bad), std::invalid_argument);
}

TEST_CASE("trace CSV bytes are exactly reproducible") {
  bcfw::ConvergenceTrace trace;
  bcfw::TraceRecord r1;
  r1.effective_passes = 1.0;
  r1.k = 0;
  r1.primal = 0.5;
  r1.dual = 0.0;
  r1.gap = 0.5;
  r1.train_error = 0.25;
  r1.wall_seconds = 0.0;
  bcfw::TraceRecord r2;
  r2.effective_passes = 2.5;
  r2.k = 3;
  r2.test_error = 0.125;
  r2.wall_seconds = 1e-05;
  trace = {r1, r2};

  const auto path = tmp_path("golden.csv");
  io::write_trace_csv(trace, path);
  REQUIRE(read_file(path) ==
          "passes,k,primal,dual,gap,train_error,test_error,seconds\n"
          "1,0,0.5,0,0.5,0.25,,0\n"
          "2.5,3,,,,,0.125,1e-05\n");

  const auto back = io::read_trace_csv(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].effective_passes == 1.0);
  CHECK(back[0].k == 0);
  CHECK(*back[0].primal == 0.5);
  CHECK(*back[0].gap == 0.5);
  CHECK(back[0].train_error.has_value());
  CHECK(!back[0].test_error.has_value());
  CHECK(back[1].k == 3);
  CHECK(!back[1].primal.has_value());
  CHECK(*back[1].test_error == 0.125);
  CHECK(back[1].wall_seconds == 1e-05);

  bcfw::ConvergenceTrace empty;
  io::write_trace_csv(empty, path);
  REQUIRE(read_file(path) == "passes,k,primal,dual,gap,train_error,test_error,seconds\n");
}

TEST_CASE("trace invariants are enforced on write and append") {
  bcfw::TraceRecord a;
  a.effective_passes = 2.0;
  a.k = 1;
  a.wall_seconds = 0.0;
  bcfw::TraceRecord b = a;
  b.effective_passes = 1.0;
  const auto path = tmp_path("invariants.csv");

  REQUIRE_THROWS_AS(io::write_trace_csv({a, b}, path), std::invalid_argument);

  bcfw::TraceRecord neg = a;
  neg.gap = -1.0;
  REQUIRE_THROWS_AS(io::write_trace_csv({neg}, path), std::invalid_argument);

  io::write_trace_csv({a}, path);
  REQUIRE_THROWS_AS(io::append_trace_csv({b}, path), std::invalid_argument);
  bcfw::TraceRecord c = a;
  c.effective_passes = 3.0;
  c.k = 5;
  io::append_trace_csv({c}, path);
  REQUIRE(io::read_trace_csv(path).size() == 2);

  // Appending to a missing file creates it, header included.
  const auto fresh = tmp_path("append_fresh.csv");
  std::filesystem::remove(fresh);
  io::append_trace_csv({a}, fresh);
  REQUIRE(io::read_trace_csv(fresh).size() == 1);
}

TEST_CASE("model files round-trip bit-exactly") {
  io::ModelFile m;
  m.n_labels = 3;
  m.n_features = 4;
  m.loss.kind = chain::LossKind::hamming;
  m.lambda = 0.0125;
  m.has_dual = true;
  m.ell = 1.0 / 3.0;
  const chain::ChainModel layout(3, 4);
  m.w.resize(static_cast<std::size_t>(layout.weight_dim()));
  for (std::size_t j = 0; j < m.w.size(); ++j) {
    m.w[j] = std::sin(static_cast<double>(j) * 0.7) * std::pow(10.0, static_cast<int>(j % 7) - 3);
  }
  m.w[0] = 1e-300;
  m.w[1] = -0.0;
  m.has_avg = true;
  m.w_avg = m.w;
  m.w_avg[2] = 0.1 + 0.2;  // not exactly 0.3
  m.ell_avg = 0.25;

  const auto path = tmp_path("model.bin");
  io::save_model(m, path);
  const auto back = io::load_model(path);
  REQUIRE(back.n_labels == 3);
  REQUIRE(back.n_features == 4);
  REQUIRE(back.loss.kind == chain::LossKind::hamming);
  REQUIRE(back.lambda == m.lambda);
  REQUIRE(back.has_dual);
  REQUIRE(back.ell == m.ell);
  REQUIRE(back.w == m.w);
  REQUIRE(back.has_avg);
  REQUIRE(back.w_avg == m.w_avg);
  REQUIRE(back.ell_avg == 0.25);

  const auto path2 = tmp_path("model2.bin");
  io::save_model(back, path2);
  REQUIRE(read_file(path) == read_file(path2));
}

TEST_CASE("model files reject corruption and mismatched layouts") {
  io::ModelFile m;
  m.n_labels = 2;
  m.n_features = 3;
  m.lambda = 0.5;
  m.w.assign(static_cast<std::size_t>(chain::ChainModel(2, 3).weight_dim()), 1.0);
  const auto path = tmp_path("corrupt.bin");
  io::save_model(m, path);

  auto bytes = read_file(path);
  auto patched = bytes;
  patched[0] = 'X';
  write_file(path, patched);
  REQUIRE_THROWS_WITH(io::load_model(path), ContainsSubstring("bad magic"));

  // Patch the stored weight dimension (bytes 20..23) to disagree with q/p.
  patched = bytes;
  patched[20] = static_cast<char>(static_cast<unsigned char>(patched[20]) + 1);
  write_file(path, patched);
  REQUIRE_THROWS_WITH(io::load_model(path), ContainsSubstring("weight dimension"));

  write_file(path, bytes.substr(0, bytes.size() - 4));
  REQUIRE_THROWS_WITH(io::load_model(path), ContainsSubstring("truncated"));

  write_file(path, bytes + "zz");
  REQUIRE_THROWS_WITH(io::load_model(path), ContainsSubstring("trailing bytes"));

  // Version bumps are refused rather than misread (byte 8 is the version LSB).
  patched = bytes;
  patched[8] = 2;
  write_file(path, patched);
  REQUIRE_THROWS_WITH(io::load_model(path), ContainsSubstring("unsupported model version"));

  io::ModelFile bad = m;
  bad.w.resize(3);
  REQUIRE_THROWS_AS(io::save_model(bad, path), std::invalid_argument);
}
