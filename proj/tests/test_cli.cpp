#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bcfw/cli/run.hpp"
#include "bcfw/io/model.hpp"
#include "bcfw/io/trace_csv.hpp"

namespace {

namespace fs = std::filesystem;
using Catch::Matchers::ContainsSubstring;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = bcfw::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string tmp_path(const std::string& name) {
  return (fs::temp_directory_path() / ("bcfw_cli_" + name)).string();
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f);
  return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

// First whitespace-delimited token after a line's `key ` prefix.
double value_after(const std::string& out, const std::string& key) {
  std::istringstream lines(out);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind(key + " ", 0) == 0) return std::stod(line.substr(key.size() + 1));
  }
  FAIL("no `" << key << "` line in output:\n" << out);
  return 0.0;
}

std::string make_dataset(const std::string& name, const std::string& extra_q = "",
                         const std::string& extra_len = "") {
  const auto path = tmp_path(name);
  std::vector<std::string> args = {"gen",    "--data", path, "--n",     "8",  "--len",
                                   "3",      "--q",    "2",  "--p",     "6",  "--noise",
                                   "0.2",    "--seed", "5"};
  if (!extra_q.empty()) {
    args[8] = extra_q;
  }
  if (!extra_len.empty()) {
    args[6] = extra_len;
  }
  const auto r = run_cli(args);
  REQUIRE(r.code == 0);
  return path;
}

}  // namespace

TEST_CASE("help and empty invocations") {
  const auto help = run_cli({"help"});
  CHECK(help.code == 0);
  CHECK_THAT(help.out, ContainsSubstring("usage: bcfw_cli"));
  CHECK(run_cli({"--help"}).code == 0);

  const auto none = run_cli({});
  CHECK(none.code == 2);
  CHECK_THAT(none.out, ContainsSubstring("usage: bcfw_cli"));
}

TEST_CASE("gen is deterministic and its planted model loads") {
  const auto d1 = tmp_path("gen1.txt");
  const auto d2 = tmp_path("gen2.txt");
  const auto m1 = tmp_path("gen1.model");
  const std::vector<std::string> base = {"--n", "6", "--len", "3", "--q", "3",
                                         "--p", "5", "--noise", "0.25", "--seed", "11"};
  auto args1 = std::vector<std::string>{"gen", "--data", d1, "--model", m1};
  auto args2 = std::vector<std::string>{"gen", "--data", d2};
  args1.insert(args1.end(), base.begin(), base.end());
  args2.insert(args2.end(), base.begin(), base.end());
  REQUIRE(run_cli(args1).code == 0);
  REQUIRE(run_cli(args2).code == 0);
  REQUIRE(read_file(d1) == read_file(d2));

  const auto ds = bcfw::io::load_sequence_dataset(d1);
  CHECK(ds.examples.size() == 6);
  CHECK(ds.n_labels == 3);
  CHECK(ds.n_features == 5);

  const auto planted = bcfw::io::load_model(m1);
  CHECK(planted.lambda == 0.0);
  CHECK_FALSE(planted.has_dual);
  CHECK(planted.w.size() == static_cast<std::size_t>(bcfw::chain::ChainModel(3, 5).weight_dim()));
}

TEST_CASE("train is deterministic modulo the wall-clock column") {
  const auto data = make_dataset("train.txt");
  const auto t1 = tmp_path("trace1.csv");
  const auto t2 = tmp_path("trace2.csv");
  const auto m1 = tmp_path("train1.model");
  const auto m2 = tmp_path("train2.model");
  const std::vector<std::string> tail = {"--data", data,     "--passes", "4",
                                         "--gap-every", "2", "--seed",   "3"};
  for (int rep = 0; rep < 2; ++rep) {
    std::vector<std::string> args = {"train", "--trace", rep == 0 ? t1 : t2,
                                     "--model", rep == 0 ? m1 : m2};
    args.insert(args.end(), tail.begin(), tail.end());
    REQUIRE(run_cli(args).code == 0);
  }
  REQUIRE(read_file(m1) == read_file(m2));  // no timing data in models

  const auto a = bcfw::io::read_trace_csv(t1);
  const auto b = bcfw::io::read_trace_csv(t2);
  REQUIRE(a.size() == b.size());
  REQUIRE(a.size() >= 2);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].effective_passes == b[i].effective_passes);
    CHECK(a[i].k == b[i].k);
    CHECK(a[i].primal == b[i].primal);
    CHECK(a[i].dual == b[i].dual);
    CHECK(a[i].gap == b[i].gap);
    CHECK(a[i].train_error == b[i].train_error);
    CHECK(a[i].test_error == b[i].test_error);
  }
  REQUIRE(a.back().gap.has_value());
}

TEST_CASE("gap reproduces the final trace checkpoint from the saved model") {
  const auto data = make_dataset("gapdata.txt");
  const auto trace = tmp_path("gap.csv");
  const auto model = tmp_path("gap.model");
  REQUIRE(run_cli({"train", "--data", data, "--trace", trace, "--model", model,
                   "--passes", "6", "--gap-every", "2", "--seed", "2"})
              .code == 0);

  const auto rows = bcfw::io::read_trace_csv(trace);
  REQUIRE(!rows.empty());
  REQUIRE(rows.back().gap.has_value());

  const auto g = run_cli({"gap", "--data", data, "--model", model});
  REQUIRE(g.code == 0);
  const double gap = value_after(g.out, "gap");
  const double primal = value_after(g.out, "primal");
  const double dual = value_after(g.out, "dual");
  CHECK(std::abs(gap - *rows.back().gap) <= 1e-9);
  CHECK(std::abs(primal - *rows.back().primal) <= 1e-9);
  CHECK(std::abs(dual - *rows.back().dual) <= 1e-9);
  CHECK(std::abs((primal - dual) - gap) <= 1e-9);
}

TEST_CASE("eval prints a mean loss for saved and averaged models") {
  const auto data = make_dataset("evaldata.txt");
  const auto model = tmp_path("eval.model");
  REQUIRE(run_cli({"train", "--data", data, "--model", model, "--passes", "3"}).code == 0);
  const auto r = run_cli({"eval", "--data", data, "--model", model});
  REQUIRE(r.code == 0);
  const double err = value_after(r.out, "error");
  CHECK(err >= 0.0);
  CHECK(err <= 1.0);  // normalized Hamming

  const auto wavg = tmp_path("eval_wavg.model");
  REQUIRE(run_cli({"train", "--data", data, "--model", wavg, "--passes", "3",
                   "--solver", "bcfw-wavg"})
              .code == 0);
  const auto m = bcfw::io::load_model(wavg);
  CHECK(m.has_avg);
  CHECK(run_cli({"eval", "--data", data, "--model", wavg}).code == 0);
}

TEST_CASE("solver variants run end to end from the CLI") {
  const auto data = make_dataset("solvers.txt");
  for (const std::string solver :
       {"bcfw", "bcfw-wavg", "bcfw-tavg", "fw", "ssg", "ssg-wavg", "subgrad", "bcfw-kernel"}) {
    const auto trace = tmp_path("solver_" + solver + ".csv");
    const auto r = run_cli({"train", "--data", data, "--trace", trace, "--passes", "3",
                            "--solver", solver, "--gap-every", "1"});
    INFO(solver << "\n" << r.err);
    REQUIRE(r.code == 0);
    const auto rows = bcfw::io::read_trace_csv(trace);
    REQUIRE(!rows.empty());
    const bool certificates = solver != "ssg" && solver != "ssg-wavg" && solver != "subgrad";
    CHECK(rows.back().primal.has_value());
    CHECK(rows.back().gap.has_value() == certificates);
    CHECK(rows.back().dual.has_value() == certificates);
  }
}

TEST_CASE("beam and fixed-step flags are accepted where they apply") {
  const auto data = make_dataset("beamstep.txt");
  CHECK(run_cli({"train", "--data", data, "--passes", "2", "--beam", "2"}).code == 0);
  CHECK(run_cli({"train", "--data", data, "--passes", "2", "--step", "fixed"}).code == 0);
  CHECK(run_cli({"train", "--data", data, "--passes", "2", "--solver", "ssg",
                 "--step", "fixed"})
            .code == 0);
  CHECK(run_cli({"train", "--data", data, "--passes", "2", "--nu", "0.8"}).code == 0);
  CHECK(run_cli({"train", "--data", data, "--passes", "2", "--loss", "h"}).code == 0);
}

TEST_CASE("usage errors name the offending flag and exit 2") {
  const auto data = make_dataset("usage.txt");
  const auto expect_usage = [&](const std::vector<std::string>& args, const std::string& needle) {
    const auto r = run_cli(args);
    INFO(r.err);
    CHECK(r.code == 2);
    CHECK_THAT(r.err, ContainsSubstring("usage error"));
    CHECK_THAT(r.err, ContainsSubstring(needle));
  };

  expect_usage({"train", "--data", data, "--solver", "sdca"}, "--solver");
  expect_usage({"train", "--data", data, "--solver", "ssg", "--epsilon", "0.1"}, "--epsilon");
  expect_usage({"train", "--data", data, "--solver", "ssg", "--step", "ls"}, "--step");
  expect_usage({"train", "--data", data, "--solver", "fw", "--beam", "2"}, "--beam");
  expect_usage({"train", "--data", data, "--solver", "ssg", "--nu", "0.5"}, "--nu");
  expect_usage({"train", "--data", data, "--beam", "2", "--nu", "0.5"}, "--beam");
  expect_usage({"train", "--solver", "bcfw"}, "--data");
  expect_usage({"train", "--data", data, "--bogus", "1"}, "--bogus");
  expect_usage({"bench", "--data", data}, "--trace");
  expect_usage({"eval", "--data", data}, "--model");
  expect_usage({"gap", "--data", data}, "--model");
  expect_usage({"gen", "--data", data, "--lambda", "0.1"}, "--lambda");
  expect_usage({"train", "--data", data, "--seeds", "3"}, "--seeds");
  expect_usage({"frobnicate", "--data", data}, "unknown command");

  // Approximate oracles need every block enumerable (q^T within the cap).
  const auto big = make_dataset("usage_big.txt", "4", "7");
  expect_usage({"train", "--data", big, "--nu", "0.5"}, "--nu");

  // Certificate queries refuse models that carry no dual state.
  const auto ssg_model = tmp_path("usage_ssg.model");
  REQUIRE(run_cli({"train", "--data", data, "--model", ssg_model, "--passes", "2",
                   "--solver", "ssg"})
              .code == 0);
  expect_usage({"gap", "--data", data, "--model", ssg_model}, "--model");
}

TEST_CASE("runtime failures exit 1 with a diagnostic") {
  const auto r = run_cli({"train", "--data", tmp_path("no_such_file.txt")});
  CHECK(r.code == 1);
  CHECK_THAT(r.err, ContainsSubstring("error:"));

  const auto data = make_dataset("runtime.txt");
  const auto other = make_dataset("runtime_q3.txt", "3");
  const auto model = tmp_path("runtime.model");
  REQUIRE(run_cli({"train", "--data", data, "--model", model, "--passes", "2"}).code == 0);
  const auto mismatched = run_cli({"eval", "--data", other, "--model", model});
  CHECK(mismatched.code == 1);
  CHECK_THAT(mismatched.err, ContainsSubstring("does not match"));
}

TEST_CASE("bench writes per-seed traces and an aligned summary") {
  const auto data = make_dataset("bench.txt");
  const auto stem = tmp_path("bench.csv");
  const auto r = run_cli({"bench", "--data", data, "--trace", stem, "--passes", "3",
                          "--gap-every", "1", "--seed", "5", "--seeds", "3"});
  INFO(r.err);
  REQUIRE(r.code == 0);

  std::vector<bcfw::ConvergenceTrace> seeds;
  for (int s = 5; s <= 7; ++s) {
    const auto path = tmp_path("bench_seed" + std::to_string(s) + ".csv");
    REQUIRE(fs::exists(path));
    seeds.push_back(bcfw::io::read_trace_csv(path));
  }

  const auto summary = read_file(tmp_path("bench_summary.csv"));
  REQUIRE_THAT(summary, ContainsSubstring("passes,k,gap_min,gap_median,gap_max\n"));
  std::istringstream lines(summary);
  std::string line;
  std::getline(lines, line);  // header
  std::size_t rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    REQUIRE(c2 != std::string::npos);
    const double mn = std::stod(line.substr(c2 + 1));
    const auto last = line.rfind(',');
    const double mx = std::stod(line.substr(last + 1));
    CHECK(mn <= mx + 1e-15);
  }
  REQUIRE(rows > 0);
  for (const auto& t : seeds) REQUIRE(t.size() >= rows);
}
