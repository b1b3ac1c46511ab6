#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/program_options.hpp>

#include "bcfw/chain/decode.hpp"
#include "bcfw/chain/metrics.hpp"
#include "bcfw/chain/model.hpp"
#include "bcfw/fw/types.hpp"
#include "bcfw/io/dataset.hpp"
#include "bcfw/io/model.hpp"
#include "bcfw/io/synthetic.hpp"
#include "bcfw/io/trace_csv.hpp"
#include "bcfw/svm/kernel.hpp"
#include "bcfw/svm/objectives.hpp"
#include "bcfw/svm/train.hpp"
#include "bcfw/svm/types.hpp"

namespace bcfw {
namespace cli {

// Exit codes: 0 success, 2 usage error (offending flag named), 1 runtime failure.

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail_cli {

namespace po = boost::program_options;

inline std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string("-"); }

struct Options {
  std::string command;
  std::string data;
  std::string test;
  std::string trace;
  std::string model;
  double lambda = -1.0;  // unset: defaults to 1/n after the dataset is loaded
  double passes = 20.0;
  double epsilon = 0.0;
  std::uint64_t seed = 1;
  int seeds = 10;
  std::string solver = "bcfw";
  std::string step = "ls";
  double nu = 1.0;
  double delta = 0.0;
  int beam = 0;
  std::int64_t gap_every = 10;
  std::string loss = "nh";
  int gen_n = 40;
  int gen_len = 6;
  int gen_q = 4;
  int gen_p = 20;
  double gen_noise = 0.1;

  bool given_test = false, given_trace = false, given_model = false, given_lambda = false;
  bool given_passes = false, given_epsilon = false, given_seeds = false, given_step = false;
  bool given_nu = false, given_delta = false, given_beam = false, given_gap_every = false;
  bool given_solver = false, given_loss = false, given_seed = false;
  bool given_gen_size = false, given_noise = false;
};

inline const char* usage_text() {
  return
      "usage: bcfw_cli <command> [flags]\n"
      "\n"
      "commands:\n"
      "  gen     write a synthetic chain dataset (and optionally its planted model)\n"
      "  train   fit a model, optionally writing a trace CSV and a model file\n"
      "  eval    print a model's mean prediction loss on a dataset\n"
      "  gap     print the duality-gap certificate of a saved model on a dataset\n"
      "  bench   run one solver across several seeds; write per-seed traces + summary\n"
      "\n"
      "common flags:\n"
      "  --data PATH       dataset to read (gen: dataset to write); required\n"
      "  --test PATH       held-out dataset for the test_error trace column\n"
      "  --lambda X        regularization strength (default 1/n)\n"
      "  --passes X        training budget in passes over the data (default 20)\n"
      "  --epsilon X       stop once the duality gap is <= X (FW-family solvers)\n"
      "  --seed N          RNG seed (default 1); gen: dataset seed\n"
      "  --seeds N         bench only: number of consecutive seeds from --seed (default 10)\n"
      "  --solver NAME     bcfw | bcfw-wavg | bcfw-tavg | fw | ssg | ssg-wavg |\n"
      "                    subgrad | bcfw-kernel (default bcfw)\n"
      "  --step RULE       ls (line search, default) | fixed (2n/(k+2n) schedule)\n"
      "  --nu X            oracle multiplicative accuracy in (0,1]; <1 needs an\n"
      "                    enumerable instance (every q^T <= 4096)\n"
      "  --delta X         oracle additive accuracy >= 0; same restriction\n"
      "  --beam B          beam-width-B step decoder for bcfw solvers (0 = exact)\n"
      "  --gap-every N     checkpoint cadence in effective passes (default 10)\n"
      "  --trace PATH      trace CSV out; bench: stem for per-seed + summary files\n"
      "  --model PATH      train/gen: model file out; eval/gap: model file in\n"
      "  --loss KIND       nh (normalized Hamming, default) | h (Hamming)\n"
      "\n"
      "gen flags:\n"
      "  --n N --len T --q Q --p P   sizes (default 40 6 4 20)\n"
      "  --noise X                   per-position label flip rate (default 0.1)\n";
}

inline Options parse(const std::vector<std::string>& args) {
  Options o;
  o.command = args.front();
  po::options_description desc;
  desc.add_options()
      ("data", po::value<std::string>())
      ("test", po::value<std::string>())
      ("trace", po::value<std::string>())
      ("model", po::value<std::string>())
      ("lambda", po::value<double>())
      ("passes", po::value<double>())
      ("epsilon", po::value<double>())
      ("seed", po::value<std::uint64_t>())
      ("seeds", po::value<int>())
      ("solver", po::value<std::string>())
      ("step", po::value<std::string>())
      ("nu", po::value<double>())
      ("delta", po::value<double>())
      ("beam", po::value<int>())
      ("gap-every", po::value<std::int64_t>())
      ("loss", po::value<std::string>())
      ("n", po::value<int>())
      ("len", po::value<int>())
      ("q", po::value<int>())
      ("p", po::value<int>())
      ("noise", po::value<double>());

  po::variables_map vm;
  try {
    const std::vector<std::string> rest(args.begin() + 1, args.end());
    po::store(po::command_line_parser(rest).options(desc).run(), vm);
    po::notify(vm);
  } catch (const po::error& e) {
    throw UsageError(e.what());
  }

  const auto take_str = [&](const char* name, std::string& dst, bool& flag) {
    if (vm.count(name)) {
      dst = vm[name].as<std::string>();
      flag = true;
    }
  };
  bool given_data = false;
  take_str("data", o.data, given_data);
  take_str("test", o.test, o.given_test);
  take_str("trace", o.trace, o.given_trace);
  take_str("model", o.model, o.given_model);
  take_str("solver", o.solver, o.given_solver);
  take_str("step", o.step, o.given_step);
  take_str("loss", o.loss, o.given_loss);
  if (vm.count("lambda")) { o.lambda = vm["lambda"].as<double>(); o.given_lambda = true; }
  if (vm.count("passes")) { o.passes = vm["passes"].as<double>(); o.given_passes = true; }
  if (vm.count("epsilon")) { o.epsilon = vm["epsilon"].as<double>(); o.given_epsilon = true; }
  if (vm.count("seed")) { o.seed = vm["seed"].as<std::uint64_t>(); o.given_seed = true; }
  if (vm.count("seeds")) { o.seeds = vm["seeds"].as<int>(); o.given_seeds = true; }
  if (vm.count("nu")) { o.nu = vm["nu"].as<double>(); o.given_nu = true; }
  if (vm.count("delta")) { o.delta = vm["delta"].as<double>(); o.given_delta = true; }
  if (vm.count("beam")) { o.beam = vm["beam"].as<int>(); o.given_beam = true; }
  if (vm.count("gap-every")) { o.gap_every = vm["gap-every"].as<std::int64_t>(); o.given_gap_every = true; }
  if (vm.count("n")) { o.gen_n = vm["n"].as<int>(); o.given_gen_size = true; }
  if (vm.count("len")) { o.gen_len = vm["len"].as<int>(); o.given_gen_size = true; }
  if (vm.count("q")) { o.gen_q = vm["q"].as<int>(); o.given_gen_size = true; }
  if (vm.count("p")) { o.gen_p = vm["p"].as<int>(); o.given_gen_size = true; }
  if (vm.count("noise")) { o.gen_noise = vm["noise"].as<double>(); o.given_noise = true; }

  if (!given_data) throw UsageError("--data is required");
  return o;
}

inline bool is_bcfw_family(const std::string& s) {
  return s == "bcfw" || s == "bcfw-wavg" || s == "bcfw-tavg";
}
inline bool is_ssg_family(const std::string& s) { return s == "ssg" || s == "ssg-wavg"; }
inline bool has_certificates(const std::string& s) {
  return is_bcfw_family(s) || s == "fw" || s == "bcfw-kernel";
}

inline void reject(bool given, const char* flag, const std::string& why) {
  if (given) throw UsageError(std::string(flag) + ": " + why);
}

// Flags that only make sense for a training run.
inline void reject_train_flags(const Options& o, const std::string& ctx) {
  reject(o.given_solver, "--solver", "not applicable to " + ctx);
  reject(o.given_step, "--step", "not applicable to " + ctx);
  reject(o.given_passes, "--passes", "not applicable to " + ctx);
  reject(o.given_epsilon, "--epsilon", "not applicable to " + ctx);
  reject(o.given_nu, "--nu", "not applicable to " + ctx);
  reject(o.given_delta, "--delta", "not applicable to " + ctx);
  reject(o.given_beam, "--beam", "not applicable to " + ctx);
  reject(o.given_gap_every, "--gap-every", "not applicable to " + ctx);
  reject(o.given_test, "--test", "not applicable to " + ctx);
  reject(o.given_seeds, "--seeds", "not applicable to " + ctx);
}

inline void validate_train(const Options& o, const chain::SequenceDataset& data) {
  const auto& s = o.solver;
  if (!(is_bcfw_family(s) || is_ssg_family(s) || s == "fw" || s == "subgrad" || s == "bcfw-kernel")) {
    throw UsageError("--solver: unknown solver `" + s + "`");
  }
  if (o.step != "ls" && o.step != "fixed") throw UsageError("--step: expected ls or fixed");
  if (o.loss != "nh" && o.loss != "h") throw UsageError("--loss: expected nh or h");
  if (o.given_lambda && !(o.lambda > 0.0)) throw UsageError("--lambda: must be positive");
  if (!(o.passes >= 0.0)) throw UsageError("--passes: must be >= 0");
  if (o.gap_every < 1) throw UsageError("--gap-every: must be >= 1");
  if (!(o.nu > 0.0 && o.nu <= 1.0)) throw UsageError("--nu: must lie in (0, 1]");
  if (!(o.delta >= 0.0)) throw UsageError("--delta: must be >= 0");
  if (o.beam < 0) throw UsageError("--beam: must be >= 1 (0 means exact)");
  if (!(o.epsilon >= 0.0)) throw UsageError("--epsilon: must be >= 0");

  if (!has_certificates(s)) {
    reject(o.given_epsilon, "--epsilon", s + " has no duality-gap stopping rule");
    if (o.given_step && o.step == "ls") {
      throw UsageError("--step: " + s + " has no line search; its schedule is fixed");
    }
  }
  const bool approx = o.nu < 1.0 || o.delta > 0.0;
  if (o.beam > 0) {
    if (!is_bcfw_family(s)) throw UsageError("--beam: step decoders apply to bcfw block solvers only");
    if (approx) throw UsageError("--beam: cannot combine with --nu/--delta oracle accuracy");
  }
  if (approx) {
    if (!is_bcfw_family(s) && s != "fw") {
      throw UsageError("--nu: oracle accuracy applies to fw and bcfw solvers only");
    }
    for (std::size_t i = 0; i < data.examples.size(); ++i) {
      if (chain::detail_decode::labelings_count(data.examples[i].length(), data.n_labels, 4096) < 0) {
        throw UsageError("--nu: approximate oracles need an enumerable instance (q^T <= 4096)");
      }
    }
  }
}

struct TrainArtifacts {
  ConvergenceTrace trace;
  io::ModelFile model;
};

inline fw::SolverConfig make_config(const Options& o, int n, std::uint64_t seed) {
  fw::SolverConfig config;
  config.seed = seed;
  config.gap_tolerance = o.epsilon;
  config.gap_check_every = o.gap_every;
  config.step_rule = o.step == "fixed" ? fw::StepRule::predefined : fw::StepRule::line_search;
  config.oracle.nu = o.nu;
  config.oracle.delta = o.delta;
  const bool per_example = is_bcfw_family(o.solver) || is_ssg_family(o.solver) || o.solver == "bcfw-kernel";
  const double steps = per_example ? o.passes * static_cast<double>(n) : o.passes;
  config.max_iterations = static_cast<std::int64_t>(steps + 0.5);
  if (o.solver == "bcfw-wavg" || o.solver == "ssg-wavg") config.averaging = fw::Averaging::weighted;
  if (o.solver == "bcfw-tavg") config.averaging = fw::Averaging::suffix;
  return config;
}

inline TrainArtifacts train_once(const Options& o, const chain::ChainModel& model,
                                 const chain::SequenceDataset& data,
                                 const chain::SequenceDataset* test, std::uint64_t seed) {
  svm::SvmHyperparams hp;
  hp.lambda = o.given_lambda ? o.lambda : 1.0 / static_cast<double>(data.size());
  hp.loss.kind = o.loss == "h" ? chain::LossKind::hamming : chain::LossKind::normalized_hamming;
  const fw::SolverConfig config = make_config(o, static_cast<int>(data.size()), seed);

  TrainArtifacts out;
  out.model.n_labels = model.n_labels;
  out.model.n_features = model.n_features;
  out.model.loss = hp.loss;
  out.model.lambda = hp.lambda;

  const auto& s = o.solver;
  if (is_bcfw_family(s)) {
    svm::TrainOptions opts;
    opts.test_data = test;
    if (o.beam > 0) opts.step_decoder = svm::beam_step_decoder(o.beam);
    auto res = svm::bcfw_train(model, data, hp, config, opts);
    out.trace = std::move(res.trace);
    out.model.has_dual = true;
    out.model.w = std::move(res.state.w);
    out.model.ell = res.state.ell;
    if (config.averaging != fw::Averaging::none) {
      out.model.has_avg = true;
      out.model.w_avg = std::move(res.eval_w);
      out.model.ell_avg = res.eval_ell;
    }
  } else if (s == "fw") {
    svm::TrainOptions opts;
    opts.test_data = test;
    auto res = svm::batch_fw_train(model, data, hp, config, opts);
    out.trace = std::move(res.trace);
    out.model.has_dual = true;
    out.model.w = std::move(res.state.w);
    out.model.ell = res.state.ell;
  } else if (s == "bcfw-kernel") {
    svm::KernelTrainOptions opts;
    opts.test_data = test;
    auto res = svm::kernelized_bcfw_train(model, data, hp, config, svm::linear_kernel(), opts);
    out.trace = std::move(res.trace);
    out.model.has_dual = true;
    out.model.w = std::move(res.w);
    out.model.ell = res.ell;
  } else if (is_ssg_family(s)) {
    svm::SsgOptions opts;
    opts.test_data = test;
    auto res = svm::ssg_train(model, data, hp, config, opts);
    out.trace = std::move(res.trace);
    out.model.has_dual = false;
    if (config.averaging == fw::Averaging::weighted) {
      out.model.has_avg = true;
      out.model.w_avg = std::move(res.w_avg);
      out.model.ell_avg = 0.0;
    }
    out.model.w = std::move(res.w);
    out.model.ell = 0.0;
  } else {  // subgrad
    const double lambda = hp.lambda;
    const auto beta = [lambda](std::int64_t k) {
      return fw::predefined_step_size(k, 1, 1.0) / lambda;
    };
    const auto iterates = svm::batch_subgradient_train(model, data, hp, beta, config.max_iterations);
    // Primal-only trace, same accounting as the stochastic solver: each
    // iteration is one pass, each checkpoint evaluation costs one more.
    std::int64_t evals = 0;
    for (std::size_t k = 0; k < iterates.size(); ++k) {
      const bool last = k + 1 == iterates.size();
      if (static_cast<std::int64_t>(k) % o.gap_every != 0 && !last) continue;
      ++evals;
      TraceRecord row;
      row.k = static_cast<std::int64_t>(k);
      row.effective_passes = static_cast<double>(k + static_cast<std::size_t>(evals));
      row.primal = svm::primal_objective(model, data, hp, iterates[k]);
      row.train_error = chain::test_error(model, iterates[k], data, hp.loss);
      if (test) row.test_error = chain::test_error(model, iterates[k], *test, hp.loss);
      out.trace.push_back(std::move(row));
    }
    out.model.has_dual = false;
    out.model.w = iterates.back();
    out.model.ell = 0.0;
  }
  return out;
}

inline std::string with_stem_suffix(const std::string& path, const std::string& suffix) {
  const std::string ext = ".csv";
  if (path.size() > ext.size() && path.compare(path.size() - ext.size(), ext.size(), ext) == 0) {
    return path.substr(0, path.size() - ext.size()) + suffix + ext;
  }
  return path + suffix + ext;
}

inline void write_bench_summary(const std::vector<ConvergenceTrace>& traces, const std::string& path) {
  std::size_t rows = traces.front().size();
  for (const auto& t : traces) rows = std::min(rows, t.size());
  std::string out = "passes,k,gap_min,gap_median,gap_max\n";
  for (std::size_t i = 0; i < rows; ++i) {
    const std::int64_t k0 = traces.front()[i].k;
    bool aligned = true;
    std::vector<double> gaps;
    gaps.reserve(traces.size());
    for (const auto& t : traces) {
      if (t[i].k != k0) aligned = false;
      if (t[i].gap) gaps.push_back(*t[i].gap);
    }
    if (!aligned) break;
    out += fmt(traces.front()[i].effective_passes);
    out += ',';
    out += std::to_string(k0);
    if (gaps.size() == traces.size()) {
      std::sort(gaps.begin(), gaps.end());
      const std::size_t m = gaps.size();
      const double median = m % 2 == 1 ? gaps[m / 2] : 0.5 * (gaps[m / 2 - 1] + gaps[m / 2]);
      out += ',' + fmt(gaps.front()) + ',' + fmt(median) + ',' + fmt(gaps.back());
    } else {
      out += ",,,";
    }
    out += '\n';
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error(path + ": cannot open for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error(path + ": write failed");
}

inline void print_final_row(std::ostream& os, const ConvergenceTrace& trace) {
  if (trace.empty()) {
    os << "no checkpoints recorded\n";
    return;
  }
  const auto& r = trace.back();
  os << "passes " << fmt(r.effective_passes) << "  primal " << fmt_opt(r.primal) << "  dual "
     << fmt_opt(r.dual) << "  gap " << fmt_opt(r.gap) << "  train_error " << fmt_opt(r.train_error)
     << "  test_error " << fmt_opt(r.test_error) << "\n";
}

inline int run_gen(const Options& o, std::ostream& os) {
  reject(o.given_lambda, "--lambda", "not applicable to gen");
  reject(o.given_loss, "--loss", "not applicable to gen");
  reject(o.given_trace, "--trace", "not applicable to gen");
  reject_train_flags(o, "gen");

  io::SyntheticSpec spec;
  spec.n_sequences = o.gen_n;
  spec.length = o.gen_len;
  spec.n_labels = o.gen_q;
  spec.n_features = o.gen_p;
  spec.noise = o.gen_noise;
  spec.seed = o.seed;
  auto res = io::generate_synthetic(spec);
  io::save_sequence_dataset(res.data, o.data);
  os << "wrote dataset " << o.data << " (n=" << spec.n_sequences << " len=" << spec.length
     << " q=" << spec.n_labels << " p=" << spec.n_features << " noise=" << fmt(spec.noise) << ")\n";
  if (o.given_model) {
    io::ModelFile m;
    m.n_labels = spec.n_labels;
    m.n_features = spec.n_features;
    m.lambda = 0.0;
    m.has_dual = false;
    m.w = std::move(res.planted_w);
    io::save_model(m, o.model);
    os << "wrote planted model " << o.model << "\n";
  }
  return 0;
}

inline int run_train(const Options& o, std::ostream& os) {
  reject(o.given_gen_size, "--n", "dataset sizes apply to gen only");
  reject(o.given_noise, "--noise", "not applicable to train");
  reject(o.given_seeds, "--seeds", "bench runs multiple seeds; train takes --seed");

  const auto data = io::load_sequence_dataset(o.data);
  if (data.size() == 0) throw std::runtime_error(o.data + ": cannot train on an empty dataset");
  chain::SequenceDataset test;
  if (o.given_test) {
    test = io::load_sequence_dataset(o.test);
    if (test.n_labels != data.n_labels || test.n_features != data.n_features) {
      throw std::runtime_error(o.test + ": test dataset layout differs from --data");
    }
  }
  validate_train(o, data);
  const chain::ChainModel model(data.n_labels, data.n_features);
  auto artifacts = train_once(o, model, data, o.given_test ? &test : nullptr, o.seed);
  if (o.given_trace) {
    io::write_trace_csv(artifacts.trace, o.trace);
    os << "wrote trace " << o.trace << "\n";
  }
  if (o.given_model) {
    io::save_model(artifacts.model, o.model);
    os << "wrote model " << o.model << "\n";
  }
  print_final_row(os, artifacts.trace);
  return 0;
}

inline int run_bench(const Options& o, std::ostream& os) {
  reject(o.given_gen_size, "--n", "dataset sizes apply to gen only");
  reject(o.given_noise, "--noise", "not applicable to bench");
  reject(o.given_model, "--model", "bench does not save models");
  if (!o.given_trace) throw UsageError("--trace is required for bench (per-seed trace stem)");
  if (o.seeds < 1) throw UsageError("--seeds: must be >= 1");

  const auto data = io::load_sequence_dataset(o.data);
  if (data.size() == 0) throw std::runtime_error(o.data + ": cannot train on an empty dataset");
  chain::SequenceDataset test;
  if (o.given_test) {
    test = io::load_sequence_dataset(o.test);
    if (test.n_labels != data.n_labels || test.n_features != data.n_features) {
      throw std::runtime_error(o.test + ": test dataset layout differs from --data");
    }
  }
  validate_train(o, data);
  const chain::ChainModel model(data.n_labels, data.n_features);

  std::vector<ConvergenceTrace> traces;
  traces.reserve(static_cast<std::size_t>(o.seeds));
  for (int s = 0; s < o.seeds; ++s) {
    const std::uint64_t seed = o.seed + static_cast<std::uint64_t>(s);
    auto artifacts = train_once(o, model, data, o.given_test ? &test : nullptr, seed);
    const std::string path = with_stem_suffix(o.trace, "_seed" + std::to_string(seed));
    io::write_trace_csv(artifacts.trace, path);
    os << "seed " << seed << ": wrote " << path << "  ";
    print_final_row(os, artifacts.trace);
    traces.push_back(std::move(artifacts.trace));
  }
  const std::string summary = with_stem_suffix(o.trace, "_summary");
  write_bench_summary(traces, summary);
  os << "wrote summary " << summary << "\n";
  return 0;
}

inline int run_eval(const Options& o, std::ostream& os) {
  reject(o.given_gen_size, "--n", "dataset sizes apply to gen only");
  reject(o.given_noise, "--noise", "not applicable to eval");
  reject(o.given_lambda, "--lambda", "eval reads lambda from the model file");
  reject(o.given_loss, "--loss", "eval reads the loss from the model file");
  reject(o.given_trace, "--trace", "not applicable to eval");
  reject_train_flags(o, "eval");
  if (!o.given_model) throw UsageError("--model is required for eval");

  const auto m = io::load_model(o.model);
  const auto data = io::load_sequence_dataset(o.data);
  if (data.n_labels != m.n_labels || data.n_features != m.n_features) {
    throw std::runtime_error(o.data + ": dataset layout does not match the model (q/p)");
  }
  const chain::ChainModel model(m.n_labels, m.n_features);
  const DenseVec& w = m.has_avg ? m.w_avg : m.w;
  os << "error " << fmt(chain::test_error(model, w, data, m.loss)) << "\n";
  return 0;
}

inline int run_gap(const Options& o, std::ostream& os) {
  reject(o.given_gen_size, "--n", "dataset sizes apply to gen only");
  reject(o.given_noise, "--noise", "not applicable to gap");
  reject(o.given_lambda, "--lambda", "gap reads lambda from the model file");
  reject(o.given_loss, "--loss", "gap reads the loss from the model file");
  reject(o.given_trace, "--trace", "not applicable to gap");
  reject_train_flags(o, "gap");
  if (!o.given_model) throw UsageError("--model is required for gap");

  const auto m = io::load_model(o.model);
  if (!m.has_dual) {
    throw UsageError("--model: this model has no dual state; gap needs an FW-family model");
  }
  if (!(m.lambda > 0.0)) throw std::runtime_error(o.model + ": model has no valid lambda");
  const auto data = io::load_sequence_dataset(o.data);
  if (data.size() == 0) throw std::runtime_error(o.data + ": gap needs a nonempty dataset");
  if (data.n_labels != m.n_labels || data.n_features != m.n_features) {
    throw std::runtime_error(o.data + ": dataset layout does not match the model (q/p)");
  }
  const chain::ChainModel model(m.n_labels, m.n_features);
  svm::SvmHyperparams hp;
  hp.lambda = m.lambda;
  hp.loss = m.loss;
  const DenseVec& w = m.has_avg ? m.w_avg : m.w;
  const double ell = m.has_avg ? m.ell_avg : m.ell;
  const auto g = svm::svm_duality_gap(model, data, hp, w, ell);
  os << "gap " << fmt(g.gap) << "\n";
  os << "primal " << fmt(g.primal) << "\n";
  os << "dual " << fmt(g.dual) << "\n";
  return 0;
}

}  // namespace detail_cli

// The CLI entry point; args excludes the program name. Streams default to
// std::cout/std::cerr and are injectable for in-process tests.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  using namespace detail_cli;
  if (args.empty() || args.front() == "--help" || args.front() == "-h" || args.front() == "help") {
    out << usage_text();
    return args.empty() ? 2 : 0;
  }
  try {
    const Options o = parse(args);
    if (o.command == "gen") return run_gen(o, out);
    if (o.command == "train") return run_train(o, out);
    if (o.command == "eval") return run_eval(o, out);
    if (o.command == "gap") return run_gap(o, out);
    if (o.command == "bench") return run_bench(o, out);
    throw UsageError("unknown command `" + o.command + "`; expected gen|train|eval|gap|bench");
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace cli
}  // namespace bcfw
