// Copyright 2026 The RRM Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rrm/bounds.hpp"
#include "rrm/certify.hpp"
#include "rrm/datagen.hpp"
#include "rrm/io.hpp"
#include "rrm/oracle.hpp"
#include "rrm/rationality.hpp"
#include "rrm/rng.hpp"
#include "rrm/trainers.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Thrown for flag combinations CLI11 cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TrainerFlags {
  std::string name = "ridge";
  double lambda = 1e-6;
  double gap = 0.2;
  std::uint32_t constant = 0;
};

void add_trainer_flags(CLI::App* cmd, TrainerFlags& flags) {
  cmd->add_option("--trainer", flags.name, "ridge, interpolator, majority, constant or trivialrep")
      ->check(CLI::IsMember({"ridge", "interpolator", "majority", "constant", "trivialrep"}))
      ->capture_default_str();
  cmd->add_option("--lambda", flags.lambda, "ridge penalty")->capture_default_str();
  cmd->add_option("--gap", flags.gap, "target rationality gap of the trivialrep trainer")
      ->capture_default_str();
  cmd->add_option("--constant", flags.constant, "class predicted by the constant trainer");
}

rrm::Trainer make_trainer(const TrainerFlags& flags, std::uint32_t k) {
  rrm::RidgeConfig config;
  config.lambda = flags.lambda;
  config.validate();
  if (flags.name == "ridge") return rrm::ridge_trainer(config);
  if (flags.name == "interpolator") return rrm::interpolating_trainer();
  if (flags.name == "majority") return rrm::majority_trainer();
  if (flags.name == "constant") {
    if (flags.constant >= k) throw UsageError("--constant must be < k");
    return rrm::constant_trainer(flags.constant);
  }
  if (!(flags.gap > 0.0 && flags.gap < 1.0 - 1.0 / k)) {
    throw UsageError("--gap must lie in (0, 1 - 1/k)");
  }
  return rrm::trivial_representation_trainer(rrm::ridge_trainer(config),
                                             rrm::mask_fraction_for_gap(flags.gap, k));
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : "null"; }

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

// ---------------------------------------------------------------- synth

struct SynthFlags {
  std::string preset = "gaussian";
  std::size_t n = 1000;
  std::optional<std::size_t> n_test;
  std::uint32_t dim = 16;
  std::uint32_t classes = 2;
  double sep = 10.0;
  double gap = 0.2;
  double margin = 1.0;
  std::uint64_t seed = 0;
  std::string out;
  std::uint32_t augment = 1;
  double jitter = 0.0;
  bool csv = false;
};

int run_synth(const SynthFlags& f) {
  rrm::SynthSpec spec;
  spec.n_train = f.n;
  spec.n_test = f.n_test.value_or(f.n);
  spec.seed = f.seed;
  if (f.preset == "gaussian") {
    spec.preset = rrm::GaussianClusters{f.classes, f.dim, f.sep};
  } else if (f.preset == "trivialrep") {
    spec.preset = rrm::TrivialRepFixture{f.gap, f.classes, f.dim, f.sep};
  } else {
    spec.preset = rrm::MarginFixture{{{f.margin, 1.0}}};
  }
  rrm::SplitDataset split = rrm::synth(spec);
  if (f.augment > 1) {
    split.train = rrm::augment(split.train, f.augment, f.jitter, rrm::derive_seed(f.seed, 2));
  }
  const fs::path dir(f.out);
  fs::create_directories(dir);
  const std::string ext = f.csv ? ".csv" : ".emb";
  if (f.csv) {
    rrm::write_embeddings_csv(split.train, dir / ("train" + ext));
    rrm::write_embeddings_csv(split.test, dir / ("test" + ext));
  } else {
    rrm::write_embeddings(split.train, dir / ("train" + ext));
    rrm::write_embeddings(split.test, dir / ("test" + ext));
  }
  std::cout << "command=synth preset=" << f.preset << " n_train=" << split.train.size()
            << " n_test=" << split.test.size() << " dim=" << split.train.dim()
            << " classes=" << split.train.num_classes() << " train="
            << (dir / ("train" + ext)).string() << " test=" << (dir / ("test" + ext)).string();
  if (f.preset == "trivialrep") {
    std::cout << " mask_fraction=" << fmt(rrm::mask_fraction_for_gap(f.gap, f.classes));
  }
  std::cout << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- audit

rrm::LabeledEmbeddings load(const fs::path& path) {
  if (path.extension() == ".csv") return rrm::read_embeddings_csv(path);
  return rrm::read_embeddings(path);
}

struct AuditFlags {
  std::string train, test, out;
  double eta = 0.05;
  std::uint32_t trials = 20;
  TrainerFlags trainer;
  std::string noise_model = "uniform-all";
  std::string denominator = "eta";
  std::string cpc = "off";
  bool miller_madow = false;
  std::uint64_t seed = 0;
};

int run_audit(const AuditFlags& f, unsigned threads) {
  const rrm::LabeledEmbeddings train = load(f.train);
  const rrm::LabeledEmbeddings test = load(f.test);
  const rrm::NoiseModel model{rrm::parse_noise_variant(f.noise_model), f.eta};
  rrm::AuditOptions options;
  options.denominator = rrm::parse_bound_denominator(f.denominator);
  options.compute_cpc = f.cpc == "on";
  options.miller_madow = f.miller_madow;
  options.threads = threads;
  const rrm::Trainer trainer = make_trainer(f.trainer, train.num_classes());
  const rrm::GapReport report = rrm::audit(trainer, train, test, model, f.trials, f.seed, options);
  if (!f.out.empty()) rrm::write_report(report, f.out);
  if (!report.accuracies.ntrain_noisy) {
    std::cerr << "warning: no label was corrupted in any trial; NTrain(eta) is undefined and "
                 "the rationality and memorization gaps are not reported\n";
  }
  std::cout << "command=audit " << rrm::summary_line(report)
            << " thm2_bound_capped=" << fmt(report.thm2_bound_capped)
            << " cdc_nats=" << fmt(report.cdc) << " cpc_nats=" << fmt(report.cpc) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- oracle

struct OracleFlags {
  std::string suite;
  std::size_t count = 100;
  std::uint64_t seed = 1;
  std::string dump_dir = ".";
};

int run_oracle(const OracleFlags& f, unsigned threads) {
  const bool all = f.suite == "all";
  bool ok = true;
  auto line = [&](const std::string& suite, std::size_t checked, std::size_t violations,
                  const std::string& extra) {
    ok = ok && violations == 0;
    std::cout << "command=oracle suite=" << suite << " checked=" << checked
              << " violations=" << violations << extra
              << " result=" << (violations == 0 ? "PASS" : "FAIL") << '\n';
  };
  if (all || f.suite == "chain") {
    rrm::ChainOptions options;
    options.dump_dir = fs::path(f.dump_dir);
    fs::create_directories(*options.dump_dir);
    const rrm::ChainCertification cert = rrm::certify_chain(f.count, f.seed, options);
    line("chain", cert.scenarios, cert.violations.size(), "");
    for (const auto& v : cert.violations) {
      std::cout << "counterexample index=" << v.scenario_index << " dump="
                << (v.dump_path ? v.dump_path->string() : "none") << " detail=\"" << v.description
                << "\"\n";
    }
  }
  if (all || f.suite == "pinsker") {
    const rrm::PinskerGridResult r = rrm::pinsker_grid();
    line("pinsker", r.joints, r.violations, " worst_excess=" + fmt(r.worst_excess));
  }
  if (all || f.suite == "lemma-a2") {
    const rrm::SuperadditivityResult r = rrm::superadditivity_suite(f.count, f.seed);
    line("lemma-a2", r.joints, r.violations, " worst_excess=" + fmt(r.worst_excess));
  }
  if (all || f.suite == "erm") {
    const rrm::ErmRobustness r = rrm::erm_suite(100, 0.1, 200, f.seed, threads);
    line("erm", 200, r.holds ? 0 : 1,
         " gap=" + fmt(r.gap) + " bound=" + fmt(r.bound) + " sigma=" + fmt(r.sigma));
  }
  return ok ? kExitOk : kExitRuntime;
}

// ---------------------------------------------------------------- potl

struct PotlFlags {
  std::string train, test, out;
  double eta = 0.05;
  std::uint64_t seed = 0;
  std::uint32_t votes = 1;
  std::uint32_t audit_trials = 20;
  std::string noise_model = "uniform-all";
  TrainerFlags trainer;
};

int run_potl(const PotlFlags& f, unsigned threads) {
  const rrm::LabeledEmbeddings train = load(f.train);
  const rrm::LabeledEmbeddings test = load(f.test);
  rrm::PotlConfig config;
  config.trials_per_test_point = f.votes;
  config.noise = {rrm::parse_noise_variant(f.noise_model), f.eta};
  config.seed = f.seed;
  config.threads = threads;
  const rrm::Trainer trainer = make_trainer(f.trainer, train.num_classes());
  const rrm::PotlResult r = rrm::potl_experiment(trainer, train, test, config, f.audit_trials);
  if (!r.assumption_holds) {
    std::cerr << "warning: Train(eta) >= NTrain(eta) does not hold on this train set\n";
  }
  if (!f.out.empty()) {
    auto opt = [](const std::optional<double>& v) {
      return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    nlohmann::json j{{"eta", f.eta},
                     {"seed", f.seed},
                     {"votes", f.votes},
                     {"test_s", r.test_s},
                     {"test_s_sigma", r.test_s_sigma},
                     {"test_t", r.test_t},
                     {"train_noisy", r.train_noisy},
                     {"ntrain_noisy", opt(r.ntrain_noisy)},
                     {"margin", opt(r.margin)},
                     {"gain", r.gain},
                     {"informal_rhs", opt(r.informal_rhs)},
                     {"assumption_holds", r.assumption_holds}};
    spit(f.out, j.dump(2) + "\n");
  }
  std::cout << "command=potl test_s=" << fmt(r.test_s) << " test_s_sigma=" << fmt(r.test_s_sigma)
            << " test_t=" << fmt(r.test_t) << " ntrain_noisy=" << fmt(r.ntrain_noisy)
            << " margin=" << fmt(r.margin) << " gain=" << fmt(r.gain)
            << " assumption_holds=" << (r.assumption_holds ? "true" : "false") << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- robustness

struct RobustnessFlags {
  std::string lemma = "ls";
  std::string train;
  std::vector<double> gammas{1.0};
  double eta = 0.05;
  std::uint32_t trials = 100;
  std::size_t n = 100;
  double lambda = 0.0;
  std::uint64_t seed = 0;
};

int run_robustness(const RobustnessFlags& f, unsigned threads) {
  if (f.lemma == "erm") {
    const rrm::ErmRobustness r = rrm::erm_suite(f.n, f.eta, f.trials, f.seed, threads);
    std::cout << "command=robustness lemma=erm train=" << fmt(r.train)
              << " train_noisy=" << fmt(r.train_noisy) << " gap=" << fmt(r.gap)
              << " bound=" << fmt(r.bound) << " sigma=" << fmt(r.sigma)
              << " holds=" << (r.holds ? "true" : "false") << '\n';
    return r.holds ? kExitOk : kExitRuntime;
  }
  rrm::LabeledEmbeddings data =
      f.train.empty()
          ? rrm::synth({rrm::MarginFixture{{{f.gammas.front(), 1.0}}}, f.n, f.n, f.seed}).train
          : load(f.train);
  rrm::RidgeConfig config;
  config.lambda = f.lambda;
  config.fit_bias = false;
  const auto rows = rrm::least_squares_robustness_check(
      data, config, {rrm::NoiseVariant::UniformAll, f.eta}, f.gammas, f.trials, f.seed, threads);
  bool ok = true;
  for (const auto& r : rows) {
    ok = ok && r.holds;
    std::cout << "command=robustness lemma=ls gamma=" << fmt(r.gamma)
              << " margin_fraction=" << fmt(r.margin_fraction)
              << " predicted=" << fmt(r.predicted) << " observed=" << fmt(r.observed)
              << " sigma=" << fmt(r.sigma) << " holds=" << (r.holds ? "true" : "false") << '\n';
  }
  return ok ? kExitOk : kExitRuntime;
}

// ---------------------------------------------------------------- plotdata

struct PlotFlags {
  std::vector<std::string> reports;
  std::string out;
  bool sort = false;
};

int run_plotdata(const PlotFlags& f) {
  std::vector<rrm::PlotRow> rows;
  for (const auto& path : f.reports) {
    rows.push_back(rrm::plot_row(fs::path(path).stem().string(), rrm::read_report(path)));
  }
  spit(f.out, rrm::format_plot_csv(rows, f.sort));
  std::cout << "command=plotdata rows=" << rows.size() << " out=" << f.out << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robustness / rationality / memorization gap toolkit"};
  app.require_subcommand(1);
  unsigned threads = 1;
  app.add_option("--threads", threads, "worker threads cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  SynthFlags synth;
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic train/test pair");
  synth_cmd->add_option("--preset", synth.preset)
      ->check(CLI::IsMember({"gaussian", "trivialrep", "margin"}))
      ->capture_default_str();
  synth_cmd->add_option("--n", synth.n, "train rows")->capture_default_str();
  synth_cmd->add_option("--n-test", synth.n_test, "test rows (default: --n)");
  synth_cmd->add_option("--dim", synth.dim)->capture_default_str();
  synth_cmd->add_option("--classes", synth.classes)->capture_default_str();
  synth_cmd->add_option("--sep", synth.sep, "class mean separation in sigma units")
      ->capture_default_str();
  synth_cmd->add_option("--gap", synth.gap, "trivialrep target rationality gap")
      ->capture_default_str();
  synth_cmd->add_option("--margin", synth.margin, "margin preset gamma")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "output directory")->required();
  synth_cmd->add_option("--augment", synth.augment, "copies per train row")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth_cmd->add_option("--jitter", synth.jitter, "per-copy Gaussian jitter")
      ->capture_default_str();
  synth_cmd->add_flag("--csv", synth.csv, "write CSV instead of .emb");

  AuditFlags audit;
  auto* audit_cmd = app.add_subcommand("audit", "measure the gap decomposition");
  audit_cmd->add_option("--train", audit.train)->required();
  audit_cmd->add_option("--test", audit.test)->required();
  audit_cmd->add_option("--eta", audit.eta)->capture_default_str();
  audit_cmd->add_option("--trials", audit.trials)->capture_default_str();
  add_trainer_flags(audit_cmd, audit.trainer);
  audit_cmd->add_option("--noise-model", audit.noise_model)
      ->check(CLI::IsMember({"uniform-all", "uniform-other"}))
      ->capture_default_str();
  audit_cmd->add_option("--bound-denominator", audit.denominator)
      ->check(CLI::IsMember({"eta", "empirical"}))
      ->capture_default_str();
  audit_cmd->add_option("--cpc", audit.cpc)
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  audit_cmd->add_flag("--miller-madow", audit.miller_madow, "bias-corrected MI estimates");
  audit_cmd->add_option("--seed", audit.seed)->capture_default_str();
  audit_cmd->add_option("--out", audit.out, "report JSON path");

  OracleFlags oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "run the exact certification suites");
  oracle_cmd->add_option("--suite", oracle.suite)
      ->required()
      ->check(CLI::IsMember({"chain", "pinsker", "lemma-a2", "erm", "all"}));
  oracle_cmd->add_option("--count", oracle.count)->capture_default_str();
  oracle_cmd->add_option("--seed", oracle.seed)->capture_default_str();
  oracle_cmd->add_option("--dump-dir", oracle.dump_dir, "where counterexamples are written")
      ->capture_default_str();

  PotlFlags potl;
  auto* potl_cmd = app.add_subcommand("potl", "run procedure S on every test point");
  potl_cmd->add_option("--train", potl.train)->required();
  potl_cmd->add_option("--test", potl.test)->required();
  potl_cmd->add_option("--eta", potl.eta)->capture_default_str();
  potl_cmd->add_option("--seed", potl.seed)->capture_default_str();
  potl_cmd->add_option("--votes", potl.votes, "repetitions per test point")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  potl_cmd->add_option("--audit-trials", potl.audit_trials)->capture_default_str();
  potl_cmd->add_option("--noise-model", potl.noise_model)
      ->check(CLI::IsMember({"uniform-all", "uniform-other"}))
      ->capture_default_str();
  add_trainer_flags(potl_cmd, potl.trainer);
  potl_cmd->add_option("--out", potl.out, "result JSON path");

  RobustnessFlags robust;
  auto* robust_cmd = app.add_subcommand("robustness", "Monte-Carlo robustness-gap checks");
  robust_cmd->add_option("--lemma", robust.lemma, "ls (least squares margin) or erm")
      ->check(CLI::IsMember({"ls", "erm"}))
      ->capture_default_str();
  robust_cmd->add_option("--train", robust.train, "dataset (default: margin fixture)");
  robust_cmd->add_option("--gamma", robust.gammas)->capture_default_str();
  robust_cmd->add_option("--eta", robust.eta)->capture_default_str();
  robust_cmd->add_option("--trials", robust.trials)->capture_default_str();
  robust_cmd->add_option("--n", robust.n)->capture_default_str();
  robust_cmd->add_option("--lambda", robust.lambda)->capture_default_str();
  robust_cmd->add_option("--seed", robust.seed)->capture_default_str();

  PlotFlags plot;
  auto* plot_cmd = app.add_subcommand("plotdata", "collect reports into a CSV");
  plot_cmd->add_option("--reports", plot.reports)->required()->expected(1, -1);
  plot_cmd->add_option("--out", plot.out)->required();
  plot_cmd->add_flag("--sort", plot.sort, "order rows by generalization gap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*synth_cmd) return run_synth(synth);
    if (*audit_cmd) return run_audit(audit, threads);
    if (*oracle_cmd) return run_oracle(oracle, threads);
    if (*potl_cmd) return run_potl(potl, threads);
    if (*robust_cmd) return run_robustness(robust, threads);
    if (*plot_cmd) return run_plotdata(plot);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
