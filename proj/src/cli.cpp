// Copyright 2026 The lfmc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lfmc/cli.hpp"

#include "lfmc/benchmark.hpp"
#include "lfmc/dataset.hpp"
#include "lfmc/diagnostics.hpp"
#include "lfmc/errors.hpp"
#include "lfmc/io.hpp"
#include "lfmc/model_file.hpp"
#include "lfmc/samplers.hpp"
#include "lfmc/simulators.hpp"
#include "lfmc/training.hpp"
#include "lfmc/workflows.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>

namespace lfmc {

namespace {

// Raised when a diagnostic succeeds technically but its verdict is a failure.
class DiagnosticFailure : public Error {
 public:
  using Error::Error;
};

/// Flags registered on a subcommand, merged with an optional key/value config
/// document: explicit flags > --set overrides > --config file > built-in defaults.
class Settings {
 public:
  explicit Settings(CLI::App* app) : app_(app) {
    app_->add_option("--config", config_path_, "key = value configuration document");
    app_->add_option("--set", overrides_, "KEY=VALUE override (repeatable)");
  }

  void flag(const std::string& key, const std::string& help, bool required = false) {
    std::string name = "--" + key;
    std::replace(name.begin(), name.end(), '_', '-');
    CLI::Option* opt = app_->add_option(name, values_[key], help);
    options_[key] = opt;
    if (required) required_.push_back(key);
  }

  void resolve() {
    if (!config_path_.empty()) doc_ = KeyValueDoc::load(config_path_);
    for (const std::string& kv : overrides_) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects KEY=VALUE, got '" + kv + "'");
      doc_.set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
    }
    for (const auto& [key, opt] : options_) {
      if (opt->count() > 0) doc_.set(key, values_[key]);
    }
    for (const std::string& key : required_) {
      if (!doc_.has(key)) throw ConfigError("missing required setting '" + key + "'");
    }
  }

  bool has(const std::string& key) const { return doc_.has(key); }
  std::string str(const std::string& key, const std::string& fallback = "") const { return doc_.get_or(key, fallback); }
  double num(const std::string& key, double fallback) const { return has(key) ? doc_.get_double(key) : fallback; }
  std::int64_t integer(const std::string& key, std::int64_t fallback) const {
    return has(key) ? doc_.get_int(key) : fallback;
  }
  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = doc_.get(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("setting '" + key + "' must be a boolean, got '" + v + "'");
  }
  Vec vec(const std::string& key) const { return doc_.get_vector(key); }
  std::uint64_t seed() const { return has("seed") ? std::stoull(doc_.get("seed")) : 0; }
  int workers() const {
    if (has("workers")) return static_cast<int>(std::max<std::int64_t>(1, doc_.get_int("workers")));
    if (const char* env = std::getenv("LFMC_WORKERS")) return static_cast<int>(std::max<std::int64_t>(1, parse_int(env)));
    return 1;
  }

 private:
  CLI::App* app_;
  std::string config_path_;
  std::vector<std::string> overrides_;
  std::map<std::string, std::string> values_;
  std::map<std::string, CLI::Option*> options_;
  std::vector<std::string> required_;
  KeyValueDoc doc_;
};

void add_train_flags(Settings& s) {
  s.flag("hidden", "hidden layer widths, e.g. 256,256,256");
  s.flag("activation", "relu | selu | elu");
  s.flag("batch_size", "mini-batch size (even)");
  s.flag("epochs", "training epochs");
  s.flag("learning_rate", "Adam learning rate");
  s.flag("weight_decay", "L2 weight decay");
  s.flag("amsgrad", "AMSGrad variant (true/false)");
  s.flag("validation_fraction", "held-out fraction in [0, 0.5]");
  s.flag("lr_scheduling", "halve the learning rate on validation plateaus (true/false)");
  s.flag("plateau_patience", "epochs without improvement before halving");
}

TrainConfig train_config(const Settings& s, const std::string& simulator) {
  TrainConfig c = TrainConfig::for_simulator(simulator);
  if (s.has("hidden")) {
    c.hidden.clear();
    for (const std::string& w : split(s.str("hidden"), ',')) c.hidden.push_back(static_cast<int>(parse_int(w)));
  }
  if (s.has("activation")) c.activation = activation_from_string(s.str("activation"));
  c.batch_size = static_cast<int>(s.integer("batch_size", c.batch_size));
  c.epochs = static_cast<int>(s.integer("epochs", c.epochs));
  c.learning_rate = s.num("learning_rate", c.learning_rate);
  c.weight_decay = s.num("weight_decay", c.weight_decay);
  c.amsgrad = s.boolean("amsgrad", c.amsgrad);
  c.validation_fraction = s.num("validation_fraction", c.validation_fraction);
  c.lr_scheduling = s.boolean("lr_scheduling", c.lr_scheduling);
  c.plateau_patience = static_cast<int>(s.integer("plateau_patience", c.plateau_patience));
  c.seed = s.seed();
  c.validate();
  return c;
}

void write_trace(const std::vector<EpochRecord>& trace, const std::string& path) {
  Mat m(static_cast<Eigen::Index>(trace.size()), 4);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) << trace[i].epoch, trace[i].train_loss, trace[i].validation_loss,
        trace[i].learning_rate;
  }
  write_csv_matrix(path, {"epoch", "train_loss", "validation_loss", "learning_rate"}, m);
}

std::shared_ptr<const RatioModel> open_model(const std::string& spec) {
  if (spec.rfind("builtin:", 0) == 0) return make_builtin_model(spec.substr(8));
  return load_model(spec);
}

// Simulator named explicitly, or recorded in the model, or implied by a built-in oracle.
std::string simulator_name(const Settings& s, const RatioModel& model) {
  if (s.has("simulator")) return s.str("simulator");
  if (const auto* est = dynamic_cast<const RatioEstimator*>(&model); est && !est->simulator.empty()) {
    return est->simulator;
  }
  if (const auto* ref = dynamic_cast<const ReferenceRatioEstimator*>(&model); ref && !ref->estimator().simulator.empty()) {
    return ref->estimator().simulator;
  }
  if (dynamic_cast<const Gaussian1dOracle*>(&model)) return "gaussian1d";
  return "";
}

std::shared_ptr<const Prior> resolve_prior(const Settings& s, const std::string& simulator) {
  if (s.has("prior")) return parse_prior(s.str("prior"));
  if (simulator.empty()) throw ConfigError("cannot determine the prior: pass --simulator or --prior");
  return make_simulator(simulator).prior;
}

Mat observations(const Settings& s) {
  if (s.has("observations")) return read_csv_matrix(s.str("observations"));
  if (s.has("x")) return s.vec("x").transpose();
  throw ConfigError("pass --observations FILE or --x VECTOR");
}

void check_dims(const RatioModel& model, const Prior& prior, Eigen::Index x_dim) {
  if (model.theta_dim() != prior.dim()) throw DimensionError("model theta dimension does not match the prior");
  if (model.x_dim() != x_dim) throw DimensionError("observation dimension does not match the model");
}

int cmd_simulate(const Settings& s) {
  const Simulator sim = make_simulator(s.str("simulator"));
  const std::shared_ptr<const Prior> prior = s.has("prior") ? parse_prior(s.str("prior")) : sim.prior;
  if (prior->dim() != sim.theta_dim) throw DimensionError("prior dimension does not match the simulator");
  DatasetOptions options;
  options.workers = s.workers();
  const JointDataset data = generate_joint_dataset(*prior, sim, s.integer("n", 0), s.seed(), options);
  save_dataset(data, s.str("out"));
  std::cout << "wrote " << data.size() << " pairs to " << s.str("out") << ".meta\n";
  return kExitOk;
}

void log_epoch(const EpochRecord& r) {
  std::cerr << "epoch " << r.epoch << " train " << format_double(r.train_loss) << " validation "
            << format_double(r.validation_loss) << "\n";
}

int cmd_train(const Settings& s) {
  const JointDataset data = load_dataset(s.str("data"));
  TrainConfig config = train_config(s, data.simulator);
  if (s.boolean("verbose", false)) {
    config.on_epoch = log_epoch;
  }
  const std::string baseline = s.str("baseline", "aalr");
  const std::string out = s.str("out");
  std::vector<EpochRecord> trace;
  if (baseline == "aalr") {
    TrainResult r = train_ratio_estimator(data, config);
    save_model(r.estimator, out);
    trace = std::move(r.trace);
  } else if (baseline == "lrt") {
    if (!s.has("theta_ref")) throw ConfigError("--baseline lrt requires --theta-ref");
    const Simulator sim = make_simulator(data.simulator);
    ReferenceTrainResult r = train_reference_ratio_estimator(data, sim, s.vec("theta_ref"), config);
    save_model(r.estimator, out);
    trace = std::move(r.trace);
  } else {
    throw ConfigError("--baseline must be aalr or lrt");
  }
  write_trace(trace, out + ".trace.csv");
  std::cout << "final validation loss " << format_double(trace.back().validation_loss) << "\n";
  return kExitOk;
}

int cmd_sample(const Settings& s) {
  const auto model = open_model(s.str("model"));
  const auto prior = resolve_prior(s, simulator_name(s, *model));
  const Mat xs = observations(s);
  check_dims(*model, *prior, xs.cols());

  const std::string sampler = s.str("sampler", "mh");
  const Eigen::Index steps = s.integer("steps", 10000);
  const int n_chains = static_cast<int>(s.integer("chains", 1));
  if (n_chains < 1) throw ConfigError("--chains must be >= 1");
  const std::string name = simulator_name(s, *model);

  ProposalConfig proposal;
  if (s.has("step_size")) {
    const Vec v = s.vec("step_size");
    proposal.step_sizes = v.size() == 1 ? Vec::Constant(prior->dim(), v(0)) : v;
  } else {
    proposal = name.empty() ? ProposalConfig::isotropic(prior->dim(), 0.5)
                            : ProposalConfig::for_simulator(make_simulator(name));
  }
  HmcConfig hmc;
  hmc.leapfrog_steps = static_cast<int>(s.integer("leapfrog", hmc.leapfrog_steps));
  hmc.step_size = s.num("eta", hmc.step_size);

  const RngStream root(s.seed());
  Mat starts;
  if (s.has("theta0")) {
    starts = s.vec("theta0").transpose().replicate(n_chains, 1);
  } else {
    RngStream r = root.derive(0);
    starts = prior->sample(r, n_chains);
  }

  // One row: the plain ratio; several rows: the i.i.d. population ratio.
  const bool population = xs.rows() > 1;
  const Vec x_o = xs.row(0).transpose();
  LogRatioFn value = [&](const Vec& theta) {
    return population ? population_log_ratio(*model, xs, theta) : model->log_ratio(x_o, theta);
  };
  GradLogRatioFn grad = [&](const Vec& theta) {
    Vec g = Vec::Zero(theta.size());
    for (Eigen::Index i = 0; i < xs.rows(); ++i) g += model->grad_log_ratio_theta(xs.row(i).transpose(), theta);
    return g;
  };
  const std::string context = "x=(" + format_vector(x_o) + ")" + (population ? " and more" : "");
  auto one = [&](const Vec& theta0, RngStream& r) {
    if (sampler == "mh") return lf_metropolis_hastings(value, *prior, proposal, theta0, steps, r, context);
    if (sampler == "hmc") return lf_hmc(value, grad, *prior, theta0, steps, hmc, r, context);
    throw ConfigError("--sampler must be mh or hmc");
  };
  RngStream chain_rng = root.derive(1);
  const std::vector<Chain> chains = run_chains(one, starts, chain_rng, s.workers());
  const std::string out = s.str("out");
  for (std::size_t i = 0; i < chains.size(); ++i) {
    Chain c = chains[i];
    c.seed = s.seed();
    save_chain(c, chains.size() == 1 ? out : out + "." + std::to_string(i));
    std::cout << "chain " << i << " acceptance " << format_double(c.acceptance_rate()) << "\n";
  }
  return kExitOk;
}

int cmd_diagnose(const Settings& s) {
  const auto model = open_model(s.str("model"));
  const std::string name = simulator_name(s, *model);
  if (name.empty()) throw ConfigError("pass --simulator");
  const Simulator sim = make_simulator(name);
  const auto prior = resolve_prior(s, name);
  check_dims(*model, *prior, sim.x_dim);
  const Vec theta_test = s.has("theta_test") ? s.vec("theta_test") : sim.theta_star;
  RocDiagnosticOptions options;
  options.workers = s.workers();
  options.discriminator.epochs = static_cast<int>(s.integer("epochs", options.discriminator.epochs));
  RngStream rng(s.seed());
  const DiagnosticReport report =
      roc_diagnostic(*model, *prior, sim, theta_test, s.integer("n", 5000), rng, options);
  if (s.has("out")) report.save(s.str("out"));
  const double fail_above = s.num("fail_above", 0.7);
  if (report.failed) {
    std::cout << "auc undefined: " << report.message << "\n";
    throw DiagnosticFailure("diagnostic failed: " + report.message);
  }
  std::cout << "auc " << format_double(report.auc) << "\n";
  if (report.auc > fail_above) {
    throw DiagnosticFailure("auc " + format_double(report.auc) + " exceeds " + format_double(fail_above));
  }
  return kExitOk;
}

int cmd_scan(const Settings& s) {
  const auto model = open_model(s.str("model"));
  const auto prior = resolve_prior(s, simulator_name(s, *model));
  const Mat xs = observations(s);
  check_dims(*model, *prior, xs.cols());
  auto [low, high] = prior->bounds();
  if (s.has("low")) low = s.vec("low");
  if (s.has("high")) high = s.vec("high");
  const Mat grid = regular_grid(low, high, static_cast<int>(s.integer("points", 200)));
  const DensityScan scan = posterior_scan(*model, *prior, xs.row(0).transpose(), grid);
  scan.save(s.str("out"));
  std::cout << "log normalizer " << format_double(scan.log_normalizer) << "\n";
  return kExitOk;
}

int cmd_benchmark(const Settings& s) {
  const std::string name = s.str("name");
  BenchmarkConfig config = BenchmarkConfig::defaults(name);
  config.seed = s.seed();
  config.train = train_config(s, name);
  config.simulations = s.integer("simulations", config.simulations);
  config.chains = static_cast<int>(s.integer("chains", config.chains));
  config.steps_per_chain = s.integer("steps", config.steps_per_chain);
  config.max_samples = s.integer("max_samples", config.max_samples);
  config.abc_budget = s.integer("abc_budget", config.abc_budget);
  config.abc_quantile = s.num("abc_quantile", config.abc_quantile);
  config.lrt_baseline = s.boolean("lrt", false);
  if (s.has("theta_ref")) config.theta_ref = s.vec("theta_ref");
  if (s.has("x")) config.x_o = s.vec("x");
  config.workers = s.workers();
  if (s.boolean("verbose", false)) {
    config.log = [](const std::string& m) { std::cerr << m << "\n"; };
    config.train.on_epoch = log_epoch;
  }

  const BenchmarkResult r = run_benchmark(config);
  const std::filesystem::path dir = s.str("out_dir");
  std::filesystem::create_directories(dir);
  r.metrics.save((dir / "metrics.txt").string());
  save_model(*r.estimator, (dir / "model").string());
  write_trace(r.trace, (dir / "model.trace.csv").string());
  std::vector<std::string> header;
  for (Eigen::Index j = 0; j < r.aalr_samples.cols(); ++j) header.push_back("theta_" + std::to_string(j));
  write_csv_matrix((dir / "reference.csv").string(), header, r.reference_samples);
  write_csv_matrix((dir / "aalr.csv").string(), header, r.aalr_samples);
  if (r.baseline) write_csv_matrix((dir / "lrt.csv").string(), header, r.lrt_samples);
  std::cout << r.metrics.to_string();
  return kExitOk;
}

int cmd_sequential(const Settings& s) {
  const std::string name = s.str("simulator");
  const Simulator sim = make_simulator(name);
  const Vec x_o = s.has("x") ? s.vec("x") : Vec(observations(s).row(0).transpose());
  RoundConfig config;
  config.train = train_config(s, name);
  config.simulations_per_round = s.integer("simulations", config.simulations_per_round);
  config.max_rounds = static_cast<int>(s.integer("max_rounds", config.max_rounds));
  config.auc_threshold = s.num("auc_threshold", config.auc_threshold);
  config.mcmc_steps = s.integer("mcmc_steps", config.mcmc_steps);
  config.diagnostic_samples = s.integer("diagnostic_samples", config.diagnostic_samples);
  config.diagnostic.workers = s.workers();
  RngStream rng(s.seed());
  const SequentialResult r = sequential_ratio_estimation(sim, resolve_prior(s, name), x_o, config, rng);
  const std::filesystem::path dir = s.str("out_dir");
  std::filesystem::create_directories(dir);
  write_text_file((dir / "trace.txt").string(), r.trace_text());
  if (const auto* est = dynamic_cast<const RatioEstimator*>(r.estimator.get())) save_model(*est, (dir / "model").string());
  std::vector<std::string> header;
  for (Eigen::Index j = 0; j < r.posterior_samples.cols(); ++j) header.push_back("theta_" + std::to_string(j));
  write_csv_matrix((dir / "posterior.csv").string(), header, r.posterior_samples);
  std::cout << r.trace_text();
  return kExitOk;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Likelihood-free inference with amortized likelihood-to-evidence ratio estimators"};
  app.require_subcommand(1);

  std::vector<std::pair<CLI::App*, std::unique_ptr<Settings>>> commands;
  auto add = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    commands.emplace_back(sub, std::make_unique<Settings>(sub));
    Settings& s = *commands.back().second;
    s.flag("seed", "random seed (default 0)");
    s.flag("workers", "worker threads (default: $LFMC_WORKERS or 1)");
    return &s;
  };

  Settings* simulate = add("simulate", "draw (theta, x) pairs from the prior and simulator");
  simulate->flag("simulator", "tractable | mg1 | lotka_volterra | gaussian1d | two_gaussians", true);
  simulate->flag("prior", "prior description overriding the simulator's default");
  simulate->flag("n", "number of pairs", true);
  simulate->flag("out", "output prefix", true);

  Settings* train = add("train", "train a ratio estimator on a dataset");
  train->flag("data", "dataset prefix", true);
  train->flag("out", "model prefix", true);
  train->flag("baseline", "aalr (default) | lrt");
  train->flag("theta_ref", "reference hypothesis for --baseline lrt");
  train->flag("verbose", "print per-epoch losses (true/false)");
  add_train_flags(*train);

  Settings* sample = add("sample", "sample a posterior with a ratio estimator");
  sample->flag("model", "model prefix or builtin:NAME", true);
  sample->flag("observations", "CSV of observations (several rows: i.i.d. population)");
  sample->flag("x", "single observation vector");
  sample->flag("simulator", "simulator whose prior to use");
  sample->flag("prior", "prior description");
  sample->flag("sampler", "mh (default) | hmc");
  sample->flag("steps", "transitions per chain");
  sample->flag("chains", "independent chains");
  sample->flag("theta0", "initial state");
  sample->flag("step_size", "random-walk scale(s)");
  sample->flag("leapfrog", "HMC leapfrog steps");
  sample->flag("eta", "HMC step size");
  sample->flag("out", "chain output path", true);

  Settings* diagnose = add("diagnose", "ROC diagnostic of a ratio estimator at one parameter");
  diagnose->flag("model", "model prefix or builtin:NAME", true);
  diagnose->flag("simulator", "simulator");
  diagnose->flag("prior", "prior description");
  diagnose->flag("theta_test", "parameter to probe (default: the simulator's theta_star)");
  diagnose->flag("n", "samples per class");
  diagnose->flag("epochs", "discriminator epochs");
  diagnose->flag("fail_above", "exit with status 4 when the AUC exceeds this (default 0.7)");
  diagnose->flag("out", "report path");

  Settings* scan = add("scan", "evaluate the posterior density on a regular grid");
  scan->flag("model", "model prefix or builtin:NAME", true);
  scan->flag("observations", "CSV of observations (first row is used)");
  scan->flag("x", "observation vector");
  scan->flag("simulator", "simulator whose prior to use");
  scan->flag("prior", "prior description");
  scan->flag("points", "grid points per axis");
  scan->flag("low", "grid lower corner");
  scan->flag("high", "grid upper corner");
  scan->flag("out", "CSV output path", true);

  Settings* benchmark = add("benchmark", "end-to-end benchmark run");
  benchmark->flag("name", "tractable | mg1 | lotka_volterra | gaussian1d", true);
  benchmark->flag("out_dir", "output directory", true);
  benchmark->flag("simulations", "training pairs");
  benchmark->flag("chains", "posterior chains per method");
  benchmark->flag("steps", "transitions per chain");
  benchmark->flag("max_samples", "pooled samples kept per method");
  benchmark->flag("abc_budget", "rejection ABC simulations (no likelihood)");
  benchmark->flag("abc_quantile", "rejection ABC acceptance quantile");
  benchmark->flag("lrt", "also run the reference-hypothesis baseline (true/false)");
  benchmark->flag("theta_ref", "baseline reference hypothesis");
  benchmark->flag("x", "observation (default: a draw at theta_star)");
  benchmark->flag("verbose", "print stage names (true/false)");
  add_train_flags(*benchmark);

  Settings* sequential = add("sequential", "sequential ratio estimation for one observation");
  sequential->flag("simulator", "simulator", true);
  sequential->flag("prior", "initial prior description");
  sequential->flag("x", "observation vector");
  sequential->flag("observations", "CSV of observations (first row is used)");
  sequential->flag("simulations", "pairs per round");
  sequential->flag("max_rounds", "maximum rounds");
  sequential->flag("auc_threshold", "stop once the diagnostic AUC is at most this");
  sequential->flag("mcmc_steps", "posterior chain length per round");
  sequential->flag("diagnostic_samples", "ROC diagnostic samples per class");
  sequential->flag("out_dir", "output directory", true);
  add_train_flags(*sequential);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    for (auto& [sub, settings] : commands) {
      if (!sub->parsed()) continue;
      settings->resolve();
      const std::string name = sub->get_name();
      if (name == "simulate") return cmd_simulate(*settings);
      if (name == "train") return cmd_train(*settings);
      if (name == "sample") return cmd_sample(*settings);
      if (name == "diagnose") return cmd_diagnose(*settings);
      if (name == "scan") return cmd_scan(*settings);
      if (name == "benchmark") return cmd_benchmark(*settings);
      if (name == "sequential") return cmd_sequential(*settings);
    }
    return kExitUsage;
  } catch (const DiagnosticFailure& e) {
    std::cerr << "lfmc: " << e.what() << "\n";
    return kExitDiagnostic;
  } catch (const ConfigError& e) {
    std::cerr << "lfmc: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DimensionError& e) {
    std::cerr << "lfmc: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "lfmc: " << e.what() << "\n";
    return kExitIo;
  } catch (const NumericalError& e) {
    std::cerr << "lfmc: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "lfmc: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "lfmc: " << e.what() << "\n";
    return kExitOther;
  }
}

}  // namespace lfmc
