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

#include "lfmc/benchmark.hpp"

#include "lfmc/dataset.hpp"
#include "lfmc/diagnostics.hpp"
#include "lfmc/errors.hpp"
#include "lfmc/simulators.hpp"

#include <algorithm>
#include <cmath>

namespace lfmc {

BenchmarkConfig BenchmarkConfig::defaults(const std::string& simulator) {
  BenchmarkConfig c;
  c.simulator = simulator;
  c.train = TrainConfig::for_simulator(simulator);
  if (simulator == "tractable") {
    c.sign_symmetric_dims = {2, 3};
    c.theta_ref = Vec(5);
    c.theta_ref << 0.0, 0.0, 1.0, 1.0, 0.0;  // unit, uncorrelated 2-D Gaussian
  } else if (simulator == "gaussian1d") {
    c.chains = 8;
    c.theta_ref = Vec::Constant(1, 0.0);
  } else if (simulator == "mg1") {
    c.theta_ref = Vec(3);
    c.theta_ref << 2.0, 4.0, 0.15;
  } else if (simulator == "lotka_volterra") {
    c.theta_ref = Vec::Constant(4, -2.0);
    c.abc_budget = 20000;
  }
  return c;
}

Mat stratified_starts(const Prior& prior, int count, const std::vector<int>& sign_dims, RngStream& rng) {
  if (count < 1) throw ConfigError("stratified_starts: need at least one start");
  const auto [low, high] = prior.bounds();
  std::vector<int> dims;
  for (int d : sign_dims) {
    if (d < 0 || d >= prior.dim()) throw DimensionError("stratified_starts: sign dimension out of range");
    if (low(d) < 0.0 && high(d) > 0.0) dims.push_back(d);
  }
  Mat starts = prior.sample(rng, count);
  for (int i = 0; i < count; ++i) {
    for (std::size_t k = 0; k < dims.size(); ++k) {
      const double want = ((i >> k) & 1) ? 1.0 : -1.0;
      const double v = starts(i, dims[k]);
      // Mirror into the requested half; redraw inside it when the mirror leaves the box.
      double flipped = (v * want >= 0.0) ? v : -v;
      if (flipped < low(dims[k]) || flipped > high(dims[k])) {
        flipped = want > 0.0 ? rng.uniform(0.0, high(dims[k])) : rng.uniform(low(dims[k]), 0.0);
      }
      starts(i, dims[k]) = flipped;
    }
  }
  return starts;
}

Mat stride_rows(const Mat& m, Eigen::Index count) {
  if (count < 1) throw ConfigError("stride_rows: count must be positive");
  if (m.rows() <= count) return m;
  Mat out(count, m.cols());
  for (Eigen::Index i = 0; i < count; ++i) {
    out.row(i) = m.row(static_cast<Eigen::Index>((static_cast<double>(i) * static_cast<double>(m.rows())) /
                                                 static_cast<double>(count)));
  }
  return out;
}

double positive_fraction(const Mat& samples, int dim) {
  if (samples.rows() == 0) return 0.0;
  return static_cast<double>((samples.col(dim).array() > 0.0).count()) / static_cast<double>(samples.rows());
}

namespace {

template <class F>
auto stage(const std::string& name, const std::function<void(const std::string&)>& log, F&& body) {
  if (log) log("stage " + name);
  try {
    return body();
  } catch (const DimensionError& e) {
    throw DimensionError(name + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(name + ": " + e.what());
  } catch (const IoError& e) {
    throw IoError(name + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(name + ": " + e.what());
  } catch (const Error& e) {
    throw Error(name + ": " + e.what());
  }
}

double mean_acceptance(const std::vector<Chain>& chains) {
  double total = 0.0;
  for (const Chain& c : chains) total += c.acceptance_rate();
  return total / static_cast<double>(chains.size());
}

Mat sample_with(const RatioModel& model, const Prior& prior, const ProposalConfig& proposal, const Vec& x_o,
                const Mat& starts, const BenchmarkConfig& config, RngStream& rng, double& acceptance) {
  auto one = [&](const Vec& theta0, RngStream& r) {
    return lf_metropolis_hastings(model, prior, proposal, x_o, theta0, config.steps_per_chain, r);
  };
  const std::vector<Chain> chains = run_chains(one, starts, rng, config.workers);
  acceptance = mean_acceptance(chains);
  return stride_rows(pool_chains(chains, config.steps_per_chain / 5), config.max_samples);
}

}  // namespace

BenchmarkResult run_benchmark(const BenchmarkConfig& config) {
  const Simulator sim = make_simulator(config.simulator);
  const Prior& prior = *sim.prior;
  const RngStream root(config.seed);
  BenchmarkResult result;
  KeyValueDoc& m = result.metrics;
  m.set("format", std::string("lfmc-benchmark-1"));
  m.set("benchmark", config.simulator);
  m.set("seed", std::to_string(config.seed));
  m.set("simulations", static_cast<std::int64_t>(config.simulations));
  m.set("train_config", config.train.digest());

  result.x_o = config.x_o;
  if (result.x_o.size() == 0) {
    RngStream r = root.derive(1);
    result.x_o = sim.simulate(sim.theta_star, r).x;
  }
  if (result.x_o.size() != sim.x_dim) throw DimensionError("benchmark: observation has the wrong dimension");
  m.set("theta_star", sim.theta_star);
  m.set("x_o", result.x_o);

  DatasetOptions dataset_options;
  dataset_options.workers = config.workers;
  const JointDataset data = stage("simulate", config.log, [&] {
    return generate_joint_dataset(prior, sim, config.simulations, root.derive(2)(), dataset_options);
  });
  m.set("clamped_rows", data.clamped_rows);

  TrainConfig train = config.train;
  train.seed = root.derive(3)();
  TrainResult trained = stage("train", config.log, [&] { return train_ratio_estimator(data, train); });
  result.trace = trained.trace;
  result.estimator = std::make_shared<RatioEstimator>(std::move(trained.estimator));
  m.set("final_train_loss", result.trace.back().train_loss);
  m.set("final_validation_loss", result.trace.back().validation_loss);

  RngStream start_rng = root.derive(4);
  const Mat starts = stratified_starts(prior, config.chains, config.sign_symmetric_dims, start_rng);
  const ProposalConfig proposal = ProposalConfig::for_simulator(sim);

  stage("reference", config.log, [&] {
    RngStream r = root.derive(5);
    if (sim.log_likelihood) {
      auto one = [&](const Vec& theta0, RngStream& rr) {
        return analytic_metropolis_hastings(sim.log_likelihood, prior, proposal, result.x_o, theta0,
                                            config.steps_per_chain, rr);
      };
      const std::vector<Chain> chains = run_chains(one, starts, r, config.workers);
      m.set("reference_method", std::string("analytic_mh"));
      m.set("reference_acceptance", mean_acceptance(chains));
      result.reference_samples = stride_rows(pool_chains(chains, config.steps_per_chain / 5), config.max_samples);
    } else {
      const AbcResult abc = rejection_abc(sim, prior, result.x_o, {}, config.abc_quantile, config.abc_budget, r,
                                          config.workers);
      m.set("reference_method", std::string("rejection_abc"));
      m.set("reference_abc_threshold", abc.threshold);
      result.reference_samples = stride_rows(abc.accepted, config.max_samples);
    }
    return 0;
  });

  stage("aalr_chain", config.log, [&] {
    RngStream r = root.derive(6);
    double acceptance = 0.0;
    result.aalr_samples = sample_with(*result.estimator, prior, proposal, result.x_o, starts, config, r, acceptance);
    m.set("aalr_acceptance", acceptance);
    return 0;
  });

  stage("metrics", config.log, [&] {
    m.set("mmd", mmd(result.reference_samples, result.aalr_samples));
    if (result.reference_samples.rows() >= 200 && result.aalr_samples.rows() >= 200) {
      RngStream r = root.derive(7);
      m.set("auc", two_sample_auc(result.reference_samples, result.aalr_samples, r));
    }
    const double probe = log_posterior_probe(*result.estimator, prior, result.x_o, sim.theta_star);
    m.set("log_posterior_probe", probe);
    RngStream r = root.derive(8);
    const Mat draws = prior.sample(r, config.probe_draws);
    std::int64_t below = 0;
    for (Eigen::Index i = 0; i < draws.rows(); ++i) {
      below += log_posterior_probe(*result.estimator, prior, result.x_o, draws.row(i).transpose()) < probe ? 1 : 0;
    }
    m.set("probe_draws", static_cast<std::int64_t>(config.probe_draws));
    m.set("probe_draws_below_theta_star", below);
    for (int d : config.sign_symmetric_dims) {
      m.set("reference_positive_fraction_" + std::to_string(d), positive_fraction(result.reference_samples, d));
      m.set("aalr_positive_fraction_" + std::to_string(d), positive_fraction(result.aalr_samples, d));
    }
    if (sim.log_likelihood && sim.theta_dim == 1) {
      const auto [low, high] = prior.bounds();
      const Mat grid = regular_grid(low, high, 1000);
      const FunctionRatio exact(sim.x_dim, 1, [&](const Vec& x, const Vec& theta) { return sim.log_likelihood(theta, x); });
      const DensityScan truth = posterior_scan(exact, prior, result.x_o, grid);
      const DensityScan approx = posterior_scan(*result.estimator, prior, result.x_o, grid);
      m.set("scan_tv", total_variation(truth.masses, approx.masses));
    }
    return 0;
  });

  if (config.lrt_baseline) {
    stage("lrt_baseline", config.log, [&] {
      const Vec theta_ref = config.theta_ref.size() ? config.theta_ref : (prior.bounds().first + prior.bounds().second) / 2;
      TrainConfig lrt_train = config.train;
      lrt_train.seed = root.derive(9)();
      ReferenceTrainResult lrt = train_reference_ratio_estimator(data, sim, theta_ref, lrt_train);
      result.baseline = std::make_shared<ReferenceRatioEstimator>(std::move(lrt.estimator));
      RngStream r = root.derive(10);
      double acceptance = 0.0;
      result.lrt_samples = sample_with(*result.baseline, prior, proposal, result.x_o, starts, config, r, acceptance);
      m.set("lrt_theta_ref", theta_ref);
      m.set("lrt_acceptance", acceptance);
      m.set("lrt_mmd", mmd(result.reference_samples, result.lrt_samples));
      RngStream ra = root.derive(11);
      if (result.reference_samples.rows() >= 200) {
        m.set("lrt_auc", two_sample_auc(result.reference_samples, result.lrt_samples, ra));
      }
      return 0;
    });
  }
  return result;
}

}  // namespace lfmc
