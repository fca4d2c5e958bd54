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

#include "lfmc/workflows.hpp"

#include "lfmc/errors.hpp"
#include "lfmc/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>

namespace lfmc {

double exact_sum(std::span<const double> values) {
  // Shewchuk's non-overlapping partials with a correctly rounded final step.
  std::vector<double> partials;
  for (double x : values) {
    if (!std::isfinite(x)) {
      double naive = 0.0;
      for (double v : values) naive += v;
      return naive;  // inf/nan propagate as in plain summation
    }
    std::size_t i = 0;
    for (double y : partials) {
      if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials[i++] = lo;
      x = hi;
    }
    partials.resize(i);
    partials.push_back(x);
  }
  if (partials.empty()) return 0.0;
  std::size_t n = partials.size();
  double hi = partials[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials[--n];
    hi = x + y;
    const double yr = hi - x;
    lo = y - yr;
    if (lo != 0.0) break;
  }
  // Round half-even fix-up when the remaining partials push past a tie.
  if (n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    if (y == x - hi) hi = x;
  }
  return hi;
}

double population_log_ratio(const RatioModel& model, const Mat& xs, const Vec& theta) {
  if (xs.rows() < 1) throw ConfigError("population_log_ratio: empty observation set");
  if (xs.cols() != model.x_dim()) throw DimensionError("population_log_ratio: observation dimension mismatch");
  std::vector<double> terms(static_cast<std::size_t>(xs.rows()));
  for (Eigen::Index i = 0; i < xs.rows(); ++i) terms[static_cast<std::size_t>(i)] = model.log_ratio(xs.row(i).transpose(), theta);
  return exact_sum(terms);
}

Vec model_posterior(const RatioModel& model, const CategoricalPrior& prior, const Vec& x_o) {
  const int m = prior.num_events();
  if (model.theta_dim() != m) throw DimensionError("model_posterior: estimator theta must be a one-hot vector over the models");
  Vec logp(m);
  for (int k = 0; k < m; ++k) {
    const Vec one_hot = Vec::Unit(m, k);
    const double lp = std::log(prior.probabilities()(k));
    logp(k) = lp == -std::numeric_limits<double>::infinity() ? lp : lp + model.log_ratio(x_o, one_hot);
  }
  const double z = log_sum_exp(logp);
  if (!std::isfinite(z)) throw NumericalError("model_posterior: posterior is not normalizable");
  Vec p = (logp.array() - z).unaryExpr([](double v) { return std::exp(v); }).matrix();  // exact zeros for -inf
  return p / p.sum();
}

JointDataset one_hot_encode(const JointDataset& dataset, int num_models) {
  if (dataset.theta_dim() != 1) throw DimensionError("one_hot_encode: expected a single index column");
  if (num_models < 2) throw ConfigError("one_hot_encode: need at least two models");
  JointDataset out = dataset;
  out.thetas = Mat::Zero(dataset.size(), num_models);
  for (Eigen::Index i = 0; i < dataset.size(); ++i) {
    const double v = dataset.thetas(i, 0);
    const auto k = static_cast<Eigen::Index>(v);
    if (static_cast<double>(k) != v || k < 0 || k >= num_models) {
      throw ConfigError("one_hot_encode: theta is not a model index in range");
    }
    out.thetas(i, k) = 1.0;
  }
  out.theta_stats = Standardizer::identity(num_models);
  return out;
}

KernelDensityPrior::KernelDensityPrior(Mat centers, const Vec& low, const Vec& high) : centers_(std::move(centers)) {
  const Eigen::Index n = centers_.rows();
  const Eigen::Index d = centers_.cols();
  if (n < 2) throw ConfigError("kernel density prior: need at least two centers");
  if (low.size() != d || high.size() != d) throw DimensionError("kernel density prior: bounds dimension mismatch");
  if (!all_finite(centers_)) throw NumericalError("kernel density prior: non-finite center");
  const Standardizer stats = Standardizer::fit(centers_);
  const double scott = std::pow(static_cast<double>(n), -1.0 / (static_cast<double>(d) + 4.0));
  bandwidth_ = stats.std * scott;
  low_ = (centers_.colwise().minCoeff().transpose() - 4.0 * bandwidth_).cwiseMax(low);
  high_ = (centers_.colwise().maxCoeff().transpose() + 4.0 * bandwidth_).cwiseMin(high);
  for (Eigen::Index j = 0; j < d; ++j) {
    if (!(low_(j) < high_(j))) throw ConfigError("kernel density prior: empty support box");
  }
  Vec per_kernel(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double h = bandwidth_(j);
      const double mass = normal_cdf((high_(j) - centers_(i, j)) / h) - normal_cdf((low_(j) - centers_(i, j)) / h);
      acc += std::log(std::max(mass, 1e-300));
    }
    per_kernel(i) = acc;
  }
  log_mass_inside_ = log_sum_exp(per_kernel) - std::log(static_cast<double>(n));
}

Mat KernelDensityPrior::sample(RngStream& rng, Eigen::Index n) const {
  Mat out(n, dim());
  Vec theta(dim());
  for (Eigen::Index r = 0; r < n; ++r) {
    do {
      const Eigen::Index i = static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(centers_.rows())));
      for (Eigen::Index j = 0; j < dim(); ++j) theta(j) = centers_(i, j) + bandwidth_(j) * rng.normal();
    } while (!in_support(theta));
    out.row(r) = theta.transpose();
  }
  return out;
}

bool KernelDensityPrior::in_support(const Vec& theta) const {
  if (theta.size() != dim()) return false;
  for (Eigen::Index j = 0; j < dim(); ++j) {
    if (!(theta(j) >= low_(j) && theta(j) <= high_(j))) return false;
  }
  return true;
}

double KernelDensityPrior::log_density(const Vec& theta) const {
  if (!in_support(theta)) return -std::numeric_limits<double>::infinity();
  const Eigen::Index n = centers_.rows();
  double log_norm = 0.0;
  for (Eigen::Index j = 0; j < dim(); ++j) log_norm -= std::log(bandwidth_(j)) + 0.5 * std::log(2.0 * std::numbers::pi);
  Vec terms(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    terms(i) = -0.5 * ((theta.transpose() - centers_.row(i)).array() / bandwidth_.transpose().array()).square().sum();
  }
  return log_sum_exp(terms) + log_norm - std::log(static_cast<double>(n)) - log_mass_inside_;
}

std::string KernelDensityPrior::describe() const {
  return "kernel_density(n=" + std::to_string(centers_.rows()) + ",bandwidth=" + format_vector(bandwidth_, ':') +
         ",low=" + format_vector(low_, ':') + ",high=" + format_vector(high_, ':') + ")";
}

namespace {

std::string model_digest(const RatioModel& model) {
  const auto* est = dynamic_cast<const RatioEstimator*>(&model);
  if (!est) return model.describe();
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](const double* data, Eigen::Index count) {
    for (Eigen::Index i = 0; i < count; ++i) {
      std::uint64_t bits = 0;
      std::memcpy(&bits, &data[i], sizeof(bits));
      h = (h ^ bits) * 1099511628211ULL;
    }
  };
  for (std::size_t l = 0; l < est->net().weights.size(); ++l) {
    mix(est->net().weights[l].data(), est->net().weights[l].size());
    mix(est->net().biases[l].data(), est->net().biases[l].size());
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string("mlp:") + buf;
}

}  // namespace

std::string SequentialResult::trace_text() const {
  std::string s;
  for (const RoundRecord& r : trace) {
    s += "round=" + std::to_string(r.round) + " n=" + std::to_string(r.dataset_size) +
         " auc=" + format_double(r.auc) + " theta_test=" + format_vector(r.theta_test, ':') +
         " low=" + format_vector(r.prior_low, ':') + " high=" + format_vector(r.prior_high, ':') +
         " estimator=" + r.estimator_digest + " prior=" + r.prior + "\n";
  }
  s += std::string("converged=") + (converged ? "true" : "false") + "\n";
  return s;
}

SequentialResult sequential_ratio_estimation(const Simulator& simulator, std::shared_ptr<const Prior> initial_prior,
                                             const Vec& x_o, const RoundConfig& config, RngStream& rng) {
  if (!initial_prior) throw ConfigError("sequential: no initial prior");
  if (config.max_rounds < 1) throw ConfigError("sequential: max_rounds must be >= 1");
  if (config.simulations_per_round < 2) throw ConfigError("sequential: simulations_per_round must be >= 2");
  if (x_o.size() != simulator.x_dim) throw DimensionError("sequential: observation has the wrong dimension");
  const auto [initial_low, initial_high] = initial_prior->bounds();
  const ProposalConfig proposal =
      config.proposal.step_sizes.size() > 0 ? config.proposal : ProposalConfig::for_simulator(simulator);

  SequentialResult result;
  std::shared_ptr<const Prior> prior = initial_prior;
  for (int round = 0; round < config.max_rounds; ++round) {
    RngStream round_rng = rng.derive(static_cast<std::uint64_t>(round));
    RoundRecord rec;
    rec.round = round;
    rec.prior = prior->describe();
    std::tie(rec.prior_low, rec.prior_high) = prior->bounds();

    DatasetOptions dataset_options;
    dataset_options.workers = config.diagnostic.workers;
    const JointDataset data =
        generate_joint_dataset(*prior, simulator, config.simulations_per_round, round_rng.derive(0)(), dataset_options);
    rec.dataset_size = data.size();

    std::shared_ptr<const RatioModel> model;
    if (config.estimator_override) {
      model = config.estimator_override(round, data);
    } else {
      TrainConfig train = config.train;
      train.seed = round_rng.derive(1)();
      model = std::make_shared<RatioEstimator>(train_ratio_estimator(data, train).estimator);
    }
    if (!model) throw ConfigError("sequential: estimator override returned nothing");
    rec.estimator_digest = model_digest(*model);

    RngStream mcmc_rng = round_rng.derive(2);
    const Vec theta0 = prior->sample(mcmc_rng, 1).row(0).transpose();
    const Chain chain = lf_metropolis_hastings(*model, *prior, proposal, x_o, theta0, config.mcmc_steps, mcmc_rng);
    const Mat kept = chain.samples(default_burn_in(chain));
    const Eigen::Index stride = std::max<Eigen::Index>(1, kept.rows() / std::max<Eigen::Index>(config.kde_points, 2));
    Mat thinned(kept.rows() / stride, kept.cols());
    for (Eigen::Index i = 0; i < thinned.rows(); ++i) thinned.row(i) = kept.row(i * stride);
    rec.theta_test = thinned.colwise().mean().transpose();

    RngStream diag_rng = round_rng.derive(3);
    const DiagnosticReport report =
        roc_diagnostic(*model, *prior, simulator, rec.theta_test, config.diagnostic_samples, diag_rng, config.diagnostic);
    rec.auc = report.failed ? std::numeric_limits<double>::quiet_NaN() : report.auc;
    result.trace.push_back(rec);
    result.estimator = model;
    result.prior = prior;
    result.posterior_samples = thinned;
    if (!report.failed && report.auc <= config.auc_threshold) {
      result.converged = true;
      break;
    }
    if (round + 1 < config.max_rounds) prior = std::make_shared<KernelDensityPrior>(thinned, initial_low, initial_high);
  }
  return result;
}

}  // namespace lfmc
