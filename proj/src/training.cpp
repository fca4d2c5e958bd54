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

#include "lfmc/training.hpp"

#include "lfmc/adam.hpp"
#include "lfmc/errors.hpp"
#include "lfmc/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace lfmc {

void TrainConfig::validate() const {
  if (batch_size < 2 || batch_size % 2 != 0) throw ConfigError("train: batch_size must be even and >= 2");
  if (epochs < 1) throw ConfigError("train: epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("train: learning_rate must be positive");
  if (weight_decay < 0.0) throw ConfigError("train: weight_decay must be >= 0");
  if (!(validation_fraction >= 0.0 && validation_fraction <= 0.5)) {
    throw ConfigError("train: validation_fraction must lie in [0, 0.5]");
  }
  for (int h : hidden) {
    if (h < 1) throw ConfigError("train: hidden widths must be positive");
  }
  if (lr_scheduling && (plateau_patience < 1 || !(plateau_factor > 0.0 && plateau_factor < 1.0))) {
    throw ConfigError("train: plateau scheduling needs patience >= 1 and factor in (0, 1)");
  }
}

std::string TrainConfig::digest() const {
  std::string s = "hidden=";
  for (int h : hidden) s += std::to_string(h) + ",";
  s += ";act=" + std::string(to_string(activation)) + ";batch=" + std::to_string(batch_size) +
       ";epochs=" + std::to_string(epochs) + ";lr=" + format_double(learning_rate) +
       ";wd=" + format_double(weight_decay) + ";amsgrad=" + std::to_string(amsgrad) +
       ";val=" + format_double(validation_fraction) + ";seed=" + std::to_string(seed) +
       ";sched=" + std::to_string(lr_scheduling) + ";std_theta=" + std::to_string(standardize_theta);
  // FNV-1a
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

TrainConfig TrainConfig::for_simulator(const std::string& simulator) {
  TrainConfig c;
  if (simulator == "tractable") {
    c.activation = Activation::selu;
    c.batch_size = 256;
    c.epochs = 250;
    c.learning_rate = 0.001;
  } else if (simulator == "lotka_volterra") {
    c.activation = Activation::relu;
    c.batch_size = 1024;
    c.epochs = 1000;
    c.learning_rate = 0.00005;
    c.lr_scheduling = true;
  } else if (simulator == "mg1") {
    c.activation = Activation::relu;
    c.batch_size = 256;
    c.epochs = 1000;
    c.learning_rate = 0.0001;
    c.lr_scheduling = true;
  } else {
    c.hidden = {64, 64, 64};
    c.activation = Activation::selu;
    c.batch_size = 256;
    c.epochs = 100;
    c.learning_rate = 0.001;
  }
  return c;
}

namespace {

// Column-major standardized copies of the dataset blocks (features x rows).
struct StandardizedData {
  Mat xs;
  Mat thetas;
};

StandardizedData standardize(const Mat& thetas, const Mat& xs, const Standardizer& theta_std,
                             const Standardizer& x_std) {
  StandardizedData d;
  d.xs = ((xs.rowwise() - x_std.mean.transpose()).array().rowwise() / x_std.std.transpose().array()).transpose();
  d.thetas =
      ((thetas.rowwise() - theta_std.mean.transpose()).array().rowwise() / theta_std.std.transpose().array()).transpose();
  return d;
}

// Training loop shared by the ratio and reference estimators. `build` fills the
// network inputs and labels for iteration batch indices; `validation` returns the
// current validation loss (NaN when there is none).
struct LoopSpec {
  std::vector<Eigen::Index> train_rows;
  Eigen::Index rows_per_iteration = 0;
  std::function<void(std::span<const Eigen::Index>, Mat&, std::vector<double>&)> build;
  std::function<double(const MlpParams&)> validation;
};

std::vector<EpochRecord> run_training(MlpParams& net, const TrainConfig& config, LoopSpec& spec, RngStream& rng) {
  AdamConfig adam;
  adam.learning_rate = config.learning_rate;
  adam.weight_decay = config.weight_decay;
  adam.amsgrad = config.amsgrad;
  AdamState state = AdamState::create(net, adam);

  const Eigen::Index iterations = static_cast<Eigen::Index>(spec.train_rows.size()) / spec.rows_per_iteration;
  std::vector<EpochRecord> trace;
  MlpParams best = net;
  double best_val = std::numeric_limits<double>::infinity();
  double plateau_best = std::numeric_limits<double>::infinity();
  int since_improvement = 0;
  std::int64_t global_iteration = 0;
  Mat inputs;
  std::vector<double> labels;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(spec.train_rows.begin(), spec.train_rows.end(), rng);
    double loss_sum = 0.0;
    for (Eigen::Index it = 0; it < iterations; ++it, ++global_iteration) {
      const std::span<const Eigen::Index> rows(spec.train_rows.data() + it * spec.rows_per_iteration,
                                               static_cast<std::size_t>(spec.rows_per_iteration));
      spec.build(rows, inputs, labels);
      LossAndGrads lg = bce_logit_loss_and_grads(net, inputs, labels);
      if (!std::isfinite(lg.loss)) {
        throw NumericalError("training: non-finite loss at iteration " + std::to_string(global_iteration));
      }
      loss_sum += lg.loss;
      adam_step(state, net, lg.grads);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(iterations);
    rec.validation_loss = spec.validation ? spec.validation(net) : std::numeric_limits<double>::quiet_NaN();
    rec.learning_rate = state.config.learning_rate;
    trace.push_back(rec);
    if (config.on_epoch) config.on_epoch(rec);

    const double monitored = std::isnan(rec.validation_loss) ? rec.train_loss : rec.validation_loss;
    if (!std::isnan(rec.validation_loss) && rec.validation_loss < best_val) {
      best_val = rec.validation_loss;
      best = net;
    }
    if (config.lr_scheduling) {
      if (monitored < plateau_best * (1.0 - 1e-4)) {
        plateau_best = monitored;
        since_improvement = 0;
      } else if (++since_improvement > config.plateau_patience) {
        state.config.learning_rate *= config.plateau_factor;
        since_improvement = 0;
      }
    }
  }
  if (std::isfinite(best_val)) net = best;
  return trace;
}

void split_rows(Eigen::Index n, double validation_fraction, RngStream& rng, std::vector<Eigen::Index>& train,
                std::vector<Eigen::Index>& validation) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_val = static_cast<std::size_t>(std::floor(validation_fraction * static_cast<double>(n)));
  validation.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
}

std::vector<int> layer_sizes_for(int input_dim, const std::vector<int>& hidden) {
  std::vector<int> sizes{input_dim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(1);
  return sizes;
}

// Mean BCE on validation rows: pair i is dependent, (x_i, theta_{i+1}) independent.
double validation_bce(const MlpParams& net, const StandardizedData& data, const std::vector<Eigen::Index>& rows,
                      const Mat* reference_xs) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index dx = data.xs.rows();
  const Eigen::Index dt = data.thetas.rows();
  Mat inputs(dx + dt, 2 * n);
  std::vector<double> labels(static_cast<std::size_t>(2 * n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index r = rows[static_cast<std::size_t>(i)];
    inputs.col(2 * i) << data.xs.col(r), data.thetas.col(r);
    labels[static_cast<std::size_t>(2 * i)] = 1.0;
    if (reference_xs) {
      inputs.col(2 * i + 1) << reference_xs->col(r), data.thetas.col(r);
    } else {
      const Eigen::Index other = rows[static_cast<std::size_t>((i + 1) % n)];
      inputs.col(2 * i + 1) << data.xs.col(r), data.thetas.col(other);
    }
    labels[static_cast<std::size_t>(2 * i + 1)] = 0.0;
  }
  return bce_logit_loss(net, inputs, labels);
}

Standardizer theta_standardizer_for(const JointDataset& dataset, const TrainConfig& config) {
  return config.standardize_theta ? dataset.theta_stats : Standardizer::identity(dataset.theta_dim());
}

}  // namespace

void batch_switching_inputs(const Mat& xa, const Mat& ta, const Mat& xb, const Mat& tb, Mat& inputs,
                            std::vector<double>& labels) {
  const Eigen::Index batch = xa.cols();
  if (ta.cols() != batch || xb.cols() != batch || tb.cols() != batch || xa.rows() != xb.rows() ||
      ta.rows() != tb.rows()) {
    throw DimensionError("batch_switching_inputs: blocks A and B must have matching shapes");
  }
  const Eigen::Index dx = xa.rows();
  // Columns: (x_A, theta_A) 1, (x_A, theta_B) 0, (x_B, theta_B) 1, (x_B, theta_A) 0.
  inputs.resize(dx + ta.rows(), 4 * batch);
  inputs.block(0, 0, dx, batch) = xa;
  inputs.block(dx, 0, ta.rows(), batch) = ta;
  inputs.block(0, batch, dx, batch) = xa;
  inputs.block(dx, batch, ta.rows(), batch) = tb;
  inputs.block(0, 2 * batch, dx, batch) = xb;
  inputs.block(dx, 2 * batch, ta.rows(), batch) = tb;
  inputs.block(0, 3 * batch, dx, batch) = xb;
  inputs.block(dx, 3 * batch, ta.rows(), batch) = ta;
  labels.assign(static_cast<std::size_t>(4 * batch), 0.0);
  std::fill_n(labels.begin(), batch, 1.0);
  std::fill_n(labels.begin() + 2 * batch, batch, 1.0);
}

double batch_switching_loss(const MlpParams& net, const Mat& xa, const Mat& ta, const Mat& xb, const Mat& tb) {
  Mat inputs;
  std::vector<double> labels;
  batch_switching_inputs(xa, ta, xb, tb, inputs, labels);
  // Mean over 4 equal groups, times 4: the sum of the four per-group means.
  return 4.0 * bce_logit_loss(net, inputs, labels);
}

TrainResult train_ratio_estimator(const JointDataset& dataset, const TrainConfig& config) {
  config.validate();
  if (dataset.thetas.rows() != dataset.xs.rows()) throw DimensionError("train: theta and x row counts differ");
  RngStream rng = RngStream(config.seed).derive(0x7261);
  std::vector<Eigen::Index> train_rows;
  std::vector<Eigen::Index> val_rows;
  split_rows(dataset.size(), config.validation_fraction, rng, train_rows, val_rows);
  const Eigen::Index batch = config.batch_size;
  if (static_cast<Eigen::Index>(train_rows.size()) < 2 * batch) {
    throw ConfigError("train: need at least 2 * batch_size training rows, have " + std::to_string(train_rows.size()));
  }

  const Standardizer theta_std = theta_standardizer_for(dataset, config);
  const StandardizedData data = standardize(dataset.thetas, dataset.xs, theta_std, dataset.x_stats);
  const Eigen::Index dx = dataset.x_dim();
  const Eigen::Index dt = dataset.theta_dim();

  RngStream init_rng = RngStream(config.seed).derive(0x696e6974);
  MlpParams net = mlp_init(layer_sizes_for(static_cast<int>(dx + dt), config.hidden), config.activation, init_rng);

  LoopSpec spec;
  spec.train_rows = std::move(train_rows);
  spec.rows_per_iteration = 2 * batch;
  spec.build = [&](std::span<const Eigen::Index> rows, Mat& inputs, std::vector<double>& labels) {
    const std::vector<Eigen::Index> a(rows.begin(), rows.begin() + batch);
    const std::vector<Eigen::Index> b(rows.begin() + batch, rows.end());
    batch_switching_inputs(data.xs(Eigen::all, a), data.thetas(Eigen::all, a), data.xs(Eigen::all, b),
                           data.thetas(Eigen::all, b), inputs, labels);
  };
  if (val_rows.size() >= 2) {
    spec.validation = [&](const MlpParams& p) { return validation_bce(p, data, val_rows, nullptr); };
  }

  TrainResult result;
  result.trace = run_training(net, config, spec, rng);
  result.estimator = RatioEstimator(std::move(net), dataset.x_stats, theta_std);
  result.estimator.simulator = dataset.simulator;
  result.estimator.config_digest = config.digest();
  return result;
}

ReferenceTrainResult train_reference_ratio_estimator(const JointDataset& dataset, const Simulator& simulator,
                                                     const Vec& theta_ref, const TrainConfig& config) {
  config.validate();
  if (theta_ref.size() != dataset.theta_dim()) throw DimensionError("train_reference: theta_ref dimension mismatch");
  if (simulator.prior && !simulator.prior->in_support(theta_ref)) {
    throw ConfigError("train_reference: theta_ref lies outside the prior support");
  }
  const Eigen::Index n = dataset.size();
  // Reference draws x'_i ~ p(x | theta_ref), one per dataset row.
  Mat reference(n, dataset.x_dim());
  RngStream sim_rng = RngStream(config.seed).derive(0x726566);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Simulation s = simulator.simulate(theta_ref, sim_rng);
    if (s.x.size() != dataset.x_dim()) throw DimensionError("train_reference: simulator output dimension mismatch");
    reference.row(i) = s.x.transpose();
  }

  RngStream rng = RngStream(config.seed).derive(0x7261);
  std::vector<Eigen::Index> train_rows;
  std::vector<Eigen::Index> val_rows;
  split_rows(n, config.validation_fraction, rng, train_rows, val_rows);
  const Eigen::Index batch = config.batch_size;
  if (static_cast<Eigen::Index>(train_rows.size()) < 2 * batch) {
    throw ConfigError("train_reference: need at least 2 * batch_size training rows");
  }
  const Standardizer theta_std = theta_standardizer_for(dataset, config);
  const StandardizedData data = standardize(dataset.thetas, dataset.xs, theta_std, dataset.x_stats);
  const Mat reference_std =
      ((reference.rowwise() - dataset.x_stats.mean.transpose()).array().rowwise() / dataset.x_stats.std.transpose().array())
          .transpose();
  const Eigen::Index dx = dataset.x_dim();
  const Eigen::Index dt = dataset.theta_dim();

  RngStream init_rng = RngStream(config.seed).derive(0x696e6974);
  MlpParams net = mlp_init(layer_sizes_for(static_cast<int>(dx + dt), config.hidden), config.activation, init_rng);

  LoopSpec spec;
  spec.train_rows = std::move(train_rows);
  spec.rows_per_iteration = batch;
  spec.build = [&](std::span<const Eigen::Index> rows, Mat& inputs, std::vector<double>& labels) {
    inputs.resize(dx + dt, 2 * batch);
    labels.resize(static_cast<std::size_t>(2 * batch));
    for (Eigen::Index i = 0; i < batch; ++i) {
      const Eigen::Index a = rows[static_cast<std::size_t>(i)];
      inputs.col(i) << data.xs.col(a), data.thetas.col(a);
      inputs.col(batch + i) << reference_std.col(a), data.thetas.col(a);
      labels[static_cast<std::size_t>(i)] = 1.0;
      labels[static_cast<std::size_t>(batch + i)] = 0.0;
    }
  };
  if (val_rows.size() >= 2) {
    spec.validation = [&](const MlpParams& p) { return validation_bce(p, data, val_rows, &reference_std); };
  }
  std::vector<EpochRecord> trace = run_training(net, config, spec, rng);
  RatioEstimator inner(std::move(net), dataset.x_stats, theta_std);
  inner.simulator = dataset.simulator;
  inner.config_digest = config.digest();
  return ReferenceTrainResult{ReferenceRatioEstimator(std::move(inner), theta_ref), std::move(trace)};
}

ReferenceTrainResult train_reference_ratio_estimator(const Prior& prior, const Simulator& simulator,
                                                     const Vec& theta_ref, Eigen::Index n, const TrainConfig& config) {
  const JointDataset dataset = generate_joint_dataset(prior, simulator, n, config.seed ^ 0x5eed);
  return train_reference_ratio_estimator(dataset, simulator, theta_ref, config);
}

double balanced_bce(const RatioModel& model, const Mat& thetas, const Mat& xs) {
  const Eigen::Index n = thetas.rows();
  if (n < 2 || xs.rows() != n) throw DimensionError("balanced_bce: need at least two matching rows");
  Mat shifted(n, thetas.cols());
  for (Eigen::Index i = 0; i < n; ++i) shifted.row(i) = thetas.row((i + 1) % n);
  const Vec dep = model.log_ratio_batch(xs, thetas);
  const Vec indep = model.log_ratio_batch(xs, shifted);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) total += bce_with_logit(dep(i), 1.0) + bce_with_logit(indep(i), 0.0);
  return total / static_cast<double>(2 * n);
}

}  // namespace lfmc
