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

#ifndef LFMC_TRAINING_HPP
#define LFMC_TRAINING_HPP

#include "lfmc/dataset.hpp"
#include "lfmc/mlp.hpp"
#include "lfmc/ratio.hpp"
#include "lfmc/simulators.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace lfmc {

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;       // mean per-example BCE over the epoch
  double validation_loss = 0.0;  // NaN without a validation split
  double learning_rate = 0.0;
};

struct TrainConfig {
  std::vector<int> hidden = {256, 256, 256};
  Activation activation = Activation::relu;
  int batch_size = 256;
  int epochs = 100;
  double learning_rate = 1e-3;
  double weight_decay = 0.0;
  bool amsgrad = true;
  double validation_fraction = 0.1;
  std::uint64_t seed = 0;
  // Plateau halving: multiply the learning rate by plateau_factor after
  // plateau_patience epochs without validation improvement.
  bool lr_scheduling = false;
  int plateau_patience = 20;
  double plateau_factor = 0.5;
  // One-hot model indices are fed to the network unscaled.
  bool standardize_theta = true;
  std::function<void(const EpochRecord&)> on_epoch;

  void validate() const;
  std::string digest() const;

  /// Per-benchmark defaults (activation, batch size, epochs, learning rate, scheduling).
  static TrainConfig for_simulator(const std::string& simulator);
};

struct TrainResult {
  RatioEstimator estimator;
  std::vector<EpochRecord> trace;
};

/// Network inputs (one column per example) and labels of one batch-switching
/// iteration. Blocks are dim x batch and already standardized.
void batch_switching_inputs(const Mat& xa, const Mat& ta, const Mat& xb, const Mat& tb, Mat& inputs,
                            std::vector<double>& labels);

/// l(s(x_A, theta_A), 1) + l(s(x_A, theta_B), 0) + l(s(x_B, theta_B), 1) + l(s(x_B, theta_A), 0),
/// each term a batch mean.
double batch_switching_loss(const MlpParams& net, const Mat& xa, const Mat& ta, const Mat& xb, const Mat& tb);

/// Trains s(x, theta) to separate dependent pairs from independent pairs built
/// by crossing the theta halves of two disjoint mini-batches A and B. The
/// returned estimator holds the parameters of the best validation epoch.
TrainResult train_ratio_estimator(const JointDataset& dataset, const TrainConfig& config);

struct ReferenceTrainResult {
  ReferenceRatioEstimator estimator;
  std::vector<EpochRecord> trace;
};

/// Baseline: label 1 on (x ~ p(x | theta), theta), label 0 on (x ~ p(x | theta_ref), theta).
/// Reference draws are simulated from `simulator` with a stream derived from config.seed.
ReferenceTrainResult train_reference_ratio_estimator(const JointDataset& dataset, const Simulator& simulator,
                                                     const Vec& theta_ref, const TrainConfig& config);

/// Convenience overload that first simulates n joint pairs from `prior`.
ReferenceTrainResult train_reference_ratio_estimator(const Prior& prior, const Simulator& simulator,
                                                     const Vec& theta_ref, Eigen::Index n, const TrainConfig& config);

/// Mean BCE of a model on dependent pairs (rows of the dataset) and independent
/// pairs (x_i with theta of a cyclically shifted row), averaged over both classes.
double balanced_bce(const RatioModel& model, const Mat& thetas, const Mat& xs);

}  // namespace lfmc

#endif  // LFMC_TRAINING_HPP
