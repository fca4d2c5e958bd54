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

#include "test_support.hpp"

#include "lfmc/training.hpp"

#include <filesystem>
#include <memory>

namespace lfmc::testing {

std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "lfmc_tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

Simulator wide_gaussian(double half_width) {
  Simulator sim;
  sim.name = "wide_gaussian";
  sim.theta_dim = 1;
  sim.x_dim = 1;
  sim.prior = std::make_shared<UniformBoxPrior>(Vec::Constant(1, -half_width), Vec::Constant(1, half_width));
  sim.theta_star = Vec::Zero(1);
  sim.simulate = [](const Vec& theta, RngStream& rng) {
    Simulation s;
    s.x = Vec::Constant(1, theta(0) + rng.normal());
    return s;
  };
  return sim;
}

const JointDataset& gaussian1d_test_set() {
  static const JointDataset data = [] {
    const Simulator sim = make_simulator("gaussian1d");
    return generate_joint_dataset(*sim.prior, sim, 5000, 12);
  }();
  return data;
}

const RatioEstimator& trained_gaussian1d() {
  static const RatioEstimator estimator = [] {
    const Simulator sim = make_simulator("gaussian1d");
    const JointDataset data = generate_joint_dataset(*sim.prior, sim, 100000, 11);
    TrainConfig config;
    config.hidden = {64, 64, 64};
    config.activation = Activation::relu;
    config.batch_size = 128;
    config.epochs = 40;
    config.learning_rate = 5e-4;
    config.seed = 3;
    return train_ratio_estimator(data, config).estimator;
  }();
  return estimator;
}

}  // namespace lfmc::testing
