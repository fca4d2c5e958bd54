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

#ifndef LFMC_SIMULATORS_HPP
#define LFMC_SIMULATORS_HPP

#include "lfmc/linalg.hpp"
#include "lfmc/prior.hpp"
#include "lfmc/random.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace lfmc {

struct Simulation {
  Vec x;
  bool clamped = false;  // trajectory hit a safety cap
};

using SimulateFn = std::function<Simulation(const Vec& theta, RngStream& rng)>;
using LogLikelihoodFn = std::function<double(const Vec& theta, const Vec& x)>;

/// A registered forward model with its prior and default generating parameter.
struct Simulator {
  std::string name;
  int theta_dim = 0;
  int x_dim = 0;
  std::shared_ptr<const Prior> prior;
  Vec theta_star;
  SimulateFn simulate;
  LogLikelihoodFn log_likelihood;  // empty when the likelihood is intractable
};

/// Known names: tractable, mg1, lotka_volterra, gaussian1d, two_gaussians.
Simulator make_simulator(const std::string& name);
std::vector<std::string> simulator_names();

// Tractable problem: theta in R^5, x = four i.i.d. draws from a 2-D Gaussian.

/// Mean and covariance of one 2-D block for parameter theta.
void tractable_moments(const Vec& theta, Vec& mean, Mat& cov);
Vec simulate_tractable(const Vec& theta, RngStream& rng);
/// Exact log p(x | theta); -infinity when the covariance is singular.
double tractable_log_likelihood(const Vec& theta, const Vec& x);

// M/G/1 queue: theta = (service low, service high, arrival rate).

struct Mg1Config {
  int num_jobs = 50;
};
/// 0/25/50/75/100th percentiles of the interdeparture times.
Vec simulate_mg1(const Vec& theta, RngStream& rng, const Mg1Config& config = {});
/// Linear-interpolation percentile of sorted data, q in [0, 1].
double percentile_sorted(const std::vector<double>& sorted, double q);

// Lotka-Volterra predator-prey Markov jump process; theta = log reaction rates.

struct LotkaVolterraConfig {
  double initial_predators = 50.0;
  double initial_prey = 100.0;
  double horizon = 30.0;
  int grid_points = 151;
  std::int64_t max_events = 500000;
  double max_population = 50000.0;
  double zero_variance = 1e-12;
};

struct LotkaVolterraTrajectory {
  Mat series;  // grid_points x 2: predators, prey
  std::int64_t events = 0;
  bool clamped = false;
};

LotkaVolterraTrajectory simulate_lotka_volterra_trajectory(const Vec& log_rates, RngStream& rng,
                                                           const LotkaVolterraConfig& config = {});
/// Mean, log(var + 1), lag-1 and lag-2 autocorrelation per series, then the cross-correlation.
Vec lotka_volterra_summary(const Mat& series, double zero_variance = 1e-12);
Simulation simulate_lotka_volterra(const Vec& log_rates, RngStream& rng, const LotkaVolterraConfig& config = {});

// Gaussian location model x ~ N(theta, 1) with prior U(-5, 5).

constexpr double kGaussian1dPriorHalfWidth = 5.0;
double simulate_gaussian1d(double theta, RngStream& rng);
double gaussian1d_log_marginal(double x);
/// Exact log p(x | theta) / p(x) under the U(-5, 5) prior.
double gaussian1d_log_ratio(double x, double theta);

// Two-model selection task: model m in {0, 1}, x ~ N(3 m, 1).

constexpr double kTwoGaussiansShift = 3.0;
double simulate_two_gaussians(int model, RngStream& rng);

}  // namespace lfmc

#endif  // LFMC_SIMULATORS_HPP
