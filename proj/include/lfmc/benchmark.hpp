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

#ifndef LFMC_BENCHMARK_HPP
#define LFMC_BENCHMARK_HPP

#include "lfmc/io.hpp"
#include "lfmc/ratio.hpp"
#include "lfmc/samplers.hpp"
#include "lfmc/training.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace lfmc {

/// End-to-end protocol: simulate, train, sample the posterior of one observation
/// with the ratio estimator and with a reference method, then compare.
struct BenchmarkConfig {
  std::string simulator;
  std::uint64_t seed = 0;
  Eigen::Index simulations = 100000;
  TrainConfig train;
  Vec x_o;  // empty: one draw from the simulator at theta_star
  int chains = 40;
  Eigen::Index steps_per_chain = 25000;
  Eigen::Index max_samples = 10000;  // pooled posterior samples kept per method
  // Coordinates whose sign the likelihood cannot identify; chain starting points
  // are spread evenly over their sign patterns.
  std::vector<int> sign_symmetric_dims;
  Eigen::Index abc_budget = 100000;  // reference posterior when no likelihood is available
  double abc_quantile = 0.01;
  bool lrt_baseline = false;
  Vec theta_ref;
  int probe_draws = 20;
  int workers = 1;
  std::function<void(const std::string&)> log;

  /// Defaults for a registered simulator.
  static BenchmarkConfig defaults(const std::string& simulator);
};

struct BenchmarkResult {
  KeyValueDoc metrics;
  Vec x_o;
  std::shared_ptr<const RatioEstimator> estimator;
  std::shared_ptr<const RatioModel> baseline;
  std::vector<EpochRecord> trace;
  Mat reference_samples;
  Mat aalr_samples;
  Mat lrt_samples;
};

BenchmarkResult run_benchmark(const BenchmarkConfig& config);

/// Starting points: prior draws whose sign pattern over `sign_dims` cycles through
/// all combinations (where the prior allows both signs).
Mat stratified_starts(const Prior& prior, int count, const std::vector<int>& sign_dims, RngStream& rng);

/// Evenly strided subset of at most `count` rows.
Mat stride_rows(const Mat& m, Eigen::Index count);

/// Fraction of rows with a strictly positive value in column `dim`.
double positive_fraction(const Mat& samples, int dim);

}  // namespace lfmc

#endif  // LFMC_BENCHMARK_HPP
