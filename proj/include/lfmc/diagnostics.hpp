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

#ifndef LFMC_DIAGNOSTICS_HPP
#define LFMC_DIAGNOSTICS_HPP

#include "lfmc/mlp.hpp"
#include "lfmc/prior.hpp"
#include "lfmc/random.hpp"
#include "lfmc/ratio.hpp"
#include "lfmc/simulators.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lfmc {

using RocPoint = std::pair<double, double>;  // (false-positive rate, true-positive rate)

/// ROC curve with one vertex per distinct score (label 1 = positive, higher score = more positive).
std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const double> labels);
/// Trapezoidal area under a curve given by monotone points.
double trapezoid_auc(const std::vector<RocPoint>& points);

/// Fresh binary classifier used by the two-sample tests.
struct DiscriminatorConfig {
  std::vector<int> hidden = {64, 64, 64};
  Activation activation = Activation::relu;
  int epochs = 100;
  int batch_size = 128;
  double learning_rate = 1e-3;
  double train_fraction = 0.7;

  std::string digest() const;
};

struct TwoSampleResult {
  double auc = 0.5;      // max(auc, 1 - auc) on the held-out split
  double raw_auc = 0.5;  // held-out AUC with b as the positive class
  std::vector<RocPoint> roc;
  Eigen::Index n_test = 0;
};

/// Trains a discriminator on pre-split sets (rows are samples) and scores the held-out parts.
TwoSampleResult discriminate(const Mat& a_train, const Mat& b_train, const Mat& a_test, const Mat& b_test,
                             const DiscriminatorConfig& config, RngStream& rng);

/// Classifier two-sample test: shuffled, balanced 70/30 split (sets larger than
/// max_per_set rows are randomly subsampled first).
TwoSampleResult two_sample_test(const Mat& a, const Mat& b, RngStream& rng, const DiscriminatorConfig& config = {},
                                Eigen::Index max_per_set = 10000);
double two_sample_auc(const Mat& a, const Mat& b, RngStream& rng, const DiscriminatorConfig& config = {},
                      Eigen::Index max_per_set = 10000);

/// sqrt of the biased squared MMD with a Gaussian kernel whose bandwidth is the
/// median pairwise distance of the pooled set (estimated on at most
/// median_subset evenly strided points; floored at 1e-8).
double mmd(const Mat& a, const Mat& b, Eigen::Index median_subset = 2000);

struct DiagnosticReport {
  std::vector<RocPoint> roc_points;
  double auc = 0.5;  // NaN when failed
  Eigen::Index n_samples = 0;
  Vec theta_test;
  std::string config_digest;
  bool failed = false;
  std::string message;

  std::string to_string() const;
  static DiagnosticReport parse(const std::string& text);
  void save(const std::string& path) const;
  static DiagnosticReport load(const std::string& path);
};

struct RocDiagnosticOptions {
  DiscriminatorConfig discriminator;
  int workers = 1;
};

/// Compares n draws of p(x | theta_test) with n marginal draws importance-resampled
/// by r(x | theta_test). Both pools are split 70/30 before resampling so that no
/// resampled duplicate straddles the split. AUC ~ 0.5 means the estimator is
/// indistinguishable from the true likelihood at theta_test.
DiagnosticReport roc_diagnostic(const RatioModel& model, const Prior& prior, const Simulator& simulator,
                                const Vec& theta_test, Eigen::Index n, RngStream& rng,
                                const RocDiagnosticOptions& options = {});

struct DensityScan {
  Mat grid;           // points x theta_dim
  Vec log_density;    // log p(theta) + log r(x_o | theta)
  double log_normalizer = 0.0;  // log-sum-exp of log_density over the grid
  Vec masses;         // exp(log_density - log_normalizer)

  void save(const std::string& path) const;
};

DensityScan posterior_scan(const RatioModel& model, const Prior& prior, const Vec& x_o, const Mat& grid);

/// Regular grid over [low, high] with `points` per axis (cartesian product).
Mat regular_grid(const Vec& low, const Vec& high, int points);

/// Total-variation distance between two probability vectors.
double total_variation(const Vec& p, const Vec& q);

/// log p(theta) + log r(x_o | theta).
double log_posterior_probe(const RatioModel& model, const Prior& prior, const Vec& x_o, const Vec& theta);

}  // namespace lfmc

#endif  // LFMC_DIAGNOSTICS_HPP
