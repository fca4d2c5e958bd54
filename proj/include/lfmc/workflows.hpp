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

#ifndef LFMC_WORKFLOWS_HPP
#define LFMC_WORKFLOWS_HPP

#include "lfmc/dataset.hpp"
#include "lfmc/diagnostics.hpp"
#include "lfmc/prior.hpp"
#include "lfmc/ratio.hpp"
#include "lfmc/samplers.hpp"
#include "lfmc/training.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace lfmc {

/// Sum of log r(x_i | theta) over the rows of xs (i.i.d. observations). The sum is
/// exactly rounded, so the result does not depend on the row order.
double population_log_ratio(const RatioModel& model, const Mat& xs, const Vec& theta);

/// Exactly rounded sum of doubles.
double exact_sum(std::span<const double> values);

/// p(m | x_o) for a model trained with one-hot model indices as theta.
Vec model_posterior(const RatioModel& model, const CategoricalPrior& prior, const Vec& x_o);

/// Replaces the index column of a categorical-theta dataset with its one-hot
/// encoding and sets an identity theta standardizer.
JointDataset one_hot_encode(const JointDataset& dataset, int num_models);

/// Gaussian KDE (diagonal Scott bandwidth) truncated to an axis-aligned box.
class KernelDensityPrior final : public Prior {
 public:
  /// Box = bounding box of the centers widened by 4 bandwidths, intersected with [low, high].
  KernelDensityPrior(Mat centers, const Vec& low, const Vec& high);

  PriorKind kind() const override { return PriorKind::kernel_density; }
  int dim() const override { return static_cast<int>(centers_.cols()); }
  Mat sample(RngStream& rng, Eigen::Index n) const override;
  double log_density(const Vec& theta) const override;
  bool in_support(const Vec& theta) const override;
  std::pair<Vec, Vec> bounds() const override { return {low_, high_}; }
  std::string describe() const override;

  const Vec& bandwidth() const { return bandwidth_; }
  const Mat& centers() const { return centers_; }

 private:
  Mat centers_;
  Vec bandwidth_;
  Vec low_;
  Vec high_;
  double log_mass_inside_ = 0.0;  // log of the untruncated mixture mass inside the box
};

struct RoundConfig {
  Eigen::Index simulations_per_round = 10000;
  int max_rounds = 6;
  double auc_threshold = 0.55;
  TrainConfig train;
  ProposalConfig proposal;           // empty: ProposalConfig::for_simulator
  Eigen::Index mcmc_steps = 20000;
  Eigen::Index kde_points = 2000;    // posterior samples kept for the next prior
  Eigen::Index diagnostic_samples = 4000;
  RocDiagnosticOptions diagnostic;
  /// Replaces training when set (e.g. to inject a known estimator).
  std::function<std::shared_ptr<const RatioModel>(int round, const JointDataset& data)> estimator_override;
};

struct RoundRecord {
  int round = 0;
  std::string prior;  // Prior::describe() of the round's proposal prior
  Vec prior_low;
  Vec prior_high;
  Eigen::Index dataset_size = 0;
  std::string estimator_digest;
  Vec theta_test;
  double auc = 0.0;
};

struct SequentialResult {
  std::shared_ptr<const RatioModel> estimator;
  std::shared_ptr<const Prior> prior;  // prior the final estimator was trained under
  Mat posterior_samples;
  std::vector<RoundRecord> trace;
  bool converged = false;

  std::string trace_text() const;
};

/// Train / sample / re-prior rounds focused on one observation, stopping once the
/// diagnostic AUC at the posterior mean is at most the threshold.
SequentialResult sequential_ratio_estimation(const Simulator& simulator, std::shared_ptr<const Prior> initial_prior,
                                             const Vec& x_o, const RoundConfig& config, RngStream& rng);

}  // namespace lfmc

#endif  // LFMC_WORKFLOWS_HPP
