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

#ifndef LFMC_SAMPLERS_HPP
#define LFMC_SAMPLERS_HPP

#include "lfmc/chain.hpp"
#include "lfmc/prior.hpp"
#include "lfmc/random.hpp"
#include "lfmc/ratio.hpp"
#include "lfmc/simulators.hpp"

#include <functional>
#include <string>

namespace lfmc {

/// theta -> log r(x_o | theta) with the observation bound in.
using LogRatioFn = std::function<double(const Vec& theta)>;
using GradLogRatioFn = std::function<Vec(const Vec& theta)>;

/// Isotropic-per-coordinate Gaussian random walk.
struct ProposalConfig {
  Vec step_sizes;

  static ProposalConfig isotropic(int dim, double step);
  /// Tuned defaults per registered simulator.
  static ProposalConfig for_simulator(const Simulator& simulator);
  void validate(int dim) const;
};

struct HmcConfig {
  int leapfrog_steps = 10;
  double step_size = 0.1;

  void validate() const;
};

/// Likelihood-free Metropolis-Hastings targeting p(theta) r(x_o | theta).
/// Proposals outside the prior support are rejected without evaluating log_ratio.
/// `context` (e.g. the observation) is included in error messages.
Chain lf_metropolis_hastings(const LogRatioFn& log_ratio, const Prior& prior, const ProposalConfig& proposal,
                             const Vec& theta0, Eigen::Index steps, RngStream& rng, const std::string& context = "");

Chain lf_metropolis_hastings(const RatioModel& model, const Prior& prior, const ProposalConfig& proposal,
                             const Vec& x_o, const Vec& theta0, Eigen::Index steps, RngStream& rng);

/// Likelihood-free HMC with unit mass: U(theta) = -log r(x_o | theta) - log p(theta),
/// accepted with probability min(1, exp(-dH)). Trajectories that leave the prior
/// support are rejected.
Chain lf_hmc(const LogRatioFn& log_ratio, const GradLogRatioFn& grad_log_ratio, const Prior& prior,
             const Vec& theta0, Eigen::Index steps, const HmcConfig& config, RngStream& rng,
             const std::string& context = "");

Chain lf_hmc(const RatioModel& model, const Prior& prior, const Vec& x_o, const Vec& theta0, Eigen::Index steps,
             const HmcConfig& config, RngStream& rng);

/// Metropolis-Hastings on the exact log-likelihood log p(x_o | theta).
Chain analytic_metropolis_hastings(const LogLikelihoodFn& log_likelihood, const Prior& prior,
                                   const ProposalConfig& proposal, const Vec& x_o, const Vec& theta0,
                                   Eigen::Index steps, RngStream& rng);

/// Independent chains run on `workers` threads; chain i uses rng.derive(i) and
/// starts from theta0s.row(i). Output order follows i.
std::vector<Chain> run_chains(const std::function<Chain(const Vec& theta0, RngStream& rng)>& run_one,
                              const Mat& theta0s, RngStream& rng, int workers = 1);

/// Pools post-burn-in, thinned states of several chains.
Mat pool_chains(const std::vector<Chain>& chains, Eigen::Index burn_in, Eigen::Index thinning = 1);

using DistanceFn = std::function<double(const Vec& x, const Vec& x_o)>;

struct AbcResult {
  Mat accepted;        // accepted theta rows, ordered by increasing distance
  Vec distances;       // matching distances
  double threshold = 0.0;
  Eigen::Index simulated = 0;
};

/// Rejection ABC keeping the eps_quantile fraction of `budget` prior-predictive draws
/// closest to x_o. An empty distance uses Euclidean distance on x standardized by
/// the simulated draws' per-coordinate std.
AbcResult rejection_abc(const Simulator& simulator, const Prior& prior, const Vec& x_o, const DistanceFn& distance,
                        double eps_quantile, Eigen::Index budget, RngStream& rng, int workers = 1);

}  // namespace lfmc

#endif  // LFMC_SAMPLERS_HPP
