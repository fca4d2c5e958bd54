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

#ifndef LFMC_CHAIN_HPP
#define LFMC_CHAIN_HPP

#include "lfmc/linalg.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lfmc {

/// Markov chain theta_{0:T} with per-transition bookkeeping.
struct Chain {
  Mat states;                         // (T + 1) x theta_dim; row 0 is theta_0
  std::vector<std::uint8_t> accepted;  // T flags
  Vec log_ratios;                     // T values of log r at the proposed state (-inf when out of support)
  std::string sampler;                // "lf_mh", "lf_hmc", "analytic_mh"
  Vec step_sizes;                     // random-walk scales, or (step size, leapfrog steps) for HMC
  std::uint64_t seed = 0;

  Eigen::Index transitions() const { return static_cast<Eigen::Index>(accepted.size()); }
  double acceptance_rate() const;
  /// States after dropping `burn_in` leading rows, keeping every `thinning`-th.
  Mat samples(Eigen::Index burn_in, Eigen::Index thinning = 1) const;
};

struct ChainSummary {
  double acceptance_rate = 0.0;
  Eigen::Index kept = 0;
  Vec mean;
  Vec std;
  Mat autocorrelation;  // theta_dim x (max_lag + 1); column k holds lag k
  Vec ess;
  bool degenerate = false;  // some coordinate never moved; its ESS is reported as 1
};

ChainSummary chain_statistics(const Chain& chain, Eigen::Index burn_in, Eigen::Index thinning = 1, int max_lag = 10);

/// Normalized autocorrelation at lags 0..max_lag (0 for a constant series).
Vec autocorrelation(std::span<const double> series, int max_lag);

/// Effective sample size from Geyer's initial positive sequence. Sets *degenerate
/// and returns 1 for a constant series.
double effective_sample_size(std::span<const double> series, bool* degenerate = nullptr);

/// Default burn-in: 20% of the transitions.
inline Eigen::Index default_burn_in(const Chain& chain) { return chain.transitions() / 5; }

// Chain files: <path> (CSV with header theta_0..theta_{d-1}) and <path>.meta.
void save_chain(const Chain& chain, const std::string& path);
Chain load_chain(const std::string& path);

}  // namespace lfmc

#endif  // LFMC_CHAIN_HPP
