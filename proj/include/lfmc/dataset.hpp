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

#ifndef LFMC_DATASET_HPP
#define LFMC_DATASET_HPP

#include "lfmc/linalg.hpp"
#include "lfmc/prior.hpp"
#include "lfmc/simulators.hpp"

#include <cstdint>
#include <string>

namespace lfmc {

/// (theta, x) pairs drawn from p(theta) p(x | theta), one pair per row.
struct JointDataset {
  Mat thetas;  // n x theta_dim
  Mat xs;      // n x x_dim
  Standardizer theta_stats;
  Standardizer x_stats;
  std::string simulator;
  std::string prior;  // Prior::describe()
  std::uint64_t seed = 0;
  std::int64_t clamped_rows = 0;

  Eigen::Index size() const { return thetas.rows(); }
  int theta_dim() const { return static_cast<int>(thetas.cols()); }
  int x_dim() const { return static_cast<int>(xs.cols()); }
};

struct DatasetOptions {
  int workers = 1;
  int max_retries = 8;
  Eigen::Index block_rows = 1024;  // rows per derived RNG stream
};

/// n pairs; row block b draws from RngStream(seed).derive(b), so the result
/// does not depend on the worker count.
JointDataset generate_joint_dataset(const Prior& prior, const Simulator& simulator, Eigen::Index n,
                                    std::uint64_t seed, const DatasetOptions& options = {});

/// Recomputes the stored standardizers from the current rows.
void refresh_statistics(JointDataset& dataset);

// Files: <prefix>.meta, <prefix>.thetas.bin, <prefix>.xs.bin
void save_dataset(const JointDataset& dataset, const std::string& prefix);
JointDataset load_dataset(const std::string& prefix);

}  // namespace lfmc

#endif  // LFMC_DATASET_HPP
