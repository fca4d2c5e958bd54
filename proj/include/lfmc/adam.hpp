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

#ifndef LFMC_ADAM_HPP
#define LFMC_ADAM_HPP

#include "lfmc/mlp.hpp"

#include <cstdint>

namespace lfmc {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;  // L2 term added to the gradient
  bool amsgrad = false;
};

struct AdamState {
  AdamConfig config;
  MlpParams first_moment;
  MlpParams second_moment;
  MlpParams max_second_moment;  // only advanced when config.amsgrad
  std::int64_t step = 0;

  static AdamState create(const MlpParams& params, const AdamConfig& config);
};

/// One bias-corrected Adam (optionally AMSGrad) update of `params` in place.
/// Throws NumericalError naming the layer if a gradient entry is not finite.
void adam_step(AdamState& state, MlpParams& params, const MlpParams& grads);

}  // namespace lfmc

#endif  // LFMC_ADAM_HPP
