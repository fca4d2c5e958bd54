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

#include "lfmc/adam.hpp"

#include "lfmc/errors.hpp"

#include <cmath>
#include <string>

namespace lfmc {

AdamState AdamState::create(const MlpParams& params, const AdamConfig& config) {
  if (!(config.learning_rate > 0.0)) throw ConfigError("adam: learning rate must be positive");
  AdamState state;
  state.config = config;
  state.first_moment = MlpParams::zeros_like(params);
  state.second_moment = MlpParams::zeros_like(params);
  state.max_second_moment = MlpParams::zeros_like(params);
  return state;
}

namespace {

template <typename Block>
void update_block(const AdamConfig& c, double step_size, double bias2_sqrt, Block& param, const Block& grad,
                  Block& m, Block& v, Block& v_max) {
  if (c.weight_decay != 0.0) {
    const Block g = grad + c.weight_decay * param;
    m = c.beta1 * m + (1.0 - c.beta1) * g;
    v = c.beta2 * v + (1.0 - c.beta2) * g.cwiseProduct(g);
  } else {
    m = c.beta1 * m + (1.0 - c.beta1) * grad;
    v = c.beta2 * v + (1.0 - c.beta2) * grad.cwiseProduct(grad);
  }
  const Block* denom_source = &v;
  if (c.amsgrad) {
    v_max = v_max.cwiseMax(v);
    denom_source = &v_max;
  }
  param.array() -= step_size * m.array() / (denom_source->array().sqrt() / bias2_sqrt + c.epsilon);
}

}  // namespace

void adam_step(AdamState& state, MlpParams& params, const MlpParams& grads) {
  const std::size_t layers = params.num_layers();
  if (grads.num_layers() != layers || state.first_moment.num_layers() != layers) {
    throw DimensionError("adam_step: parameter, gradient and state shapes disagree");
  }
  for (std::size_t l = 0; l < layers; ++l) {
    if (grads.weights[l].rows() != params.weights[l].rows() || grads.weights[l].cols() != params.weights[l].cols() ||
        grads.biases[l].size() != params.biases[l].size()) {
      throw DimensionError("adam_step: gradient shape mismatch in layer " + std::to_string(l));
    }
    if (!grads.weights[l].allFinite() || !grads.biases[l].allFinite()) {
      throw NumericalError("adam_step: non-finite gradient in layer " + std::to_string(l));
    }
  }
  const AdamConfig& c = state.config;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(c.beta1, t);
  const double bias2_sqrt = std::sqrt(1.0 - std::pow(c.beta2, t));
  const double step_size = c.learning_rate / bias1;
  for (std::size_t l = 0; l < layers; ++l) {
    update_block(c, step_size, bias2_sqrt, params.weights[l], grads.weights[l], state.first_moment.weights[l],
                 state.second_moment.weights[l], state.max_second_moment.weights[l]);
    update_block(c, step_size, bias2_sqrt, params.biases[l], grads.biases[l], state.first_moment.biases[l],
                 state.second_moment.biases[l], state.max_second_moment.biases[l]);
  }
}

}  // namespace lfmc
