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

#ifndef LFMC_MLP_HPP
#define LFMC_MLP_HPP

#include "lfmc/linalg.hpp"
#include "lfmc/random.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lfmc {

enum class Activation { relu, selu, elu };

std::string_view to_string(Activation activation);
Activation activation_from_string(std::string_view name);

/// Fully connected network with a single linear output unit (the logit).
///
/// weights[l] has shape (layer_sizes[l + 1], layer_sizes[l]); the activation
/// is applied after every layer except the last.
struct MlpParams {
  std::vector<int> layer_sizes;
  Activation activation = Activation::relu;
  std::vector<Mat> weights;
  std::vector<Vec> biases;

  int input_dim() const { return layer_sizes.front(); }
  std::size_t num_layers() const { return weights.size(); }
  std::size_t parameter_count() const;

  /// Same architecture, every entry zero. Used for gradients and optimizer moments.
  static MlpParams zeros_like(const MlpParams& other);
};

/// Throws DimensionError unless shapes chain and the output is one unit.
void validate_mlp(const MlpParams& params);

/// Weights uniform in +-sqrt(6 / fan_in), biases zero.
MlpParams mlp_init(std::vector<int> layer_sizes, Activation activation, RngStream& rng);

double mlp_forward(const MlpParams& params, const Vec& input);

/// Logits for every column of `inputs` (shape: input_dim x batch).
Vec mlp_forward_batch(const MlpParams& params, const Mat& inputs);

struct LossAndGrads {
  double loss = 0.0;
  MlpParams grads;
};

/// Mean binary cross-entropy of sigmoid(logit) against {0, 1} labels, in the
/// overflow-free logit form, with exact reverse-mode gradients.
LossAndGrads bce_logit_loss_and_grads(const MlpParams& params, const Mat& inputs,
                                      std::span<const double> labels);

/// Mean BCE only (no backward pass).
double bce_logit_loss(const MlpParams& params, const Mat& inputs, std::span<const double> labels);

/// Per-example BCE for a single logit.
double bce_with_logit(double logit, double label);

/// d logit / d input.
Vec input_gradient(const MlpParams& params, const Vec& input);

double sigmoid(double z);

}  // namespace lfmc

#endif  // LFMC_MLP_HPP
