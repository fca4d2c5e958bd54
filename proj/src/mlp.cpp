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

#include "lfmc/mlp.hpp"

#include "lfmc/errors.hpp"

#include <cmath>
#include <string>

namespace lfmc {

namespace {

constexpr double kSeluScale = 1.0507009873554804934193349852946;
constexpr double kSeluAlpha = 1.6732632423543772848170429916717;
constexpr double kEluAlpha = 1.0;

void activate_inplace(Activation act, Mat& z) {
  switch (act) {
    case Activation::relu:
      z = z.cwiseMax(0.0);
      break;
    case Activation::selu:
      z = z.unaryExpr([](double v) { return v > 0.0 ? kSeluScale * v : kSeluScale * kSeluAlpha * std::expm1(v); });
      break;
    case Activation::elu:
      z = z.unaryExpr([](double v) { return v > 0.0 ? v : kEluAlpha * std::expm1(v); });
      break;
  }
}

// Derivative of the activation evaluated at pre-activation z.
Mat activation_derivative(Activation act, const Mat& z) {
  switch (act) {
    case Activation::relu:
      return z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
    case Activation::selu:
      return z.unaryExpr([](double v) { return v > 0.0 ? kSeluScale : kSeluScale * kSeluAlpha * std::exp(v); });
    case Activation::elu:
      return z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : kEluAlpha * std::exp(v); });
  }
  return {};
}

void check_input_rows(const MlpParams& params, Eigen::Index rows) {
  if (rows != params.input_dim()) {
    throw DimensionError("mlp: input has " + std::to_string(rows) + " entries, network expects " +
                         std::to_string(params.input_dim()));
  }
}

// Forward pass keeping pre-activations (for the backward pass).
struct Tape {
  std::vector<Mat> pre;   // pre[l]: output of layer l before activation
  std::vector<Mat> post;  // post[l]: input to layer l
};

Tape forward_tape(const MlpParams& params, const Mat& inputs) {
  Tape tape;
  const std::size_t layers = params.num_layers();
  tape.pre.resize(layers);
  tape.post.resize(layers);
  tape.post[0] = inputs;
  for (std::size_t l = 0; l < layers; ++l) {
    Mat z = params.weights[l] * tape.post[l];
    z.colwise() += params.biases[l];
    tape.pre[l] = z;
    if (l + 1 < layers) {
      activate_inplace(params.activation, z);
      tape.post[l + 1] = std::move(z);
    }
  }
  return tape;
}

// Backpropagates d loss / d logits (1 x batch) through the tape.
void backward(const MlpParams& params, const Tape& tape, Mat delta, MlpParams& grads) {
  for (std::size_t l = params.num_layers(); l-- > 0;) {
    grads.weights[l].noalias() = delta * tape.post[l].transpose();
    grads.biases[l] = delta.rowwise().sum().transpose();
    if (l == 0) break;
    Mat upstream = params.weights[l].transpose() * delta;
    delta = upstream.cwiseProduct(activation_derivative(params.activation, tape.pre[l - 1]));
  }
}

}  // namespace

std::string_view to_string(Activation activation) {
  switch (activation) {
    case Activation::relu:
      return "relu";
    case Activation::selu:
      return "selu";
    case Activation::elu:
      return "elu";
  }
  return "relu";
}

Activation activation_from_string(std::string_view name) {
  if (name == "relu") return Activation::relu;
  if (name == "selu") return Activation::selu;
  if (name == "elu") return Activation::elu;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

std::size_t MlpParams::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
  return n;
}

MlpParams MlpParams::zeros_like(const MlpParams& other) {
  MlpParams out;
  out.layer_sizes = other.layer_sizes;
  out.activation = other.activation;
  out.weights.reserve(other.weights.size());
  out.biases.reserve(other.biases.size());
  for (std::size_t l = 0; l < other.weights.size(); ++l) {
    out.weights.push_back(Mat::Zero(other.weights[l].rows(), other.weights[l].cols()));
    out.biases.push_back(Vec::Zero(other.biases[l].size()));
  }
  return out;
}

void validate_mlp(const MlpParams& params) {
  const auto& sizes = params.layer_sizes;
  if (sizes.size() < 2) throw DimensionError("mlp: need at least input and output layer sizes");
  for (int s : sizes) {
    if (s <= 0) throw DimensionError("mlp: layer sizes must be positive");
  }
  if (sizes.back() != 1) throw DimensionError("mlp: final layer must have exactly one unit");
  if (params.weights.size() != sizes.size() - 1 || params.biases.size() != sizes.size() - 1) {
    throw DimensionError("mlp: layer count does not match layer_sizes");
  }
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    if (params.weights[l].rows() != sizes[l + 1] || params.weights[l].cols() != sizes[l] ||
        params.biases[l].size() != sizes[l + 1]) {
      throw DimensionError("mlp: layer " + std::to_string(l) + " shape does not chain");
    }
  }
}

MlpParams mlp_init(std::vector<int> layer_sizes, Activation activation, RngStream& rng) {
  if (layer_sizes.size() < 2) throw DimensionError("mlp_init: need at least two layer sizes");
  for (int s : layer_sizes) {
    if (s <= 0) throw DimensionError("mlp_init: layer sizes must be positive");
  }
  if (layer_sizes.back() != 1) throw DimensionError("mlp_init: final layer must have one unit");
  MlpParams params;
  params.layer_sizes = std::move(layer_sizes);
  params.activation = activation;
  for (std::size_t l = 0; l + 1 < params.layer_sizes.size(); ++l) {
    const int fan_in = params.layer_sizes[l];
    const int fan_out = params.layer_sizes[l + 1];
    const double bound = std::sqrt(6.0 / fan_in);
    Mat w(fan_out, fan_in);
    // Fill row by row so the draw order matches the on-disk row-major layout.
    for (int i = 0; i < fan_out; ++i) {
      for (int j = 0; j < fan_in; ++j) w(i, j) = rng.uniform(-bound, bound);
    }
    params.weights.push_back(std::move(w));
    params.biases.push_back(Vec::Zero(fan_out));
  }
  return params;
}

double mlp_forward(const MlpParams& params, const Vec& input) {
  check_input_rows(params, input.size());
  Vec h = input;
  const std::size_t layers = params.num_layers();
  for (std::size_t l = 0; l < layers; ++l) {
    Mat z = params.weights[l] * h + params.biases[l];
    if (l + 1 < layers) activate_inplace(params.activation, z);
    h = z;
  }
  return h(0);
}

Vec mlp_forward_batch(const MlpParams& params, const Mat& inputs) {
  check_input_rows(params, inputs.rows());
  Mat h = inputs;
  const std::size_t layers = params.num_layers();
  for (std::size_t l = 0; l < layers; ++l) {
    Mat z = params.weights[l] * h;
    z.colwise() += params.biases[l];
    if (l + 1 < layers) activate_inplace(params.activation, z);
    h = std::move(z);
  }
  return h.row(0).transpose();
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double bce_with_logit(double logit, double label) {
  return std::max(logit, 0.0) - logit * label + std::log1p(std::exp(-std::abs(logit)));
}

namespace {

void check_labels(const Mat& inputs, std::span<const double> labels) {
  if (inputs.cols() == 0) throw DimensionError("bce: empty batch");
  if (static_cast<Eigen::Index>(labels.size()) != inputs.cols()) {
    throw DimensionError("bce: label count does not match batch size");
  }
  for (double y : labels) {
    if (y != 0.0 && y != 1.0) throw ConfigError("bce: labels must be 0 or 1");
  }
}

}  // namespace

LossAndGrads bce_logit_loss_and_grads(const MlpParams& params, const Mat& inputs,
                                      std::span<const double> labels) {
  check_input_rows(params, inputs.rows());
  check_labels(inputs, labels);
  const Tape tape = forward_tape(params, inputs);
  const Mat& logits = tape.pre.back();
  const double n = static_cast<double>(inputs.cols());
  LossAndGrads out;
  Mat delta(1, inputs.cols());
  double total = 0.0;
  for (Eigen::Index i = 0; i < inputs.cols(); ++i) {
    const double z = logits(0, i);
    const double y = labels[static_cast<std::size_t>(i)];
    total += bce_with_logit(z, y);
    delta(0, i) = (sigmoid(z) - y) / n;
  }
  out.loss = total / n;
  out.grads = MlpParams::zeros_like(params);
  backward(params, tape, std::move(delta), out.grads);
  return out;
}

double bce_logit_loss(const MlpParams& params, const Mat& inputs, std::span<const double> labels) {
  check_labels(inputs, labels);
  const Vec logits = mlp_forward_batch(params, inputs);
  double total = 0.0;
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    total += bce_with_logit(logits(i), labels[static_cast<std::size_t>(i)]);
  }
  return total / static_cast<double>(logits.size());
}

Vec input_gradient(const MlpParams& params, const Vec& input) {
  check_input_rows(params, input.size());
  const Tape tape = forward_tape(params, input);
  Mat delta = Mat::Ones(1, 1);
  for (std::size_t l = params.num_layers(); l-- > 0;) {
    Mat upstream = params.weights[l].transpose() * delta;
    if (l == 0) return upstream.col(0);
    delta = upstream.cwiseProduct(activation_derivative(params.activation, tape.pre[l - 1]));
  }
  return {};
}

}  // namespace lfmc
