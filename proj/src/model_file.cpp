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

#include "lfmc/model_file.hpp"

#include "lfmc/errors.hpp"
#include "lfmc/io.hpp"

namespace lfmc {

namespace {

constexpr const char* kFormat = "lfmc-model-1";

void write_network(KeyValueDoc& meta, const RatioEstimator& est, const std::string& prefix) {
  const MlpParams& net = est.net();
  std::string sizes;
  for (std::size_t i = 0; i < net.layer_sizes.size(); ++i) {
    if (i) sizes += ',';
    sizes += std::to_string(net.layer_sizes[i]);
  }
  meta.set("layer_sizes", sizes);
  meta.set("activation", std::string(to_string(net.activation)));
  meta.set("x_mean", est.x_standardizer().mean);
  meta.set("x_std", est.x_standardizer().std);
  meta.set("theta_mean", est.theta_standardizer().mean);
  meta.set("theta_std", est.theta_standardizer().std);
  meta.set("simulator", est.simulator);
  meta.set("train_digest", est.config_digest);
  meta.set("weights_file", prefix_basename(prefix) + ".weights.bin");

  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(net.parameter_count()));
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    const Mat& w = net.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) flat.push_back(w(r, c));
    }
    for (Eigen::Index r = 0; r < net.biases[l].size(); ++r) flat.push_back(net.biases[l](r));
  }
  write_f64_values(prefix + ".weights.bin", flat);
}

RatioEstimator read_network(const KeyValueDoc& meta, const std::string& prefix) {
  MlpParams net;
  for (const std::string& s : split(meta.get("layer_sizes"), ',')) {
    net.layer_sizes.push_back(static_cast<int>(parse_int(s)));
  }
  net.activation = activation_from_string(meta.get("activation"));
  if (net.layer_sizes.size() < 2) throw IoError("'" + prefix + ".meta': layer_sizes needs at least two entries");
  const std::vector<double> flat = read_f64_values(prefix + ".weights.bin");
  std::size_t pos = 0;
  for (std::size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
    const int in = net.layer_sizes[l];
    const int out = net.layer_sizes[l + 1];
    if (in < 1 || out < 1) throw IoError("'" + prefix + ".meta': non-positive layer size");
    const std::size_t need = static_cast<std::size_t>(in) * static_cast<std::size_t>(out) + static_cast<std::size_t>(out);
    if (pos + need > flat.size()) throw IoError("'" + prefix + ".weights.bin' is shorter than the architecture");
    Mat w(out, in);
    for (int r = 0; r < out; ++r) {
      for (int c = 0; c < in; ++c) w(r, c) = flat[pos++];
    }
    Vec b(out);
    for (int r = 0; r < out; ++r) b(r) = flat[pos++];
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  if (pos != flat.size()) throw IoError("'" + prefix + ".weights.bin' is longer than the architecture");
  RatioEstimator est(std::move(net), Standardizer{meta.get_vector("x_mean"), meta.get_vector("x_std")},
                     Standardizer{meta.get_vector("theta_mean"), meta.get_vector("theta_std")});
  est.simulator = meta.get_or("simulator", "");
  est.config_digest = meta.get_or("train_digest", "");
  return est;
}

}  // namespace

void save_model(const RatioModel& model, const std::string& prefix) {
  KeyValueDoc meta;
  meta.set("format", std::string(kFormat));
  meta.set("kind", model.describe());
  meta.set("x_dim", static_cast<std::int64_t>(model.x_dim()));
  meta.set("theta_dim", static_cast<std::int64_t>(model.theta_dim()));
  if (const auto* est = dynamic_cast<const RatioEstimator*>(&model)) {
    write_network(meta, *est, prefix);
  } else if (const auto* ref = dynamic_cast<const ReferenceRatioEstimator*>(&model)) {
    meta.set("theta_ref", ref->theta_ref());
    write_network(meta, ref->estimator(), prefix);
  } else if (const auto* c = dynamic_cast<const ConstantRatio*>(&model)) {
    meta.set("value", c->value());
  } else if (dynamic_cast<const Gaussian1dOracle*>(&model) == nullptr) {
    throw ConfigError("save_model: models of kind '" + model.describe() + "' cannot be saved");
  }
  meta.save(prefix + ".meta");
}

std::shared_ptr<const RatioModel> load_model(const std::string& prefix) {
  const KeyValueDoc meta = KeyValueDoc::load(prefix + ".meta");
  if (meta.get_or("format", "") != kFormat) throw IoError("'" + prefix + ".meta' is not a model file");
  const std::string kind = meta.get("kind");
  std::shared_ptr<const RatioModel> model;
  if (kind == "mlp") {
    model = std::make_shared<RatioEstimator>(read_network(meta, prefix));
  } else if (kind == "mlp_reference") {
    model = std::make_shared<ReferenceRatioEstimator>(read_network(meta, prefix), meta.get_vector("theta_ref"));
  } else if (kind == "gaussian1d_oracle") {
    model = std::make_shared<Gaussian1dOracle>();
  } else if (kind == "constant") {
    model = std::make_shared<ConstantRatio>(static_cast<int>(meta.get_int("x_dim")),
                                            static_cast<int>(meta.get_int("theta_dim")), meta.get_double("value"));
  } else {
    throw IoError("'" + prefix + ".meta': unknown model kind '" + kind + "'");
  }
  if (model->x_dim() != meta.get_int("x_dim") || model->theta_dim() != meta.get_int("theta_dim")) {
    throw IoError("'" + prefix + ".meta': stored dimensions disagree with the network");
  }
  return model;
}

std::shared_ptr<const RatioModel> make_builtin_model(const std::string& spec) {
  const std::vector<std::string> parts = split(spec, ':');
  if (parts.empty()) throw ConfigError("empty model name");
  if (parts[0] == "gaussian1d_oracle" && parts.size() == 1) return std::make_shared<Gaussian1dOracle>();
  if (parts[0] == "constant" && (parts.size() == 1 || parts.size() == 3 || parts.size() == 4)) {
    const int x_dim = parts.size() > 1 ? static_cast<int>(parse_int(parts[1])) : 1;
    const int theta_dim = parts.size() > 1 ? static_cast<int>(parse_int(parts[2])) : 1;
    const double value = parts.size() > 3 ? parse_double(parts[3]) : 0.0;
    if (x_dim < 1 || theta_dim < 1) throw ConfigError("constant model dimensions must be positive");
    return std::make_shared<ConstantRatio>(x_dim, theta_dim, value);
  }
  throw ConfigError("unknown built-in model '" + spec + "'");
}

}  // namespace lfmc
