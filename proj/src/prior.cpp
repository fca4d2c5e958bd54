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

#include "lfmc/prior.hpp"

#include "lfmc/errors.hpp"
#include "lfmc/io.hpp"

#include <cmath>
#include <limits>

namespace lfmc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

Vec Prior::grad_log_density(const Vec& theta) const { return Vec::Zero(theta.size()); }

bool Prior::in_support(const Vec& theta) const { return std::isfinite(log_density(theta)); }

UniformBoxPrior::UniformBoxPrior(Vec low, Vec high) : low_(std::move(low)), high_(std::move(high)) {
  if (low_.size() != high_.size() || low_.size() == 0) {
    throw DimensionError("UniformBoxPrior: bounds must be non-empty and of equal length");
  }
  log_volume_ = 0.0;
  for (Eigen::Index i = 0; i < low_.size(); ++i) {
    if (!(low_(i) < high_(i)) || !std::isfinite(low_(i)) || !std::isfinite(high_(i))) {
      throw ConfigError("UniformBoxPrior: need finite low < high in every dimension");
    }
    log_volume_ += std::log(high_(i) - low_(i));
  }
}

Mat UniformBoxPrior::sample(RngStream& rng, Eigen::Index n) const {
  Mat out(n, low_.size());
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < low_.size(); ++c) out(r, c) = rng.uniform(low_(c), high_(c));
  }
  return out;
}

bool UniformBoxPrior::in_support(const Vec& theta) const {
  if (theta.size() != low_.size()) throw DimensionError("UniformBoxPrior: dimension mismatch");
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    if (!(theta(i) >= low_(i) && theta(i) <= high_(i))) return false;
  }
  return true;
}

double UniformBoxPrior::log_density(const Vec& theta) const {
  return in_support(theta) ? -log_volume_ : kNegInf;
}

std::string UniformBoxPrior::describe() const {
  std::string s = "uniform_box(";
  for (Eigen::Index i = 0; i < low_.size(); ++i) {
    if (i > 0) s += ',';
    s += format_double(low_(i)) + ':' + format_double(high_(i));
  }
  return s + ')';
}

CategoricalPrior::CategoricalPrior(Vec probabilities) : probabilities_(std::move(probabilities)) {
  if (probabilities_.size() == 0) throw ConfigError("CategoricalPrior: no events");
  if ((probabilities_.array() < 0.0).any()) throw ConfigError("CategoricalPrior: negative probability");
  if (std::abs(probabilities_.sum() - 1.0) > 1e-12) {
    throw ConfigError("CategoricalPrior: probabilities must sum to 1");
  }
  cumulative_.resize(probabilities_.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < probabilities_.size(); ++i) {
    acc += probabilities_(i);
    cumulative_(i) = acc;
  }
}

Mat CategoricalPrior::sample(RngStream& rng, Eigen::Index n) const {
  Mat out(n, 1);
  for (Eigen::Index r = 0; r < n; ++r) {
    const double u = rng.uniform() * cumulative_(cumulative_.size() - 1);
    Eigen::Index k = 0;
    while (k + 1 < cumulative_.size() && !(u < cumulative_(k))) ++k;
    out(r, 0) = static_cast<double>(k);
  }
  return out;
}

double CategoricalPrior::log_density(const Vec& theta) const {
  if (theta.size() != 1) throw DimensionError("CategoricalPrior: theta must be a single index");
  const double v = theta(0);
  if (!(v >= 0.0) || v != std::floor(v) || v >= static_cast<double>(probabilities_.size())) return kNegInf;
  return std::log(probabilities_(static_cast<Eigen::Index>(v)));
}

std::pair<Vec, Vec> CategoricalPrior::bounds() const {
  return {Vec::Zero(1), Vec::Constant(1, static_cast<double>(probabilities_.size() - 1))};
}

std::string CategoricalPrior::describe() const {
  std::string s = "categorical(";
  for (Eigen::Index i = 0; i < probabilities_.size(); ++i) {
    if (i > 0) s += ',';
    s += format_double(probabilities_(i));
  }
  return s + ')';
}

std::shared_ptr<const Prior> parse_prior(const std::string& description) {
  const auto open = description.find('(');
  if (open == std::string::npos || description.back() != ')') {
    throw ConfigError("cannot parse prior '" + description + "'");
  }
  const std::string kind = description.substr(0, open);
  const std::string body = description.substr(open + 1, description.size() - open - 2);
  const auto fields = split(body, ',');
  if (kind == "uniform_box") {
    Vec low(static_cast<Eigen::Index>(fields.size()));
    Vec high(static_cast<Eigen::Index>(fields.size()));
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const auto bounds = split(fields[i], ':');
      if (bounds.size() != 2) throw ConfigError("cannot parse uniform_box bound '" + fields[i] + "'");
      low(static_cast<Eigen::Index>(i)) = parse_double(bounds[0]);
      high(static_cast<Eigen::Index>(i)) = parse_double(bounds[1]);
    }
    return std::make_shared<UniformBoxPrior>(low, high);
  }
  if (kind == "categorical") {
    Vec probs(static_cast<Eigen::Index>(fields.size()));
    for (std::size_t i = 0; i < fields.size(); ++i) probs(static_cast<Eigen::Index>(i)) = parse_double(fields[i]);
    return std::make_shared<CategoricalPrior>(probs);
  }
  throw ConfigError("unknown prior kind '" + kind + "'");
}

}  // namespace lfmc
