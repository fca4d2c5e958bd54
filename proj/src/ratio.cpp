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

#include "lfmc/ratio.hpp"

#include "lfmc/errors.hpp"
#include "lfmc/simulators.hpp"

#include <cmath>

namespace lfmc {

void RatioModel::check_dims(const Vec& x, const Vec& theta) const {
  if (x.size() != x_dim() || theta.size() != theta_dim()) {
    throw DimensionError("ratio model expects x of dimension " + std::to_string(x_dim()) + " and theta of dimension " +
                         std::to_string(theta_dim()) + ", got " + std::to_string(x.size()) + " and " +
                         std::to_string(theta.size()));
  }
}

Vec RatioModel::log_ratio_batch(const Mat& xs, const Mat& thetas) const {
  if (xs.rows() != thetas.rows()) throw DimensionError("log_ratio_batch: row counts differ");
  Vec out(xs.rows());
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    out(i) = log_ratio(xs.row(i).transpose(), thetas.row(i).transpose());
  }
  return out;
}

double classifier_output(const RatioModel& model, const Vec& x, const Vec& theta) {
  return sigmoid(model.log_ratio(x, theta));
}

RatioEstimator::RatioEstimator(MlpParams net, Standardizer x_standardizer, Standardizer theta_standardizer)
    : net_(std::move(net)), x_standardizer_(std::move(x_standardizer)), theta_standardizer_(std::move(theta_standardizer)) {
  validate_mlp(net_);
  if (net_.input_dim() != x_standardizer_.dim() + theta_standardizer_.dim()) {
    throw DimensionError("RatioEstimator: network input dimension " + std::to_string(net_.input_dim()) +
                         " != dim(x) + dim(theta)");
  }
}

Vec RatioEstimator::network_input(const Vec& x, const Vec& theta) const {
  check_dims(x, theta);
  Vec in(x.size() + theta.size());
  in.head(x.size()) = x_standardizer_.apply(x);
  in.tail(theta.size()) = theta_standardizer_.apply(theta);
  return in;
}

double RatioEstimator::log_ratio(const Vec& x, const Vec& theta) const {
  return mlp_forward(net_, network_input(x, theta));
}

Vec RatioEstimator::grad_log_ratio_theta(const Vec& x, const Vec& theta) const {
  const Vec g = input_gradient(net_, network_input(x, theta));
  return g.tail(theta.size()).cwiseQuotient(theta_standardizer_.std);
}

Vec RatioEstimator::log_ratio_batch(const Mat& xs, const Mat& thetas) const {
  if (xs.rows() != thetas.rows()) throw DimensionError("log_ratio_batch: row counts differ");
  if (xs.cols() != x_dim() || thetas.cols() != theta_dim()) throw DimensionError("log_ratio_batch: dimension mismatch");
  const Eigen::Index n = xs.rows();
  Mat inputs(x_dim() + theta_dim(), n);
  inputs.topRows(x_dim()) =
      ((xs.rowwise() - x_standardizer_.mean.transpose()).array().rowwise() / x_standardizer_.std.transpose().array())
          .transpose();
  inputs.bottomRows(theta_dim()) = ((thetas.rowwise() - theta_standardizer_.mean.transpose()).array().rowwise() /
                                    theta_standardizer_.std.transpose().array())
                                       .transpose();
  return mlp_forward_batch(net_, inputs);
}

double Gaussian1dOracle::log_ratio(const Vec& x, const Vec& theta) const {
  check_dims(x, theta);
  return gaussian1d_log_ratio(x(0), theta(0));
}

Vec Gaussian1dOracle::grad_log_ratio_theta(const Vec& x, const Vec& theta) const {
  check_dims(x, theta);
  return Vec::Constant(1, x(0) - theta(0));
}

double ConstantRatio::log_ratio(const Vec& x, const Vec& theta) const {
  check_dims(x, theta);
  return value_;
}

Vec ConstantRatio::grad_log_ratio_theta(const Vec& x, const Vec& theta) const {
  check_dims(x, theta);
  return Vec::Zero(theta.size());
}

FunctionRatio::FunctionRatio(int x_dim, int theta_dim, ValueFn value, GradFn grad)
    : x_dim_(x_dim), theta_dim_(theta_dim), value_(std::move(value)), grad_(std::move(grad)) {
  if (!value_) throw ConfigError("FunctionRatio: value function is required");
}

double FunctionRatio::log_ratio(const Vec& x, const Vec& theta) const {
  check_dims(x, theta);
  return value_(x, theta);
}

Vec FunctionRatio::grad_log_ratio_theta(const Vec& x, const Vec& theta) const {
  check_dims(x, theta);
  if (grad_) return grad_(x, theta);
  return finite_diff_grad([&](const Vec& t) { return value_(x, t); }, theta, 1e-6);
}

EnsembleValue ensemble_log_ratio(const std::vector<std::shared_ptr<const RatioModel>>& members, const Vec& x,
                                 const Vec& theta) {
  if (members.empty()) throw ConfigError("ensemble_log_ratio: empty ensemble");
  Vec values(static_cast<Eigen::Index>(members.size()));
  for (std::size_t i = 0; i < members.size(); ++i) values(static_cast<Eigen::Index>(i)) = members[i]->log_ratio(x, theta);
  EnsembleValue out;
  out.mean = values.mean();
  if (members.size() > 1) {
    out.std = std::sqrt((values.array() - out.mean).square().sum() / static_cast<double>(members.size() - 1));
  }
  return out;
}

EnsembleRatio::EnsembleRatio(std::vector<std::shared_ptr<const RatioModel>> members) : members_(std::move(members)) {
  if (members_.empty()) throw ConfigError("EnsembleRatio: empty ensemble");
  for (const auto& m : members_) {
    if (m->x_dim() != members_.front()->x_dim() || m->theta_dim() != members_.front()->theta_dim()) {
      throw DimensionError("EnsembleRatio: member dimensions differ");
    }
  }
}

double EnsembleRatio::log_ratio(const Vec& x, const Vec& theta) const {
  return ensemble_log_ratio(members_, x, theta).mean;
}

Vec EnsembleRatio::grad_log_ratio_theta(const Vec& x, const Vec& theta) const {
  Vec g = Vec::Zero(theta.size());
  for (const auto& m : members_) g += m->grad_log_ratio_theta(x, theta);
  return g / static_cast<double>(members_.size());
}

Vec EnsembleRatio::log_ratio_batch(const Mat& xs, const Mat& thetas) const {
  Vec sum = Vec::Zero(xs.rows());
  for (const auto& m : members_) sum += m->log_ratio_batch(xs, thetas);
  return sum / static_cast<double>(members_.size());
}

}  // namespace lfmc
