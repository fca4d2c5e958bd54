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

#ifndef LFMC_RATIO_HPP
#define LFMC_RATIO_HPP

#include "lfmc/linalg.hpp"
#include "lfmc/mlp.hpp"

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace lfmc {

/// Anything that evaluates log r(x | theta) = log p(x | theta) - log p(x) and its
/// theta-gradient. Implementations are immutable after construction and safe to
/// share across threads.
class RatioModel {
 public:
  virtual ~RatioModel() = default;

  virtual int x_dim() const = 0;
  virtual int theta_dim() const = 0;
  virtual double log_ratio(const Vec& x, const Vec& theta) const = 0;
  virtual Vec grad_log_ratio_theta(const Vec& x, const Vec& theta) const = 0;
  /// Row i of `xs` paired with row i of `thetas`.
  virtual Vec log_ratio_batch(const Mat& xs, const Mat& thetas) const;
  virtual std::string describe() const = 0;

 protected:
  void check_dims(const Vec& x, const Vec& theta) const;
};

/// sigmoid(log_ratio): the classifier's probability that (x, theta) is a dependent pair.
double classifier_output(const RatioModel& model, const Vec& x, const Vec& theta);

/// Neural ratio estimator: the MLP reads [standardized x; standardized theta]
/// and its raw output logit is log r.
class RatioEstimator final : public RatioModel {
 public:
  RatioEstimator() = default;
  RatioEstimator(MlpParams net, Standardizer x_standardizer, Standardizer theta_standardizer);

  int x_dim() const override { return static_cast<int>(x_standardizer_.dim()); }
  int theta_dim() const override { return static_cast<int>(theta_standardizer_.dim()); }
  double log_ratio(const Vec& x, const Vec& theta) const override;
  Vec grad_log_ratio_theta(const Vec& x, const Vec& theta) const override;
  Vec log_ratio_batch(const Mat& xs, const Mat& thetas) const override;
  std::string describe() const override { return "mlp"; }

  /// Network input for one pair.
  Vec network_input(const Vec& x, const Vec& theta) const;

  const MlpParams& net() const { return net_; }
  MlpParams& net() { return net_; }
  const Standardizer& x_standardizer() const { return x_standardizer_; }
  const Standardizer& theta_standardizer() const { return theta_standardizer_; }

  std::string simulator;
  std::string config_digest;

 private:
  MlpParams net_;
  Standardizer x_standardizer_;
  Standardizer theta_standardizer_;
};

/// Likelihood-to-reference ratio log p(x | theta) / p(x | theta_ref) learned by a
/// classifier against a single fixed reference hypothesis. Plugged into samplers
/// in place of log r; the reference marginal cancels only in exact arithmetic.
class ReferenceRatioEstimator final : public RatioModel {
 public:
  ReferenceRatioEstimator(RatioEstimator estimator, Vec theta_ref)
      : estimator_(std::move(estimator)), theta_ref_(std::move(theta_ref)) {}

  int x_dim() const override { return estimator_.x_dim(); }
  int theta_dim() const override { return estimator_.theta_dim(); }
  double log_ratio(const Vec& x, const Vec& theta) const override { return estimator_.log_ratio(x, theta); }
  Vec grad_log_ratio_theta(const Vec& x, const Vec& theta) const override {
    return estimator_.grad_log_ratio_theta(x, theta);
  }
  Vec log_ratio_batch(const Mat& xs, const Mat& thetas) const override {
    return estimator_.log_ratio_batch(xs, thetas);
  }
  std::string describe() const override { return "mlp_reference"; }

  const RatioEstimator& estimator() const { return estimator_; }
  const Vec& theta_ref() const { return theta_ref_; }

 private:
  RatioEstimator estimator_;
  Vec theta_ref_;
};

/// Exact log r for the x ~ N(theta, 1), theta ~ U(-5, 5) problem.
class Gaussian1dOracle final : public RatioModel {
 public:
  int x_dim() const override { return 1; }
  int theta_dim() const override { return 1; }
  double log_ratio(const Vec& x, const Vec& theta) const override;
  Vec grad_log_ratio_theta(const Vec& x, const Vec& theta) const override;
  std::string describe() const override { return "gaussian1d_oracle"; }
};

/// log r identically equal to a constant (0 by default): the prior is returned as posterior.
class ConstantRatio final : public RatioModel {
 public:
  ConstantRatio(int x_dim, int theta_dim, double value = 0.0) : x_dim_(x_dim), theta_dim_(theta_dim), value_(value) {}

  int x_dim() const override { return x_dim_; }
  int theta_dim() const override { return theta_dim_; }
  double log_ratio(const Vec& x, const Vec& theta) const override;
  Vec grad_log_ratio_theta(const Vec& x, const Vec& theta) const override;
  std::string describe() const override { return "constant"; }
  double value() const { return value_; }

 private:
  int x_dim_;
  int theta_dim_;
  double value_;
};

/// Adapter for ad-hoc log-ratio functions (synthetic targets, corrupted oracles).
class FunctionRatio final : public RatioModel {
 public:
  using ValueFn = std::function<double(const Vec& x, const Vec& theta)>;
  using GradFn = std::function<Vec(const Vec& x, const Vec& theta)>;

  FunctionRatio(int x_dim, int theta_dim, ValueFn value, GradFn grad = {});

  int x_dim() const override { return x_dim_; }
  int theta_dim() const override { return theta_dim_; }
  double log_ratio(const Vec& x, const Vec& theta) const override;
  Vec grad_log_ratio_theta(const Vec& x, const Vec& theta) const override;
  std::string describe() const override { return "function"; }

 private:
  int x_dim_;
  int theta_dim_;
  ValueFn value_;
  GradFn grad_;
};

struct EnsembleValue {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for one member
};

EnsembleValue ensemble_log_ratio(const std::vector<std::shared_ptr<const RatioModel>>& members, const Vec& x,
                                 const Vec& theta);

/// Ensemble mean as a RatioModel.
class EnsembleRatio final : public RatioModel {
 public:
  explicit EnsembleRatio(std::vector<std::shared_ptr<const RatioModel>> members);

  int x_dim() const override { return members_.front()->x_dim(); }
  int theta_dim() const override { return members_.front()->theta_dim(); }
  double log_ratio(const Vec& x, const Vec& theta) const override;
  Vec grad_log_ratio_theta(const Vec& x, const Vec& theta) const override;
  Vec log_ratio_batch(const Mat& xs, const Mat& thetas) const override;
  std::string describe() const override { return "ensemble"; }

  const std::vector<std::shared_ptr<const RatioModel>>& members() const { return members_; }

 private:
  std::vector<std::shared_ptr<const RatioModel>> members_;
};

}  // namespace lfmc

#endif  // LFMC_RATIO_HPP
