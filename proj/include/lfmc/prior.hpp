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

#ifndef LFMC_PRIOR_HPP
#define LFMC_PRIOR_HPP

#include "lfmc/linalg.hpp"
#include "lfmc/random.hpp"

#include <memory>
#include <string>
#include <utility>

namespace lfmc {

enum class PriorKind { uniform_box, categorical, kernel_density };

/// Parameter distribution p(theta): sampling, log-density and support.
class Prior {
 public:
  virtual ~Prior() = default;

  virtual PriorKind kind() const = 0;
  virtual int dim() const = 0;
  /// n i.i.d. draws, one per row.
  virtual Mat sample(RngStream& rng, Eigen::Index n) const = 0;
  /// Exact log-density; -infinity outside the support.
  virtual double log_density(const Vec& theta) const = 0;
  virtual Vec grad_log_density(const Vec& theta) const;
  virtual bool in_support(const Vec& theta) const;
  /// Axis-aligned box enclosing the support: (low, high).
  virtual std::pair<Vec, Vec> bounds() const = 0;
  /// One-line description; parse_prior() inverts it for uniform boxes and categoricals.
  virtual std::string describe() const = 0;
};

class UniformBoxPrior final : public Prior {
 public:
  UniformBoxPrior(Vec low, Vec high);

  PriorKind kind() const override { return PriorKind::uniform_box; }
  int dim() const override { return static_cast<int>(low_.size()); }
  Mat sample(RngStream& rng, Eigen::Index n) const override;
  double log_density(const Vec& theta) const override;
  bool in_support(const Vec& theta) const override;
  std::pair<Vec, Vec> bounds() const override { return {low_, high_}; }
  std::string describe() const override;

  const Vec& low() const { return low_; }
  const Vec& high() const { return high_; }

 private:
  Vec low_;
  Vec high_;
  double log_volume_;
};

/// One-dimensional prior over event indices {0, ..., M-1}; theta holds the index.
class CategoricalPrior final : public Prior {
 public:
  explicit CategoricalPrior(Vec probabilities);

  PriorKind kind() const override { return PriorKind::categorical; }
  int dim() const override { return 1; }
  Mat sample(RngStream& rng, Eigen::Index n) const override;
  double log_density(const Vec& theta) const override;
  std::pair<Vec, Vec> bounds() const override;
  std::string describe() const override;

  int num_events() const { return static_cast<int>(probabilities_.size()); }
  const Vec& probabilities() const { return probabilities_; }

 private:
  Vec probabilities_;
  Vec cumulative_;
};

std::shared_ptr<const Prior> parse_prior(const std::string& description);

inline Mat prior_sample(const Prior& prior, RngStream& rng, Eigen::Index n) { return prior.sample(rng, n); }
inline double prior_log_density(const Prior& prior, const Vec& theta) { return prior.log_density(theta); }

}  // namespace lfmc

#endif  // LFMC_PRIOR_HPP
