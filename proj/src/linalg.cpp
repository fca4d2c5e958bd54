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

#include "lfmc/linalg.hpp"

#include "lfmc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace lfmc {

Mat cholesky_lower_psd(const Mat& a, double zero_tolerance) {
  if (a.rows() != a.cols()) throw DimensionError("cholesky_lower_psd: matrix is not square");
  const Eigen::Index n = a.rows();
  Mat l = Mat::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double diag = a(j, j);
    for (Eigen::Index k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (diag <= zero_tolerance) continue;  // column stays zero
    const double pivot = std::sqrt(diag);
    l(j, j) = pivot;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double v = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / pivot;
    }
  }
  return l;
}

double log_sum_exp(std::span<const double> values) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : values) m = std::max(m, v);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : values) s += std::exp(v - m);
  return m + std::log(s);
}

double log_sum_exp(const Vec& values) {
  return log_sum_exp(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())));
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double log_normal_pdf(double x, double mean, double stddev) {
  const double z = (x - mean) / stddev;
  return -0.5 * z * z - std::log(stddev) - 0.5 * std::log(2.0 * std::numbers::pi);
}

Vec finite_diff_grad(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
  if (!(h > 0.0)) throw ConfigError("finite_diff_grad: step must be positive");
  Vec grad(x.size());
  Vec probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe(i) = x(i) + h;
    const double up = f(probe);
    probe(i) = x(i) - h;
    const double down = f(probe);
    probe(i) = x(i);
    grad(i) = (up - down) / (2.0 * h);
  }
  return grad;
}

Standardizer Standardizer::identity(Eigen::Index dim) {
  return Standardizer{Vec::Zero(dim), Vec::Ones(dim)};
}

Standardizer Standardizer::fit(const Mat& samples, double floor) {
  if (samples.rows() < 1) throw DimensionError("Standardizer::fit: no samples");
  Standardizer s;
  const Eigen::Index n = samples.rows();
  s.mean.resize(samples.cols());
  s.std.resize(samples.cols());
  // Plain sequential sums so the statistics are reproducible by a naive loop.
  for (Eigen::Index j = 0; j < samples.cols(); ++j) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) sum += samples(i, j);
    const double mean = sum / static_cast<double>(n);
    double sq = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) sq += (samples(i, j) - mean) * (samples(i, j) - mean);
    s.mean(j) = mean;
    s.std(j) = std::max(std::sqrt(sq / static_cast<double>(n)), floor);
  }
  return s;
}

Vec Standardizer::apply(const Vec& v) const {
  if (v.size() != mean.size()) throw DimensionError("Standardizer::apply: dimension mismatch");
  return (v - mean).cwiseQuotient(std);
}

bool all_finite(const Mat& m) { return m.allFinite(); }
bool all_finite(const Vec& v) { return v.allFinite(); }

}  // namespace lfmc
