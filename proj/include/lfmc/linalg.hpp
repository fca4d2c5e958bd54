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

#ifndef LFMC_LINALG_HPP
#define LFMC_LINALG_HPP

#include <Eigen/Dense>

#include <functional>
#include <span>

namespace lfmc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
// Row-major storage matches the on-disk layout of sample matrices.
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Lower-triangular L with L * L^T = a for symmetric positive semi-definite a.
/// Pivots below `zero_tolerance` zero out their column instead of failing, so
/// degenerate covariances map to exact means.
Mat cholesky_lower_psd(const Mat& a, double zero_tolerance = 1e-12);

double log_sum_exp(std::span<const double> values);
double log_sum_exp(const Vec& values);

double normal_cdf(double z);
double log_normal_pdf(double x, double mean, double stddev);

/// Central finite differences (f(x + h e_i) - f(x - h e_i)) / 2h.
Vec finite_diff_grad(const std::function<double(const Vec&)>& f, const Vec& x, double h);

/// Per-coordinate affine standardization (v - mean) / std.
struct Standardizer {
  Vec mean;
  Vec std;

  static Standardizer identity(Eigen::Index dim);
  /// Column statistics of `samples` (rows are samples); std floored at `floor`.
  static Standardizer fit(const Mat& samples, double floor = 1e-8);

  Eigen::Index dim() const { return mean.size(); }
  Vec apply(const Vec& v) const;
};

bool all_finite(const Mat& m);
bool all_finite(const Vec& v);

}  // namespace lfmc

#endif  // LFMC_LINALG_HPP
