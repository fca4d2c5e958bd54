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

#include "lfmc/diagnostics.hpp"

#include "lfmc/adam.hpp"
#include "lfmc/dataset.hpp"
#include "lfmc/errors.hpp"
#include "lfmc/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace lfmc {

std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const double> labels) {
  if (scores.size() != labels.size()) throw DimensionError("roc_curve: scores and labels differ in length");
  double positives = 0.0;
  for (double y : labels) {
    if (y != 0.0 && y != 1.0) throw ConfigError("roc_curve: labels must be 0 or 1");
    positives += y;
  }
  const double negatives = static_cast<double>(labels.size()) - positives;
  if (positives == 0.0 || negatives == 0.0) throw ConfigError("roc_curve: both classes must be present");
  for (double s : scores) {
    if (std::isnan(s)) throw NumericalError("roc_curve: NaN score");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::vector<RocPoint> points{{0.0, 0.0}};
  double tp = 0.0;
  double fp = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == s; ++i) {
      if (labels[order[i]] == 1.0) {
        tp += 1.0;
      } else {
        fp += 1.0;
      }
    }
    points.emplace_back(fp / negatives, tp / positives);
  }
  return points;
}

double trapezoid_auc(const std::vector<RocPoint>& points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += (points[i].first - points[i - 1].first) * 0.5 * (points[i].second + points[i - 1].second);
  }
  return area;
}

std::string DiscriminatorConfig::digest() const {
  std::string s = "mlp(";
  for (std::size_t i = 0; i < hidden.size(); ++i) s += (i ? "x" : "") + std::to_string(hidden[i]);
  s += ") " + std::string(to_string(activation)) + " epochs=" + std::to_string(epochs) +
       " batch=" + std::to_string(batch_size) + " lr=" + format_double(learning_rate) +
       " train_fraction=" + format_double(train_fraction);
  return s;
}

namespace {

Mat select_rows(const Mat& m, std::span<const Eigen::Index> rows) {
  Mat out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  return out;
}

std::vector<Eigen::Index> shuffled_indices(Eigen::Index n, RngStream& rng) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  return idx;
}

// Multinomial resampling with replacement, weights given as logs.
Mat importance_resample(const Mat& pool, const Vec& log_weights, Eigen::Index count, RngStream& rng, bool& ok) {
  ok = false;
  const double top = log_weights.maxCoeff();
  if (!std::isfinite(top)) return Mat();
  std::vector<double> cumulative(static_cast<std::size_t>(log_weights.size()));
  double total = 0.0;
  for (Eigen::Index i = 0; i < log_weights.size(); ++i) {
    total += std::exp(log_weights(i) - top);
    cumulative[static_cast<std::size_t>(i)] = total;
  }
  if (!(total > 0.0) || !std::isfinite(total)) return Mat();
  Mat out(count, pool.cols());
  for (Eigen::Index k = 0; k < count; ++k) {
    const double u = rng.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    out.row(k) = pool.row(static_cast<Eigen::Index>(it - cumulative.begin()));
  }
  ok = true;
  return out;
}

}  // namespace

TwoSampleResult discriminate(const Mat& a_train, const Mat& b_train, const Mat& a_test, const Mat& b_test,
                             const DiscriminatorConfig& config, RngStream& rng) {
  const Eigen::Index d = a_train.cols();
  if (b_train.cols() != d || a_test.cols() != d || b_test.cols() != d) {
    throw DimensionError("discriminator: sample sets differ in dimension");
  }
  if (a_train.rows() < 1 || b_train.rows() < 1 || a_test.rows() < 1 || b_test.rows() < 1) {
    throw ConfigError("discriminator: every split needs at least one row");
  }
  if (config.batch_size < 1 || config.epochs < 1) throw ConfigError("discriminator: bad batch size or epoch count");

  Mat train_rows(a_train.rows() + b_train.rows(), d);
  train_rows << a_train, b_train;
  const Standardizer scale = Standardizer::fit(train_rows);
  auto to_columns = [&](const Mat& rows) {
    return Mat(((rows.rowwise() - scale.mean.transpose()).array().rowwise() / scale.std.transpose().array()).transpose());
  };
  const Mat train = to_columns(train_rows);
  std::vector<double> train_labels(static_cast<std::size_t>(train.cols()), 0.0);
  std::fill(train_labels.begin() + a_train.rows(), train_labels.end(), 1.0);

  std::vector<int> sizes{static_cast<int>(d)};
  sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
  sizes.push_back(1);
  RngStream init = rng.derive(1);
  MlpParams net = mlp_init(sizes, config.activation, init);
  AdamConfig adam;
  adam.learning_rate = config.learning_rate;
  AdamState state = AdamState::create(net, adam);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(train.cols()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Mat batch;
  std::vector<double> labels;
  const auto n = static_cast<Eigen::Index>(order.size());
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (Eigen::Index start = 0; start < n; start += config.batch_size) {
      const Eigen::Index len = std::min<Eigen::Index>(config.batch_size, n - start);
      batch.resize(d, len);
      labels.resize(static_cast<std::size_t>(len));
      for (Eigen::Index k = 0; k < len; ++k) {
        const Eigen::Index r = order[static_cast<std::size_t>(start + k)];
        batch.col(k) = train.col(r);
        labels[static_cast<std::size_t>(k)] = train_labels[static_cast<std::size_t>(r)];
      }
      const LossAndGrads lg = bce_logit_loss_and_grads(net, batch, labels);
      adam_step(state, net, lg.grads);
    }
  }

  Mat test_rows(a_test.rows() + b_test.rows(), d);
  test_rows << a_test, b_test;
  const Vec scores = mlp_forward_batch(net, to_columns(test_rows));
  std::vector<double> test_labels(static_cast<std::size_t>(scores.size()), 0.0);
  std::fill(test_labels.begin() + a_test.rows(), test_labels.end(), 1.0);
  std::vector<double> s(scores.data(), scores.data() + scores.size());

  TwoSampleResult r;
  r.n_test = scores.size();
  r.roc = roc_curve(s, test_labels);
  r.raw_auc = trapezoid_auc(r.roc);
  if (r.raw_auc < 0.5) {
    for (double& v : s) v = -v;
    r.roc = roc_curve(s, test_labels);
  }
  r.auc = trapezoid_auc(r.roc);
  return r;
}

TwoSampleResult two_sample_test(const Mat& a, const Mat& b, RngStream& rng, const DiscriminatorConfig& config,
                                Eigen::Index max_per_set) {
  if (a.cols() != b.cols()) throw DimensionError("two_sample_test: sample sets differ in dimension");
  if (a.rows() < 200 || b.rows() < 200) throw ConfigError("two_sample_test: each set needs at least 200 rows");
  const Eigen::Index m = std::min({a.rows(), b.rows(), max_per_set});
  const auto n_train = static_cast<Eigen::Index>(std::floor(config.train_fraction * static_cast<double>(m)));
  if (n_train < 1 || n_train >= m) throw ConfigError("two_sample_test: train_fraction leaves an empty split");
  const std::vector<Eigen::Index> ia = shuffled_indices(a.rows(), rng);
  const std::vector<Eigen::Index> ib = shuffled_indices(b.rows(), rng);
  const std::span<const Eigen::Index> sa(ia);
  const std::span<const Eigen::Index> sb(ib);
  return discriminate(select_rows(a, sa.first(n_train)), select_rows(b, sb.first(n_train)),
                      select_rows(a, sa.subspan(n_train, m - n_train)), select_rows(b, sb.subspan(n_train, m - n_train)),
                      config, rng);
}

double two_sample_auc(const Mat& a, const Mat& b, RngStream& rng, const DiscriminatorConfig& config,
                      Eigen::Index max_per_set) {
  return two_sample_test(a, b, rng, config, max_per_set).auc;
}

namespace {

// Mean of exp(-gamma * |x - y|^2) over all row pairs, accumulated in fixed blocks.
double kernel_mean(const Mat& x, const Mat& y, double gamma) {
  const Vec xn = x.rowwise().squaredNorm();
  const Vec yn = y.rowwise().squaredNorm();
  constexpr Eigen::Index kBlock = 512;
  double total = 0.0;
  for (Eigen::Index r = 0; r < x.rows(); r += kBlock) {
    const Eigen::Index len = std::min(kBlock, x.rows() - r);
    Mat d2 = -2.0 * x.middleRows(r, len) * y.transpose();
    d2.colwise() += xn.segment(r, len);
    d2.rowwise() += yn.transpose();
    total += (-gamma * d2.array().max(0.0)).exp().sum();
  }
  return total / (static_cast<double>(x.rows()) * static_cast<double>(y.rows()));
}

}  // namespace

double mmd(const Mat& a, const Mat& b, Eigen::Index median_subset) {
  if (a.cols() != b.cols()) throw DimensionError("mmd: sample sets differ in dimension");
  if (a.rows() < 1 || b.rows() < 1) throw ConfigError("mmd: empty sample set");
  if (median_subset < 2) throw ConfigError("mmd: median_subset must be >= 2");
  const Eigen::Index total = a.rows() + b.rows();
  const Eigen::Index m = std::min(total, median_subset);
  Mat subset(m, a.cols());
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index k = static_cast<Eigen::Index>((static_cast<double>(i) * static_cast<double>(total)) /
                                                     static_cast<double>(m));
    subset.row(i) = k < a.rows() ? a.row(k) : b.row(k - a.rows());
  }
  std::vector<double> distances;
  distances.reserve(static_cast<std::size_t>(m * (m - 1) / 2));
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) distances.push_back((subset.row(i) - subset.row(j)).norm());
  }
  double bandwidth = 1e-8;
  if (!distances.empty()) {
    const auto mid = distances.begin() + static_cast<std::ptrdiff_t>(distances.size() / 2);
    std::nth_element(distances.begin(), mid, distances.end());
    bandwidth = std::max(*mid, 1e-8);
  }
  const double gamma = 1.0 / (2.0 * bandwidth * bandwidth);
  const double sq = kernel_mean(a, a, gamma) + kernel_mean(b, b, gamma) - 2.0 * kernel_mean(a, b, gamma);
  return std::sqrt(std::max(sq, 0.0));
}

std::string DiagnosticReport::to_string() const {
  KeyValueDoc doc;
  doc.set("format", std::string("lfmc-diagnostic-1"));
  doc.set("auc", auc);
  doc.set("failed", std::string(failed ? "true" : "false"));
  doc.set("message", message);
  doc.set("n_samples", static_cast<std::int64_t>(n_samples));
  doc.set("theta_test", theta_test);
  doc.set("config", config_digest);
  Vec fpr(static_cast<Eigen::Index>(roc_points.size()));
  Vec tpr(static_cast<Eigen::Index>(roc_points.size()));
  for (std::size_t i = 0; i < roc_points.size(); ++i) {
    fpr(static_cast<Eigen::Index>(i)) = roc_points[i].first;
    tpr(static_cast<Eigen::Index>(i)) = roc_points[i].second;
  }
  doc.set("roc_fpr", fpr);
  doc.set("roc_tpr", tpr);
  return doc.to_string();
}

DiagnosticReport DiagnosticReport::parse(const std::string& text) {
  const KeyValueDoc doc = KeyValueDoc::parse(text);
  if (doc.get_or("format", "") != "lfmc-diagnostic-1") throw IoError("not a diagnostic report");
  DiagnosticReport r;
  r.auc = doc.get_double("auc");
  r.failed = doc.get("failed") == "true";
  r.message = doc.get_or("message", "");
  r.n_samples = doc.get_int("n_samples");
  r.theta_test = doc.get_vector("theta_test");
  r.config_digest = doc.get_or("config", "");
  const Vec fpr = doc.get_vector("roc_fpr");
  const Vec tpr = doc.get_vector("roc_tpr");
  if (fpr.size() != tpr.size()) throw IoError("diagnostic report: ROC coordinate lists differ in length");
  for (Eigen::Index i = 0; i < fpr.size(); ++i) r.roc_points.emplace_back(fpr(i), tpr(i));
  return r;
}

void DiagnosticReport::save(const std::string& path) const { write_text_file(path, to_string()); }

DiagnosticReport DiagnosticReport::load(const std::string& path) { return parse(read_text_file(path)); }

DiagnosticReport roc_diagnostic(const RatioModel& model, const Prior& prior, const Simulator& simulator,
                                const Vec& theta_test, Eigen::Index n, RngStream& rng,
                                const RocDiagnosticOptions& options) {
  if (n < 1000) throw ConfigError("roc_diagnostic: need at least 1000 samples per class");
  if (theta_test.size() != prior.dim() || model.theta_dim() != prior.dim() || model.x_dim() != simulator.x_dim) {
    throw DimensionError("roc_diagnostic: model, prior, simulator and theta_test dimensions disagree");
  }
  if (!prior.in_support(theta_test)) throw ConfigError("roc_diagnostic: theta_test lies outside the prior support");

  DiagnosticReport report;
  report.n_samples = n;
  report.theta_test = theta_test;
  report.config_digest = options.discriminator.digest() + " resampling=importance";

  // Samples from p(x | theta_test), retried on non-finite output.
  RngStream cond_rng = rng.derive(0);
  Mat conditional(n, simulator.x_dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    Simulation s;
    int attempt = 0;
    do {
      s = simulator.simulate(theta_test, cond_rng);
    } while (!all_finite(s.x) && ++attempt < 8);
    if (!all_finite(s.x)) throw NumericalError("roc_diagnostic: simulator keeps failing at theta_test");
    conditional.row(i) = s.x.transpose();
  }
  DatasetOptions dataset_options;
  dataset_options.workers = options.workers;
  const Mat marginal = generate_joint_dataset(prior, simulator, n, rng.derive(1)(), dataset_options).xs;
  const Vec log_weights = model.log_ratio_batch(marginal, theta_test.transpose().replicate(n, 1));

  const auto n_train = static_cast<Eigen::Index>(std::floor(options.discriminator.train_fraction * static_cast<double>(n)));
  const Eigen::Index n_test = n - n_train;
  RngStream resample_rng = rng.derive(2);
  bool ok_train = false;
  bool ok_test = false;
  Vec lw_train = log_weights.head(n_train);
  Vec lw_test = log_weights.tail(n_test);
  for (Vec* lw : {&lw_train, &lw_test}) {
    for (Eigen::Index i = 0; i < lw->size(); ++i) {
      if (std::isnan((*lw)(i))) (*lw)(i) = -std::numeric_limits<double>::infinity();
    }
  }
  const Mat reweighted_train = importance_resample(marginal.topRows(n_train), lw_train, n_train, resample_rng, ok_train);
  const Mat reweighted_test = importance_resample(marginal.bottomRows(n_test), lw_test, n_test, resample_rng, ok_test);
  if (!ok_train || !ok_test) {
    report.failed = true;
    report.auc = std::numeric_limits<double>::quiet_NaN();
    report.message = "importance weights vanish: the estimator assigns negligible ratio to every marginal sample";
    return report;
  }

  RngStream disc_rng = rng.derive(3);
  const TwoSampleResult r = discriminate(conditional.topRows(n_train), reweighted_train, conditional.bottomRows(n_test),
                                         reweighted_test, options.discriminator, disc_rng);
  report.roc_points = r.roc;
  report.auc = r.auc;
  return report;
}

void DensityScan::save(const std::string& path) const {
  std::vector<std::string> header;
  for (Eigen::Index j = 0; j < grid.cols(); ++j) header.push_back("theta_" + std::to_string(j));
  header.emplace_back("log_density");
  header.emplace_back("mass");
  Mat m(grid.rows(), grid.cols() + 2);
  m << grid, log_density, masses;
  write_csv_matrix(path, header, m);
}

DensityScan posterior_scan(const RatioModel& model, const Prior& prior, const Vec& x_o, const Mat& grid) {
  if (grid.cols() != prior.dim() || model.theta_dim() != prior.dim() || x_o.size() != model.x_dim()) {
    throw DimensionError("posterior_scan: grid, prior, model and observation dimensions disagree");
  }
  if (grid.rows() < 1) throw ConfigError("posterior_scan: empty grid");
  DensityScan scan;
  scan.grid = grid;
  scan.log_density = Vec::Constant(grid.rows(), -std::numeric_limits<double>::infinity());
  std::vector<Eigen::Index> inside;
  for (Eigen::Index i = 0; i < grid.rows(); ++i) {
    if (prior.in_support(grid.row(i).transpose())) inside.push_back(i);
  }
  if (inside.empty()) throw ConfigError("posterior_scan: no grid point lies inside the prior support");
  const Mat thetas = select_rows(grid, inside);
  const Vec lr = model.log_ratio_batch(x_o.transpose().replicate(thetas.rows(), 1), thetas);
  for (std::size_t k = 0; k < inside.size(); ++k) {
    const Eigen::Index i = inside[k];
    scan.log_density(i) = prior.log_density(grid.row(i).transpose()) + lr(static_cast<Eigen::Index>(k));
  }
  scan.log_normalizer = log_sum_exp(scan.log_density);
  if (!std::isfinite(scan.log_normalizer)) throw NumericalError("posterior_scan: density is not normalizable on the grid");
  // Scalar exp: the vectorized one clamps its argument and maps -inf to a denormal.
  scan.masses = (scan.log_density.array() - scan.log_normalizer).unaryExpr([](double v) { return std::exp(v); }).matrix();
  return scan;
}

Mat regular_grid(const Vec& low, const Vec& high, int points) {
  if (low.size() != high.size() || low.size() < 1) throw DimensionError("regular_grid: bad bounds");
  if (points < 1) throw ConfigError("regular_grid: need at least one point per axis");
  const Eigen::Index d = low.size();
  Eigen::Index total = 1;
  for (Eigen::Index j = 0; j < d; ++j) total *= points;
  Mat grid(total, d);
  for (Eigen::Index i = 0; i < total; ++i) {
    Eigen::Index rem = i;
    for (Eigen::Index j = d - 1; j >= 0; --j) {
      const Eigen::Index k = rem % points;
      rem /= points;
      grid(i, j) = low(j) + (static_cast<double>(k) + 0.5) * (high(j) - low(j)) / points;
    }
  }
  return grid;
}

double total_variation(const Vec& p, const Vec& q) {
  if (p.size() != q.size()) throw DimensionError("total_variation: length mismatch");
  return 0.5 * (p - q).cwiseAbs().sum();
}

double log_posterior_probe(const RatioModel& model, const Prior& prior, const Vec& x_o, const Vec& theta) {
  return prior.log_density(theta) + model.log_ratio(x_o, theta);
}

}  // namespace lfmc
