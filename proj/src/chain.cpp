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

#include "lfmc/chain.hpp"

#include "lfmc/errors.hpp"
#include "lfmc/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lfmc {

double Chain::acceptance_rate() const {
  if (accepted.empty()) return 0.0;
  std::int64_t n = 0;
  for (auto a : accepted) n += a;
  return static_cast<double>(n) / static_cast<double>(accepted.size());
}

Mat Chain::samples(Eigen::Index burn_in, Eigen::Index thinning) const {
  if (burn_in < 0 || burn_in >= states.rows()) throw ConfigError("chain: burn-in must be smaller than the chain length");
  if (thinning < 1) throw ConfigError("chain: thinning must be >= 1");
  const Eigen::Index kept = (states.rows() - burn_in + thinning - 1) / thinning;
  Mat out(kept, states.cols());
  for (Eigen::Index i = 0; i < kept; ++i) out.row(i) = states.row(burn_in + i * thinning);
  return out;
}

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;  // population variance
};

Moments moments(std::span<const double> s) {
  Moments m;
  for (double v : s) m.mean += v;
  m.mean /= static_cast<double>(s.size());
  for (double v : s) m.var += (v - m.mean) * (v - m.mean);
  m.var /= static_cast<double>(s.size());
  return m;
}

double autocovariance(std::span<const double> s, double mean, std::size_t lag) {
  double acc = 0.0;
  for (std::size_t i = 0; i + lag < s.size(); ++i) acc += (s[i] - mean) * (s[i + lag] - mean);
  return acc / static_cast<double>(s.size());
}

}  // namespace

Vec autocorrelation(std::span<const double> series, int max_lag) {
  Vec out = Vec::Zero(max_lag + 1);
  if (series.empty()) return out;
  const Moments m = moments(series);
  if (m.var < 1e-300) return out;
  for (int k = 0; k <= max_lag && static_cast<std::size_t>(k) < series.size(); ++k) {
    out(k) = autocovariance(series, m.mean, static_cast<std::size_t>(k)) / m.var;
  }
  return out;
}

double effective_sample_size(std::span<const double> series, bool* degenerate) {
  const std::size_t n = series.size();
  if (degenerate) *degenerate = false;
  if (n < 2) return static_cast<double>(n);
  const Moments m = moments(series);
  if (m.var < 1e-300) {
    if (degenerate) *degenerate = true;
    return 1.0;
  }
  auto rho = [&](std::size_t k) { return autocovariance(series, m.mean, k) / m.var; };
  // tau = -1 + 2 * sum of positive pair sums Gamma_k = rho_{2k} + rho_{2k+1}, made monotone.
  double tau = -1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
    double gamma = rho(2 * k) + rho(2 * k + 1);
    if (gamma <= 0.0) break;
    gamma = std::min(gamma, prev);
    prev = gamma;
    tau += 2.0 * gamma;
  }
  const double nd = static_cast<double>(n);
  tau = std::max(tau, 1.0 / std::log10(nd));
  return nd / tau;
}

ChainSummary chain_statistics(const Chain& chain, Eigen::Index burn_in, Eigen::Index thinning, int max_lag) {
  if (max_lag < 0) throw ConfigError("chain_statistics: max_lag must be >= 0");
  const Mat kept = chain.samples(burn_in, thinning);
  const Eigen::Index d = kept.cols();
  ChainSummary s;
  s.acceptance_rate = chain.acceptance_rate();
  s.kept = kept.rows();
  s.mean.resize(d);
  s.std.resize(d);
  s.ess.resize(d);
  s.autocorrelation.resize(d, max_lag + 1);
  std::vector<double> column(static_cast<std::size_t>(kept.rows()));
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < kept.rows(); ++i) column[static_cast<std::size_t>(i)] = kept(i, j);
    const Moments m = moments(column);
    s.mean(j) = m.mean;
    s.std(j) = std::sqrt(m.var);
    s.autocorrelation.row(j) = autocorrelation(column, max_lag).transpose();
    bool deg = false;
    s.ess(j) = effective_sample_size(column, &deg);
    s.degenerate = s.degenerate || deg;
  }
  return s;
}

void save_chain(const Chain& chain, const std::string& path) {
  std::vector<std::string> header;
  for (Eigen::Index j = 0; j < chain.states.cols(); ++j) header.push_back("theta_" + std::to_string(j));
  write_csv_matrix(path, header, chain.states);
  KeyValueDoc meta;
  meta.set("format", std::string("lfmc-chain-1"));
  meta.set("sampler", chain.sampler);
  meta.set("seed", std::to_string(chain.seed));
  meta.set("transitions", static_cast<std::int64_t>(chain.transitions()));
  meta.set("theta_dim", static_cast<std::int64_t>(chain.states.cols()));
  meta.set("acceptance_rate", chain.acceptance_rate());
  meta.set("step_sizes", chain.step_sizes);
  std::string flags(chain.accepted.size(), '0');
  for (std::size_t i = 0; i < chain.accepted.size(); ++i) flags[i] = chain.accepted[i] ? '1' : '0';
  meta.set("accepted", flags);
  meta.set("log_ratios", chain.log_ratios);
  meta.save(path + ".meta");
}

Chain load_chain(const std::string& path) {
  const KeyValueDoc meta = KeyValueDoc::load(path + ".meta");
  if (meta.get_or("format", "") != "lfmc-chain-1") throw IoError("'" + path + ".meta' is not a chain file");
  Chain c;
  c.states = read_csv_matrix(path);
  c.sampler = meta.get("sampler");
  c.seed = std::stoull(meta.get("seed"));
  c.step_sizes = meta.get_vector("step_sizes");
  const std::string flags = meta.get("accepted");
  c.accepted.reserve(flags.size());
  for (char f : flags) c.accepted.push_back(f == '1' ? 1 : 0);
  c.log_ratios = flags.empty() ? Vec() : meta.get_vector("log_ratios");
  if (c.states.rows() != c.transitions() + 1 || c.log_ratios.size() != c.transitions()) {
    throw IoError("'" + path + "': chain length disagrees with its metadata");
  }
  return c;
}

}  // namespace lfmc
