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

#include "lfmc/simulators.hpp"

#include "lfmc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace lfmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Vec make_vec(std::initializer_list<double> values) {
  Vec v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

void check_dim(const Vec& theta, Eigen::Index expected, const char* who) {
  if (theta.size() != expected) {
    throw DimensionError(std::string(who) + ": theta has " + std::to_string(theta.size()) + " entries, expected " +
                         std::to_string(expected));
  }
}

}  // namespace

void tractable_moments(const Vec& theta, Vec& mean, Mat& cov) {
  check_dim(theta, 5, "tractable");
  const double s1 = theta(2) * theta(2);
  const double s2 = theta(3) * theta(3);
  const double rho = std::tanh(theta(4));
  mean = theta.head(2);
  cov.resize(2, 2);
  cov << s1 * s1, rho * s1 * s2, rho * s1 * s2, s2 * s2;
}

Vec simulate_tractable(const Vec& theta, RngStream& rng) {
  Vec mean;
  Mat cov;
  tractable_moments(theta, mean, cov);
  const Mat l = cholesky_lower_psd(cov, 1e-12);
  Vec x(8);
  for (int i = 0; i < 4; ++i) {
    Vec z(2);
    z(0) = rng.normal();
    z(1) = rng.normal();
    x.segment(2 * i, 2) = mean + l * z;
  }
  return x;
}

double tractable_log_likelihood(const Vec& theta, const Vec& x) {
  check_dim(x, 8, "tractable_log_likelihood");
  Vec mean;
  Mat cov;
  tractable_moments(theta, mean, cov);
  const double s1 = std::sqrt(cov(0, 0));
  const double s2 = std::sqrt(cov(1, 1));
  const double rho = std::tanh(theta(4));
  if (!(s1 > 0.0) || !(s2 > 0.0) || !(std::abs(rho) < 1.0)) return kNegInf;
  const double one_minus_rho2 = 1.0 - rho * rho;
  const double log_norm = -std::log(2.0 * std::numbers::pi) - std::log(s1) - std::log(s2) - 0.5 * std::log(one_minus_rho2);
  double total = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double u = (x(2 * i) - mean(0)) / s1;
    const double v = (x(2 * i + 1) - mean(1)) / s2;
    const double q = (u * u - 2.0 * rho * u * v + v * v) / one_minus_rho2;
    total += log_norm - 0.5 * q;
  }
  return total;
}

double percentile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw DimensionError("percentile_sorted: empty data");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Vec simulate_mg1(const Vec& theta, RngStream& rng, const Mg1Config& config) {
  check_dim(theta, 3, "mg1");
  if (!(theta(2) > 0.0)) throw ConfigError("mg1: arrival rate must be positive");
  if (config.num_jobs < 1) throw ConfigError("mg1: need at least one job");
  const double service_low = std::min(theta(0), theta(1));
  const double service_high = std::max(theta(0), theta(1));
  std::vector<double> gaps(static_cast<std::size_t>(config.num_jobs));
  double arrival = 0.0;
  double last_departure = 0.0;
  for (auto& gap : gaps) {
    arrival += rng.exponential(theta(2));
    const double service = rng.uniform(service_low, service_high);
    // Interdeparture time = server idle time + service time; written this way it
    // equals the service time exactly whenever the queue is busy.
    const double idle = std::max(arrival - last_departure, 0.0);
    gap = idle + service;
    last_departure = std::max(arrival, last_departure) + service;
  }
  std::sort(gaps.begin(), gaps.end());
  Vec x(5);
  for (int k = 0; k < 5; ++k) x(k) = percentile_sorted(gaps, 0.25 * k);
  return x;
}

LotkaVolterraTrajectory simulate_lotka_volterra_trajectory(const Vec& log_rates, RngStream& rng,
                                                           const LotkaVolterraConfig& config) {
  check_dim(log_rates, 4, "lotka_volterra");
  if (!log_rates.allFinite()) throw NumericalError("lotka_volterra: non-finite log rates");
  const Vec rates = log_rates.array().exp();
  LotkaVolterraTrajectory out;
  out.series.resize(config.grid_points, 2);
  const double dt_grid = config.horizon / static_cast<double>(config.grid_points - 1);

  double predators = config.initial_predators;
  double prey = config.initial_prey;
  double t = 0.0;
  int next_grid = 0;
  auto record_until = [&](double time) {
    while (next_grid < config.grid_points && static_cast<double>(next_grid) * dt_grid <= time) {
      out.series(next_grid, 0) = predators;
      out.series(next_grid, 1) = prey;
      ++next_grid;
    }
  };

  while (next_grid < config.grid_points) {
    const double a1 = rates(0) * predators * prey;
    const double a2 = rates(1) * predators;
    const double a3 = rates(2) * prey;
    const double a4 = rates(3) * predators * prey;
    const double total = a1 + a2 + a3 + a4;
    if (!(total > 0.0)) break;  // absorbing state
    const double wait = rng.exponential(total);
    record_until(t + wait);  // grid points before the jump see the current state
    t += wait;
    if (next_grid >= config.grid_points) break;
    const double u = rng.uniform() * total;
    if (u < a1) {
      predators += 1.0;
    } else if (u < a1 + a2) {
      predators -= 1.0;
    } else if (u < a1 + a2 + a3) {
      prey += 1.0;
    } else {
      prey -= 1.0;
    }
    ++out.events;
    if (out.events >= config.max_events || predators > config.max_population || prey > config.max_population) {
      out.clamped = true;
      break;
    }
  }
  // Remaining grid points hold the last state.
  record_until(std::numeric_limits<double>::infinity());
  return out;
}

Vec lotka_volterra_summary(const Mat& series, double zero_variance) {
  if (series.cols() != 2 || series.rows() < 3) throw DimensionError("lotka_volterra_summary: expected n x 2 series");
  const Eigen::Index n = series.rows();
  Vec out(9);
  Vec centered[2];
  double var[2];
  for (int s = 0; s < 2; ++s) {
    const double mean = series.col(s).mean();
    centered[s] = series.col(s).array() - mean;
    var[s] = centered[s].squaredNorm() / static_cast<double>(n);
    out(4 * s) = mean;
    out(4 * s + 1) = std::log(var[s] + 1.0);
    for (int lag = 1; lag <= 2; ++lag) {
      double ac = 0.0;
      if (var[s] >= zero_variance) {
        const double num = centered[s].head(n - lag).dot(centered[s].tail(n - lag));
        ac = num / centered[s].squaredNorm();
      }
      out(4 * s + 1 + lag) = ac;
    }
  }
  double cross = 0.0;
  if (var[0] >= zero_variance && var[1] >= zero_variance) {
    cross = centered[0].dot(centered[1]) / std::sqrt(centered[0].squaredNorm() * centered[1].squaredNorm());
  }
  out(8) = cross;
  return out;
}

Simulation simulate_lotka_volterra(const Vec& log_rates, RngStream& rng, const LotkaVolterraConfig& config) {
  const auto traj = simulate_lotka_volterra_trajectory(log_rates, rng, config);
  return Simulation{lotka_volterra_summary(traj.series, config.zero_variance), traj.clamped};
}

double simulate_gaussian1d(double theta, RngStream& rng) { return theta + rng.normal(); }

namespace {

// log Q(z), Q the standard normal upper tail.
double log_upper_tail(double z) {
  const double q = 0.5 * std::erfc(z / std::numbers::sqrt2);
  if (q > 0.0) return std::log(q);
  // Mills-ratio asymptotics once erfc underflows.
  return -0.5 * z * z - std::log(z) - 0.5 * std::log(2.0 * std::numbers::pi);
}

}  // namespace

double gaussian1d_log_marginal(double x) {
  // p(x) = (Phi(x + w) - Phi(x - w)) / (2w). Use the tail on the far side for accuracy.
  const double w = kGaussian1dPriorHalfWidth;
  const double a = std::abs(x);
  // Phi(a + w) - Phi(a - w) = Q(a - w) - Q(a + w), symmetric in x.
  const double log_q_near = log_upper_tail(a - w);
  const double log_q_far = log_upper_tail(a + w);
  const double log_diff = log_q_near + std::log1p(-std::exp(log_q_far - log_q_near));
  return log_diff - std::log(2.0 * w);
}

double gaussian1d_log_ratio(double x, double theta) {
  return log_normal_pdf(x, theta, 1.0) - gaussian1d_log_marginal(x);
}

double simulate_two_gaussians(int model, RngStream& rng) {
  if (model != 0 && model != 1) throw ConfigError("two_gaussians: model index must be 0 or 1");
  return kTwoGaussiansShift * model + rng.normal();
}

std::vector<std::string> simulator_names() {
  return {"tractable", "mg1", "lotka_volterra", "gaussian1d", "two_gaussians"};
}

Simulator make_simulator(const std::string& name) {
  Simulator sim;
  sim.name = name;
  if (name == "tractable") {
    sim.theta_dim = 5;
    sim.x_dim = 8;
    sim.prior = std::make_shared<UniformBoxPrior>(Vec::Constant(5, -3.0), Vec::Constant(5, 3.0));
    sim.theta_star = make_vec({0.7, -2.9, -1.0, -0.9, 0.6});
    sim.simulate = [](const Vec& theta, RngStream& rng) { return Simulation{simulate_tractable(theta, rng)}; };
    sim.log_likelihood = tractable_log_likelihood;
  } else if (name == "mg1") {
    sim.theta_dim = 3;
    sim.x_dim = 5;
    sim.prior = std::make_shared<UniformBoxPrior>(make_vec({0.0, 0.0, 0.0}), make_vec({10.0, 10.0, 0.333}));
    sim.theta_star = make_vec({1.0, 5.0, 0.2});
    sim.simulate = [](const Vec& theta, RngStream& rng) { return Simulation{simulate_mg1(theta, rng)}; };
  } else if (name == "lotka_volterra") {
    sim.theta_dim = 4;
    sim.x_dim = 9;
    sim.prior = std::make_shared<UniformBoxPrior>(Vec::Constant(4, -10.0), Vec::Constant(4, 2.0));
    sim.theta_star = make_vec({-4.61, -0.69, 0.0, -4.61});
    sim.simulate = [](const Vec& theta, RngStream& rng) { return simulate_lotka_volterra(theta, rng); };
  } else if (name == "gaussian1d") {
    sim.theta_dim = 1;
    sim.x_dim = 1;
    sim.prior = std::make_shared<UniformBoxPrior>(Vec::Constant(1, -kGaussian1dPriorHalfWidth),
                                                  Vec::Constant(1, kGaussian1dPriorHalfWidth));
    sim.theta_star = Vec::Zero(1);
    sim.simulate = [](const Vec& theta, RngStream& rng) {
      return Simulation{Vec::Constant(1, simulate_gaussian1d(theta(0), rng))};
    };
    sim.log_likelihood = [](const Vec& theta, const Vec& x) { return log_normal_pdf(x(0), theta(0), 1.0); };
  } else if (name == "two_gaussians") {
    sim.theta_dim = 1;
    sim.x_dim = 1;
    sim.prior = std::make_shared<CategoricalPrior>(make_vec({0.5, 0.5}));
    sim.theta_star = Vec::Ones(1);
    sim.simulate = [](const Vec& theta, RngStream& rng) {
      return Simulation{Vec::Constant(1, simulate_two_gaussians(static_cast<int>(theta(0)), rng))};
    };
    sim.log_likelihood = [](const Vec& theta, const Vec& x) {
      return log_normal_pdf(x(0), kTwoGaussiansShift * theta(0), 1.0);
    };
  } else {
    throw ConfigError("unknown simulator '" + name + "'");
  }
  return sim;
}

}  // namespace lfmc
