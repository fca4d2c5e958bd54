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

#include "lfmc/samplers.hpp"

#include "lfmc/dataset.hpp"
#include "lfmc/errors.hpp"
#include "lfmc/io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

namespace lfmc {

ProposalConfig ProposalConfig::isotropic(int dim, double step) {
  ProposalConfig p;
  p.step_sizes = Vec::Constant(dim, step);
  return p;
}

ProposalConfig ProposalConfig::for_simulator(const Simulator& simulator) {
  if (simulator.name == "tractable") return isotropic(simulator.theta_dim, 0.5);
  if (simulator.name == "mg1") {
    ProposalConfig p;
    p.step_sizes = Vec(3);
    p.step_sizes << 0.5, 0.5, 0.05;
    return p;
  }
  if (simulator.name == "lotka_volterra") return isotropic(simulator.theta_dim, 0.25);
  if (simulator.name == "gaussian1d") return isotropic(1, 1.5);
  return isotropic(simulator.theta_dim, 0.5);
}

void ProposalConfig::validate(int dim) const {
  if (step_sizes.size() != dim) throw DimensionError("proposal: step_sizes has the wrong dimension");
  for (Eigen::Index i = 0; i < step_sizes.size(); ++i) {
    if (!(step_sizes(i) > 0.0) || !std::isfinite(step_sizes(i))) {
      throw ConfigError("proposal: step sizes must be positive and finite");
    }
  }
}

void HmcConfig::validate() const {
  if (leapfrog_steps < 1) throw ConfigError("hmc: leapfrog_steps must be >= 1");
  if (!(step_size > 0.0) || !std::isfinite(step_size)) throw ConfigError("hmc: step_size must be positive");
}

namespace {

std::string location(const Vec& theta, const std::string& context) {
  std::string s = "theta=(" + format_vector(theta) + ")";
  if (!context.empty()) s += " " + context;
  return s;
}

void check_start(const Prior& prior, const Vec& theta0, Eigen::Index steps) {
  if (theta0.size() != prior.dim()) throw DimensionError("sampler: theta0 has the wrong dimension");
  if (!prior.in_support(theta0)) throw ConfigError("sampler: theta0 lies outside the prior support");
  if (steps < 1) throw ConfigError("sampler: need at least one transition");
}

Chain start_chain(const Vec& theta0, Eigen::Index steps, const std::string& sampler, RngStream& rng) {
  Chain c;
  c.states.resize(steps + 1, theta0.size());
  c.states.row(0) = theta0.transpose();
  c.accepted.assign(static_cast<std::size_t>(steps), 0);
  c.log_ratios.resize(steps);
  c.sampler = sampler;
  c.seed = rng.seed();
  return c;
}

// Shared random-walk loop. With allow_zero_density, -inf values (zero likelihood)
// are rejections rather than errors.
Chain random_walk(const LogRatioFn& log_ratio, const Prior& prior, const ProposalConfig& proposal, const Vec& theta0,
                  Eigen::Index steps, RngStream& rng, const std::string& context, const std::string& sampler,
                  bool allow_zero_density) {
  check_start(prior, theta0, steps);
  proposal.validate(prior.dim());
  const double ninf = -std::numeric_limits<double>::infinity();
  auto evaluate = [&](const Vec& theta) {
    const double v = log_ratio(theta);
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity() || (!allow_zero_density && v == ninf)) {
      throw NumericalError(sampler + ": non-finite log ratio at " + location(theta, context));
    }
    return v;
  };

  Chain chain = start_chain(theta0, steps, sampler, rng);
  chain.step_sizes = proposal.step_sizes;
  Vec current = theta0;
  double current_lr = evaluate(current);
  if (current_lr == ninf) throw ConfigError(sampler + ": theta0 has zero likelihood");
  double current_lp = prior.log_density(current);
  Vec candidate(current.size());

  for (Eigen::Index t = 0; t < steps; ++t) {
    for (Eigen::Index j = 0; j < candidate.size(); ++j) candidate(j) = current(j) + proposal.step_sizes(j) * rng.normal();
    double lr = ninf;
    bool accept = false;
    if (prior.in_support(candidate)) {
      lr = evaluate(candidate);
      const double lp = prior.log_density(candidate);
      // The random walk is symmetric, so the proposal densities cancel.
      const double lambda = (lr + lp) - (current_lr + current_lp);
      accept = lambda >= 0.0 || std::log(rng.uniform()) < lambda;
      if (accept) {
        current = candidate;
        current_lr = lr;
        current_lp = lp;
      }
    }
    chain.accepted[static_cast<std::size_t>(t)] = accept ? 1 : 0;
    chain.log_ratios(t) = lr;
    chain.states.row(t + 1) = current.transpose();
  }
  return chain;
}

std::string observation_context(const Vec& x_o) { return "x=(" + format_vector(x_o) + ")"; }

}  // namespace

Chain lf_metropolis_hastings(const LogRatioFn& log_ratio, const Prior& prior, const ProposalConfig& proposal,
                             const Vec& theta0, Eigen::Index steps, RngStream& rng, const std::string& context) {
  return random_walk(log_ratio, prior, proposal, theta0, steps, rng, context, "lf_mh", false);
}

Chain lf_metropolis_hastings(const RatioModel& model, const Prior& prior, const ProposalConfig& proposal,
                             const Vec& x_o, const Vec& theta0, Eigen::Index steps, RngStream& rng) {
  if (x_o.size() != model.x_dim() || prior.dim() != model.theta_dim()) {
    throw DimensionError("lf_mh: model, prior and observation dimensions disagree");
  }
  return lf_metropolis_hastings([&](const Vec& theta) { return model.log_ratio(x_o, theta); }, prior, proposal, theta0,
                                steps, rng, observation_context(x_o));
}

Chain analytic_metropolis_hastings(const LogLikelihoodFn& log_likelihood, const Prior& prior,
                                   const ProposalConfig& proposal, const Vec& x_o, const Vec& theta0,
                                   Eigen::Index steps, RngStream& rng) {
  if (!log_likelihood) throw ConfigError("analytic_mh: no likelihood available");
  return random_walk([&](const Vec& theta) { return log_likelihood(theta, x_o); }, prior, proposal, theta0, steps,
                     rng, observation_context(x_o), "analytic_mh", true);
}

Chain lf_hmc(const LogRatioFn& log_ratio, const GradLogRatioFn& grad_log_ratio, const Prior& prior,
             const Vec& theta0, Eigen::Index steps, const HmcConfig& config, RngStream& rng,
             const std::string& context) {
  check_start(prior, theta0, steps);
  config.validate();
  const double ninf = -std::numeric_limits<double>::infinity();
  const double eta = config.step_size;

  auto value = [&](const Vec& theta) {
    const double v = log_ratio(theta);
    if (!std::isfinite(v)) throw NumericalError("lf_hmc: non-finite log ratio at " + location(theta, context));
    return v;
  };
  // Gradient of the log target, i.e. -grad U.
  auto force = [&](const Vec& theta) {
    Vec g = grad_log_ratio(theta) + prior.grad_log_density(theta);
    if (g.size() != theta.size() || !all_finite(g)) {
      throw NumericalError("lf_hmc: non-finite gradient at " + location(theta, context));
    }
    return g;
  };

  Chain chain = start_chain(theta0, steps, "lf_hmc", rng);
  chain.step_sizes = Vec(2);
  chain.step_sizes << eta, static_cast<double>(config.leapfrog_steps);
  Vec current = theta0;
  double current_log_target = value(current) + prior.log_density(current);
  Vec current_force = force(current);
  const Eigen::Index d = current.size();
  Vec momentum(d);

  for (Eigen::Index t = 0; t < steps; ++t) {
    for (Eigen::Index j = 0; j < d; ++j) momentum(j) = rng.normal();
    const double h0 = -current_log_target + 0.5 * momentum.squaredNorm();

    Vec theta = current;
    Vec f = current_force;
    Vec m = momentum + 0.5 * eta * f;
    bool inside = true;
    for (int i = 1; i <= config.leapfrog_steps; ++i) {
      theta += eta * m;
      if (!prior.in_support(theta)) {
        inside = false;
        break;
      }
      f = force(theta);
      m += (i < config.leapfrog_steps ? eta : 0.5 * eta) * f;
    }

    double lr = ninf;
    bool accept = false;
    if (inside) {
      lr = value(theta);
      const double log_target = lr + prior.log_density(theta);
      const double h1 = -log_target + 0.5 * m.squaredNorm();
      const double log_alpha = h0 - h1;
      accept = log_alpha >= 0.0 || std::log(rng.uniform()) < log_alpha;
      if (accept) {
        current = theta;
        current_log_target = log_target;
        current_force = f;
      }
    }
    chain.accepted[static_cast<std::size_t>(t)] = accept ? 1 : 0;
    chain.log_ratios(t) = lr;
    chain.states.row(t + 1) = current.transpose();
  }
  return chain;
}

Chain lf_hmc(const RatioModel& model, const Prior& prior, const Vec& x_o, const Vec& theta0, Eigen::Index steps,
             const HmcConfig& config, RngStream& rng) {
  if (x_o.size() != model.x_dim() || prior.dim() != model.theta_dim()) {
    throw DimensionError("lf_hmc: model, prior and observation dimensions disagree");
  }
  return lf_hmc([&](const Vec& theta) { return model.log_ratio(x_o, theta); },
                [&](const Vec& theta) { return model.grad_log_ratio_theta(x_o, theta); }, prior, theta0, steps, config,
                rng, observation_context(x_o));
}

std::vector<Chain> run_chains(const std::function<Chain(const Vec& theta0, RngStream& rng)>& run_one,
                              const Mat& theta0s, RngStream& rng, int workers) {
  const auto n = static_cast<std::size_t>(theta0s.rows());
  std::vector<Chain> chains(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        RngStream stream = rng.derive(i);
        chains[i] = run_one(theta0s.row(static_cast<Eigen::Index>(i)).transpose(), stream);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return chains;
}

Mat pool_chains(const std::vector<Chain>& chains, Eigen::Index burn_in, Eigen::Index thinning) {
  if (chains.empty()) throw ConfigError("pool_chains: no chains");
  std::vector<Mat> parts;
  Eigen::Index rows = 0;
  for (const Chain& c : chains) {
    parts.push_back(c.samples(burn_in, thinning));
    rows += parts.back().rows();
  }
  Mat out(rows, parts.front().cols());
  Eigen::Index at = 0;
  for (const Mat& p : parts) {
    out.middleRows(at, p.rows()) = p;
    at += p.rows();
  }
  return out;
}

AbcResult rejection_abc(const Simulator& simulator, const Prior& prior, const Vec& x_o, const DistanceFn& distance,
                        double eps_quantile, Eigen::Index budget, RngStream& rng, int workers) {
  if (budget < 1) throw ConfigError("rejection_abc: budget must be >= 1");
  if (!(eps_quantile > 0.0 && eps_quantile <= 1.0)) throw ConfigError("rejection_abc: eps_quantile must lie in (0, 1]");
  if (x_o.size() != simulator.x_dim) throw DimensionError("rejection_abc: observation has the wrong dimension");
  DatasetOptions options;
  options.workers = workers;
  // A single draw cannot form a dataset; simulate two and keep the first.
  const JointDataset draws = generate_joint_dataset(prior, simulator, std::max<Eigen::Index>(budget, 2), rng(), options);
  const Vec scale = draws.x_stats.std;

  Vec dist(budget);
  for (Eigen::Index i = 0; i < budget; ++i) {
    const Vec x = draws.xs.row(i).transpose();
    dist(i) = distance ? distance(x, x_o) : ((x - x_o).array() / scale.array()).matrix().norm();
  }
  auto keep = static_cast<Eigen::Index>(std::ceil(eps_quantile * static_cast<double>(budget) - 1e-9));
  keep = std::clamp<Eigen::Index>(keep, 1, budget);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(budget));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto less = [&](Eigen::Index a, Eigen::Index b) { return dist(a) < dist(b) || (dist(a) == dist(b) && a < b); };
  std::partial_sort(order.begin(), order.begin() + keep, order.end(), less);

  AbcResult r;
  r.accepted.resize(keep, draws.thetas.cols());
  r.distances.resize(keep);
  for (Eigen::Index i = 0; i < keep; ++i) {
    r.accepted.row(i) = draws.thetas.row(order[static_cast<std::size_t>(i)]);
    r.distances(i) = dist(order[static_cast<std::size_t>(i)]);
  }
  r.threshold = r.distances(keep - 1);
  r.simulated = budget;
  return r;
}

}  // namespace lfmc
