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
#include "lfmc/diagnostics.hpp"
#include "lfmc/errors.hpp"
#include "lfmc/samplers.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace lfmc;

namespace {

bool all_in_support(const Chain& chain, const Prior& prior) {
  for (Eigen::Index i = 0; i < chain.states.rows(); ++i) {
    if (!prior.in_support(chain.states.row(i).transpose())) return false;
  }
  return true;
}

double column_std(const Mat& m, Eigen::Index j) {
  const double mean = m.col(j).mean();
  return std::sqrt((m.col(j).array() - mean).square().sum() / static_cast<double>(m.rows() - 1));
}

double gaussian1d_log_likelihood(const Vec& theta, const Vec& x) {
  return -0.5 * (x(0) - theta(0)) * (x(0) - theta(0)) - 0.5 * std::log(2.0 * std::numbers::pi);
}

}  // namespace

TEST_CASE("zero log ratio samples the prior") {
  const UniformBoxPrior prior(Vec::Constant(2, -5.0), Vec::Constant(2, 5.0));
  RngStream rng(1);
  const Chain chain = lf_metropolis_hastings([](const Vec&) { return 0.0; }, prior,
                                             ProposalConfig::isotropic(2, 2.0), Vec::Zero(2), 100000, rng);
  REQUIRE(chain.states.rows() == 100001);
  CHECK(chain.states.row(0).isZero(0.0));
  CHECK(all_in_support(chain, prior));
  // Every in-support proposal is accepted; out-of-support ones carry log r = -inf.
  bool consistent = true;
  for (Eigen::Index t = 0; t < chain.transitions(); ++t) {
    const bool outside = chain.log_ratios(t) == -std::numeric_limits<double>::infinity();
    consistent = consistent && (chain.accepted[static_cast<std::size_t>(t)] == (outside ? 0 : 1));
  }
  CHECK(consistent);

  RngStream fresh(2);
  const Mat prior_draws = prior.sample(fresh, 10000);
  RngStream disc(3);
  const double auc = two_sample_auc(chain.samples(default_burn_in(chain)), prior_draws, disc);
  MESSAGE("auc vs prior draws: " << auc);
  CHECK(auc < 0.55);
}

TEST_CASE("metropolis-hastings with the gaussian1d oracle") {
  const Simulator sim = make_simulator("gaussian1d");
  const Gaussian1dOracle oracle;
  RngStream rng(4);
  const Chain chain =
      lf_metropolis_hastings(oracle, *sim.prior, ProposalConfig::isotropic(1, 1.5), Vec::Zero(1), Vec::Zero(1), 100000, rng);
  CHECK(all_in_support(chain, *sim.prior));
  const ChainSummary s = chain_statistics(chain, default_burn_in(chain));
  CHECK(std::abs(s.mean(0)) < 0.05);
  CHECK(std::abs(s.std(0) - 1.0) < 0.05);
  CHECK(s.acceptance_rate > 0.2);
  CHECK(s.acceptance_rate < 0.8);
  CHECK(chain.sampler == "lf_mh");
}

TEST_CASE("plug-in equivalence of the oracle ratio and the exact likelihood") {
  const Simulator sim = make_simulator("gaussian1d");
  const Vec x_o = Vec::Constant(1, 1.2);
  const ProposalConfig q = ProposalConfig::isotropic(1, 1.5);
  RngStream r1(5), r2(6);
  const Chain lf = lf_metropolis_hastings(Gaussian1dOracle(), *sim.prior, q, x_o, Vec::Zero(1), 60000, r1);
  const Chain exact = analytic_metropolis_hastings(gaussian1d_log_likelihood, *sim.prior, q, x_o, Vec::Zero(1), 60000, r2);
  CHECK(exact.sampler == "analytic_mh");
  const ChainSummary se = chain_statistics(exact, default_burn_in(exact));
  CHECK(std::abs(se.mean(0) - 1.2) < 0.05);
  RngStream disc(7);
  const double auc = two_sample_auc(lf.samples(default_burn_in(lf)), exact.samples(default_burn_in(exact)), disc);
  MESSAGE("lf-mh vs analytic-mh auc: " << auc);
  CHECK(auc < 0.55);
}

TEST_CASE("analytic metropolis-hastings with a constant likelihood samples the prior") {
  const UniformBoxPrior prior(Vec::Zero(1), Vec::Constant(1, 2.0));
  RngStream rng(8);
  const Chain chain = analytic_metropolis_hastings([](const Vec&, const Vec&) { return -3.0; }, prior,
                                                   ProposalConfig::isotropic(1, 0.8), Vec::Zero(1), Vec::Constant(1, 1.0),
                                                   100000, rng);
  const ChainSummary s = chain_statistics(chain, default_burn_in(chain));
  CHECK(std::abs(s.mean(0) - 1.0) < 0.03);
  CHECK(std::abs(s.std(0) - 2.0 / std::sqrt(12.0)) < 0.03);
}

TEST_CASE("detailed balance on a two-state target") {
  // Piecewise-constant likelihood: mass 0.3 on [-1, 0) and 0.7 on [0, 1).
  const UniformBoxPrior prior(Vec::Constant(1, -1.0), Vec::Constant(1, 1.0));
  const auto loglik = [](const Vec& theta, const Vec&) { return theta(0) < 0.0 ? std::log(0.3) : std::log(0.7); };
  RngStream rng(9);
  const Chain chain =
      analytic_metropolis_hastings(loglik, prior, ProposalConfig::isotropic(1, 1.0), Vec::Zero(1), Vec::Constant(1, -0.5),
                                   1000000, rng);
  const double upper = (chain.states.col(0).array() >= 0.0).cast<double>().mean();
  CHECK(std::abs(upper - 0.7) < 0.01);
}

TEST_CASE("acceptance stays finite for extreme log-ratio differences") {
  const UniformBoxPrior prior(Vec::Constant(1, -1.0), Vec::Constant(1, 1.0));
  const auto cliff = [](const Vec& theta) { return theta(0) < 0.0 ? -700.0 : 0.0; };
  RngStream rng(10);
  const Chain up = lf_metropolis_hastings(cliff, prior, ProposalConfig::isotropic(1, 0.5), Vec::Constant(1, -0.5), 2000, rng);
  // Once on the plateau the chain never returns across a -700 drop.
  Eigen::Index first = -1;
  for (Eigen::Index i = 0; i < up.states.rows(); ++i) {
    if (up.states(i, 0) >= 0.0) {
      first = i;
      break;
    }
  }
  REQUIRE(first >= 0);
  CHECK((up.states.col(0).tail(up.states.rows() - first).array() >= 0.0).all());
  CHECK(up.states.allFinite());
}

TEST_CASE("non-finite estimator output aborts with the location") {
  const UniformBoxPrior prior(Vec::Constant(1, -1.0), Vec::Constant(1, 1.0));
  const FunctionRatio broken(1, 1, [](const Vec&, const Vec& t) {
    return t(0) > 0.5 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
  }, [](const Vec&, const Vec& t) { return Vec::Constant(1, t(0) > 0.5 ? std::numeric_limits<double>::quiet_NaN() : 0.0); });
  RngStream rng(11);
  try {
    lf_metropolis_hastings(broken, prior, ProposalConfig::isotropic(1, 0.5), Vec::Constant(1, 0.25), Vec::Zero(1), 5000, rng);
    FAIL("expected a NumericalError");
  } catch (const NumericalError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("theta") != std::string::npos);
    CHECK(msg.find("x") != std::string::npos);
  }
  CHECK_THROWS_AS(lf_hmc(broken, prior, Vec::Constant(1, 0.25), Vec::Zero(1), 5000, HmcConfig{10, 0.2}, rng),
                  NumericalError);
  CHECK_THROWS_AS(lf_metropolis_hastings([](const Vec&) { return 0.0; }, prior, ProposalConfig::isotropic(1, 0.5),
                                         Vec::Constant(1, 3.0), 10, rng),
                  ConfigError);
  CHECK_THROWS_AS(ProposalConfig::isotropic(1, -1.0).validate(1), ConfigError);
  CHECK_THROWS_AS((HmcConfig{0, 0.1}.validate()), ConfigError);
}

TEST_CASE("hmc on a harmonic target") {
  const UniformBoxPrior prior(Vec::Constant(1, -50.0), Vec::Constant(1, 50.0));
  RngStream rng(12);
  const Chain chain = lf_hmc([](const Vec& t) { return -0.5 * t.squaredNorm(); }, [](const Vec& t) -> Vec { return -t; },
                             prior, Vec::Zero(1), 10000, HmcConfig{10, 0.1}, rng);
  CHECK(chain.sampler == "lf_hmc");
  CHECK(chain.acceptance_rate() > 0.97);
  const ChainSummary s = chain_statistics(chain, 0);
  CHECK(std::abs(s.std(0) * s.std(0) - 1.0) < 0.05);
  CHECK(std::abs(s.mean(0)) < 0.05);
}

TEST_CASE("hmc with a zero logit accepts every in-support trajectory") {
  const UniformBoxPrior prior(Vec::Constant(2, -2.0), Vec::Constant(2, 2.0));
  const ConstantRatio zero(1, 2);
  RngStream rng(13);
  const Chain chain = lf_hmc(zero, prior, Vec::Zero(1), Vec::Zero(2), 5000, HmcConfig{10, 0.1}, rng);
  CHECK(all_in_support(chain, prior));
  bool consistent = true;
  Eigen::Index rejected = 0;
  for (Eigen::Index t = 0; t < chain.transitions(); ++t) {
    const bool outside = chain.log_ratios(t) == -std::numeric_limits<double>::infinity();
    if (!chain.accepted[static_cast<std::size_t>(t)]) ++rejected;
    consistent = consistent && (chain.accepted[static_cast<std::size_t>(t)] == (outside ? 0 : 1));
  }
  CHECK(consistent);
  CHECK(rejected > 0);  // some trajectories do leave the box
}

TEST_CASE("hmc and metropolis-hastings agree on the trained gaussian1d estimator") {
  const RatioEstimator& est = lfmc::testing::trained_gaussian1d();
  const Simulator sim = make_simulator("gaussian1d");
  const Vec x_o = Vec::Constant(1, -0.8);
  RngStream r1(14), r2(15);
  const Chain mh = lf_metropolis_hastings(est, *sim.prior, ProposalConfig::isotropic(1, 1.5), x_o, Vec::Zero(1), 40000, r1);
  const Chain hmc = lf_hmc(est, *sim.prior, x_o, Vec::Zero(1), 20000, HmcConfig{10, 0.15}, r2);
  CHECK(hmc.acceptance_rate() > 0.6);
  RngStream disc(16);
  const double auc = two_sample_auc(mh.samples(default_burn_in(mh)), hmc.samples(default_burn_in(hmc)), disc);
  MESSAGE("mh vs hmc auc: " << auc);
  CHECK(auc < 0.55);
}

TEST_CASE("tractable ground truth shows sign-symmetric modes") {
  const Simulator sim = make_simulator("tractable");
  RngStream xrng(17);
  const Vec x_o = simulate_tractable(sim.theta_star, xrng);

  // The likelihood only sees squares of theta_2 and theta_3.
  Vec flipped = sim.theta_star;
  flipped(2) = -flipped(2);
  flipped(3) = -flipped(3);
  CHECK(tractable_log_likelihood(flipped, x_o) == tractable_log_likelihood(sim.theta_star, x_o));

  RngStream rng(18);
  RngStream start_rng = rng.derive(100);
  const Mat starts = sim.prior->sample(start_rng, 40);
  const auto chains = run_chains(
      [&](const Vec& theta0, RngStream& r) {
        return analytic_metropolis_hastings(sim.log_likelihood, *sim.prior, ProposalConfig::isotropic(5, 0.5), x_o,
                                            theta0, 5000, r);
      },
      starts, rng);
  const Mat pooled = pool_chains(chains, 1000);
  for (Eigen::Index d : {2, 3}) {
    const double positive = (pooled.col(d).array() > 0.0).cast<double>().mean();
    MESSAGE("positive fraction theta_" << d << ": " << positive);
    CHECK(positive >= 0.3);
    CHECK(positive <= 0.7);
    // Mirror-image modes: |theta_d| has the same location on both sides.
    double pos_sum = 0.0, neg_sum = 0.0;
    Eigen::Index pos_n = 0, neg_n = 0;
    for (Eigen::Index i = 0; i < pooled.rows(); ++i) {
      if (pooled(i, d) > 0.0) {
        pos_sum += pooled(i, d);
        ++pos_n;
      } else {
        neg_sum -= pooled(i, d);
        ++neg_n;
      }
    }
    CHECK(std::abs(pos_sum / static_cast<double>(pos_n) - neg_sum / static_cast<double>(neg_n)) < 0.15);
  }
}

TEST_CASE("rejection abc") {
  const Simulator sim = make_simulator("gaussian1d");
  const Vec x_o = Vec::Constant(1, 0.7);
  RngStream rng(19);
  const AbcResult all = rejection_abc(sim, *sim.prior, x_o, {}, 1.0, 500, rng);
  CHECK(all.accepted.rows() == 500);
  CHECK(all.simulated == 500);

  const AbcResult tight = rejection_abc(sim, *sim.prior, x_o, {}, 0.001, 1000000, rng);
  REQUIRE(tight.accepted.rows() == 1000);
  CHECK(std::abs(tight.accepted.col(0).mean() - 0.7) < 0.1);
  CHECK(std::abs(column_std(tight.accepted, 0) - 1.0) < 0.15);
  for (Eigen::Index i = 1; i < tight.distances.size(); ++i) CHECK(tight.distances(i - 1) <= tight.distances(i));
  CHECK(tight.distances.maxCoeff() <= tight.threshold);
  CHECK_THROWS_AS(rejection_abc(sim, *sim.prior, x_o, {}, 0.0, 100, rng), ConfigError);
}

TEST_CASE("chain statistics") {
  Chain stuck;
  stuck.states = Mat::Constant(101, 2, 0.5);
  stuck.accepted.assign(100, 0);
  stuck.log_ratios = Vec::Zero(100);
  const ChainSummary s0 = chain_statistics(stuck, 0);
  CHECK(s0.acceptance_rate == 0.0);
  CHECK(s0.degenerate);
  CHECK(s0.ess(0) == 1.0);

  RngStream rng(20);
  Chain iid;
  iid.states.resize(20001, 1);
  for (Eigen::Index i = 0; i < iid.states.rows(); ++i) iid.states(i, 0) = rng.normal();
  iid.accepted.assign(20000, 1);
  iid.log_ratios = Vec::Zero(20000);
  const ChainSummary si = chain_statistics(iid, 1);
  CHECK(si.acceptance_rate == 1.0);
  CHECK(std::abs(si.autocorrelation(0, 1)) < 0.03);
  CHECK(si.autocorrelation(0, 0) == doctest::Approx(1.0));
  CHECK(std::abs(si.ess(0) / 20000.0 - 1.0) < 0.1);
  CHECK_FALSE(si.degenerate);

  Chain alternating;
  alternating.states.resize(1001, 1);
  for (Eigen::Index i = 0; i < alternating.states.rows(); ++i) alternating.states(i, 0) = (i % 2 == 0) ? 1.0 : -1.0;
  alternating.accepted.assign(1000, 1);
  alternating.log_ratios = Vec::Zero(1000);
  CHECK(chain_statistics(alternating, 0).autocorrelation(0, 1) == doctest::Approx(-1.0).epsilon(0.01));

  CHECK_THROWS(chain_statistics(iid, 20001));
  CHECK(iid.samples(1, 2).rows() == 10000);
}

TEST_CASE("parallel chains are reproducible and chain files round-trip") {
  const UniformBoxPrior prior(Vec::Constant(2, -1.0), Vec::Constant(2, 1.0));
  const auto run_one = [&](const Vec& theta0, RngStream& r) {
    return lf_metropolis_hastings([](const Vec& t) { return -t.squaredNorm(); }, prior, ProposalConfig::isotropic(2, 0.3),
                                  theta0, 500, r);
  };
  const Mat starts = Mat::Zero(4, 2);
  RngStream a(21), b(21);
  const auto serial = run_chains(run_one, starts, a, 1);
  const auto threaded = run_chains(run_one, starts, b, 3);
  REQUIRE(serial.size() == 4);
  for (std::size_t i = 0; i < serial.size(); ++i) CHECK(serial[i].states == threaded[i].states);
  CHECK(serial[0].states != serial[1].states);
  CHECK(pool_chains(serial, 100, 2).rows() == 4 * 201);

  const std::string path = lfmc::testing::temp_path("chain.csv");
  save_chain(serial[2], path);
  const Chain back = load_chain(path);
  CHECK(back.states == serial[2].states);
  CHECK(back.accepted == serial[2].accepted);
  CHECK(back.sampler == serial[2].sampler);
  CHECK(back.acceptance_rate() == serial[2].acceptance_rate());
}
