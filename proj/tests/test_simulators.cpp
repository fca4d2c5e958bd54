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

#include "lfmc/dataset.hpp"
#include "lfmc/errors.hpp"
#include "lfmc/io.hpp"
#include "lfmc/prior.hpp"
#include "lfmc/simulators.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

using namespace lfmc;

namespace {

std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "lfmc_tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

}  // namespace

TEST_CASE("uniform box prior") {
  UniformBoxPrior unit(Vec::Zero(1), Vec::Ones(1));
  RngStream r(1);
  const Mat s = unit.sample(r, 1000);
  CHECK(s.minCoeff() >= 0.0);
  CHECK(s.maxCoeff() <= 1.0);
  CHECK(std::abs(s.mean() - 0.5) < 0.05);

  UniformBoxPrior box(Vec::Constant(5, -3), Vec::Constant(5, 3));
  CHECK(box.log_density(Vec::Zero(5)) == doctest::Approx(-8.958797346140274).epsilon(1e-14));
  Vec out = Vec::Zero(5);
  out(0) = 4;
  CHECK(box.log_density(out) == -std::numeric_limits<double>::infinity());
  CHECK_FALSE(box.in_support(out));

  const Mat big = box.sample(r, 100000);
  for (Eigen::Index j = 0; j < 5; ++j) {
    const double mean = big.col(j).mean();
    const double var = (big.col(j).array() - mean).square().mean();
    CHECK(std::abs(var - 3.0) < 0.3);
  }
  CHECK_THROWS_AS(UniformBoxPrior(Vec::Ones(1), Vec::Ones(1)), ConfigError);
  const auto parsed = parse_prior(box.describe());
  CHECK(parsed->describe() == box.describe());
}

TEST_CASE("categorical prior") {
  CategoricalPrior degenerate(Vec::Unit(2, 0));
  RngStream r(2);
  CHECK((degenerate.sample(r, 100).array() == 0.0).all());
  CategoricalPrior uniform(Vec::Constant(10, 0.1));
  CHECK(uniform.log_density(Vec::Constant(1, 3)) == doctest::Approx(-2.302585092994046));
  CHECK(uniform.log_density(Vec::Constant(1, 10)) == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(CategoricalPrior(Vec::Constant(2, 0.4)), ConfigError);
  CHECK(parse_prior(uniform.describe())->describe() == uniform.describe());
}

TEST_CASE("tractable simulator") {
  RngStream r(3);
  CHECK(simulate_tractable(Vec::Zero(5), r).isZero(0.0));
  const Simulator sim = make_simulator("tractable");
  Vec mean;
  Mat cov;
  tractable_moments(sim.theta_star, mean, cov);
  CHECK(mean(0) == 0.7);
  CHECK(mean(1) == -2.9);
  CHECK(cov(0, 0) == doctest::Approx(1.0));          // s1^2 with s1 = 1
  CHECK(cov(1, 1) == doctest::Approx(0.81 * 0.81));  // s2 = 0.81
  CHECK(cov(0, 1) == doctest::Approx(0.5370495669980352 * 0.81));

  // Empirical covariance of 10^5 draws (4 blocks each).
  Mat blocks(400000, 2);
  for (int i = 0; i < 100000; ++i) {
    const Vec x = simulate_tractable(sim.theta_star, r);
    for (int k = 0; k < 4; ++k) blocks.row(4 * i + k) << x(2 * k), x(2 * k + 1);
  }
  const Vec m = blocks.colwise().mean();
  const Mat centered = blocks.rowwise() - m.transpose();
  const Mat emp = centered.transpose() * centered / static_cast<double>(blocks.rows());
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(m(i) - mean(i)) < 0.01);
    for (int j = 0; j < 2; ++j) CHECK(std::abs(emp(i, j) - cov(i, j)) < 0.03 * std::abs(cov(i, j)));
  }
}

TEST_CASE("tractable likelihood") {
  Vec theta(5);
  theta << 0.3, -0.2, 1.0, 1.0, 0.0;
  Vec x(8);
  for (int k = 0; k < 4; ++k) x.segment(2 * k, 2) << 0.3, -0.2;
  CHECK(tractable_log_likelihood(theta, x) == doctest::Approx(-7.351508265637381).epsilon(1e-13));
  CHECK(tractable_log_likelihood(Vec::Zero(5), x) == -std::numeric_limits<double>::infinity());

  // One block integrates to one: quadrature of exp(loglik) with three blocks pinned
  // at the mean (each contributing 1/(2 pi |Sigma|^(1/2))).
  Vec t(5);
  t << 0.0, 0.0, 1.1, 0.8, 0.4;
  Vec mean;
  Mat cov;
  tractable_moments(t, mean, cov);
  const double pinned = 3.0 * (-std::log(2 * std::numbers::pi) - 0.5 * std::log(cov.determinant()));
  double integral = 0.0;
  const double h = 0.02;
  for (double a = -8; a < 8; a += h) {
    for (double b = -6; b < 6; b += h) {
      Vec y = Vec::Zero(8);
      y(0) = a + h / 2;
      y(1) = b + h / 2;
      integral += std::exp(tractable_log_likelihood(t, y) - pinned) * h * h;
    }
  }
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-4));

  // Moving away from the mean lowers the likelihood.
  Vec base = Vec::Zero(8);
  double prev = tractable_log_likelihood(t, base);
  for (int step = 1; step < 10; ++step) {
    Vec y = base;
    y(0) = 0.3 * step;
    y(1) = -0.2 * step;
    const double ll = tractable_log_likelihood(t, y);
    CHECK(ll < prev);
    prev = ll;
  }
}

TEST_CASE("mg1 simulator") {
  RngStream r(4);
  Vec theta(3);
  theta << 2.0, 2.0, 10.0;
  const Vec x = simulate_mg1(theta, r);
  for (int i = 0; i < 4; ++i) CHECK(x(i) == 2.0);
  CHECK(x(4) > 2.0);
  const Simulator sim = make_simulator("mg1");
  for (int i = 0; i < 200; ++i) {
    const Vec t = sim.prior->sample(r, 1).row(0).transpose();
    const Vec p = simulate_mg1(t, r);
    for (int k = 0; k < 4; ++k) CHECK(p(k) <= p(k + 1));
    CHECK(p(0) >= 0.0);
  }
  double median = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Vec p = simulate_mg1(sim.theta_star, r);
    CHECK(p(0) >= 1.0);
    median += p(2) / 200;
  }
  CHECK(median > 2.5);
  CHECK(median < 5.0);
  Vec swapped(3);
  swapped << 5.0, 1.0, 0.2;
  RngStream r1(9), r2(9);
  CHECK(simulate_mg1(swapped, r1) == simulate_mg1(sim.theta_star, r2));
  Vec bad(3);
  bad << 1.0, 2.0, 0.0;
  CHECK_THROWS_AS(simulate_mg1(bad, r), ConfigError);
  CHECK(percentile_sorted({1.0, 2.0, 3.0, 4.0}, 0.5) == 2.5);
}

TEST_CASE("lotka-volterra simulator") {
  RngStream r(5);
  // Rates of exp(-20) make an event before T = 30 vanishingly unlikely (about 3e-4
  // expected events); exp(-10) would still fire about 14 events through the X*Y reactions.
  const Simulation frozen = simulate_lotka_volterra(Vec::Constant(4, -20.0), r);
  Vec expected(9);
  expected << 50, 0, 0, 0, 100, 0, 0, 0, 0;
  CHECK(frozen.x == expected);

  const Simulator sim = make_simulator("lotka_volterra");
  int oscillating = 0;
  for (int seed = 0; seed < 100; ++seed) {
    RngStream s(1000 + seed);
    const LotkaVolterraTrajectory traj = simulate_lotka_volterra_trajectory(sim.theta_star, s);
    CHECK(traj.series.minCoeff() >= 0.0);
    const Vec x = lotka_volterra_summary(traj.series);
    CHECK(all_finite(x));
    for (int k : {2, 3, 6, 7, 8}) CHECK(std::abs(x(k)) <= 1.0);
    if (x(2) > 0.5 && x(6) > 0.5) ++oscillating;
  }
  CHECK(oscillating >= 80);

  for (int i = 0; i < 30; ++i) {
    const Vec t = sim.prior->sample(r, 1).row(0).transpose();
    const Simulation s = simulate_lotka_volterra(t, r);
    CHECK(all_finite(s.x));
  }
}

TEST_CASE("gaussian1d oracle") {
  // Independent evaluation of log N(0; 0, 1) - log[(Phi(5) - Phi(-5)) / 10].
  CHECK(gaussian1d_log_ratio(0.0, 0.0) == doctest::Approx(1.3836471330926812).epsilon(1e-12));
  RngStream r(6);
  double mean = 0.0;
  for (int i = 0; i < 100000; ++i) mean += simulate_gaussian1d(2.0, r) / 100000;
  CHECK(std::abs(mean - 2.0) < 0.01);

  // E_{p(x)}[r(x | theta)] = 1 for theta in the support.
  const Simulator sim = make_simulator("gaussian1d");
  for (double theta : {-4.0, 0.0, 2.5}) {
    const int n = 200000;
    double sum = 0.0;
    double sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double t = r.uniform(-5.0, 5.0);
      const double x = simulate_gaussian1d(t, r);
      const double w = std::exp(gaussian1d_log_ratio(x, theta));
      sum += w;
      sum2 += w * w;
    }
    const double m = sum / n;
    const double se = std::sqrt((sum2 / n - m * m) / n);
    CHECK(std::abs(m - 1.0) < 3 * se);
  }
  CHECK(std::isfinite(gaussian1d_log_ratio(40.0, 4.0)));
}

TEST_CASE("joint dataset generation and files") {
  const Simulator sim = make_simulator("tractable");
  const JointDataset a = generate_joint_dataset(*sim.prior, sim, 3000, 7);
  DatasetOptions parallel;
  parallel.workers = 3;
  const JointDataset b = generate_joint_dataset(*sim.prior, sim, 3000, 7, parallel);
  CHECK(a.thetas == b.thetas);
  CHECK(a.xs == b.xs);
  for (Eigen::Index i = 0; i < a.size(); ++i) CHECK(sim.prior->in_support(a.thetas.row(i).transpose()));
  for (Eigen::Index j = 0; j < a.x_dim(); ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) s += a.xs(i, j);
    CHECK(a.x_stats.mean(j) == s / static_cast<double>(a.size()));
  }
  CHECK((a.x_stats.std.array() > 0).all());

  const std::string prefix = temp_path("dataset");
  save_dataset(a, prefix);
  const JointDataset c = load_dataset(prefix);
  CHECK(c.thetas == a.thetas);
  CHECK(c.xs == a.xs);
  CHECK(c.x_stats.std == a.x_stats.std);
  CHECK(c.simulator == "tractable");
  CHECK(c.seed == 7);
  const std::string meta = read_text_file(prefix + ".meta");
  save_dataset(c, prefix);
  CHECK(read_text_file(prefix + ".meta") == meta);

  CHECK_THROWS_AS(load_dataset(temp_path("missing")), IoError);
  CHECK_THROWS_AS(make_simulator("nope"), ConfigError);
}

TEST_CASE("dataset generation retries failing simulations") {
  Simulator flaky = make_simulator("gaussian1d");
  int calls = 0;
  flaky.simulate = [&calls](const Vec& theta, RngStream& rng) {
    ++calls;
    Simulation s;
    s.x = Vec::Constant(1, calls % 3 == 0 ? std::nan("") : theta(0) + rng.normal());
    return s;
  };
  const JointDataset d = generate_joint_dataset(*flaky.prior, flaky, 100, 1);
  CHECK(all_finite(d.xs));

  Simulator broken = flaky;
  broken.simulate = [](const Vec&, RngStream&) { return Simulation{Vec::Constant(1, std::nan("")), false}; };
  CHECK_THROWS_WITH_AS(generate_joint_dataset(*broken.prior, broken, 10, 1), doctest::Contains("theta"),
                       NumericalError);
}

TEST_CASE("key value documents and number formatting round-trip") {
  for (double v : {0.1, -1e-300, 1.0 / 3.0, 6.02214076e23, 0.0}) CHECK(parse_double(format_double(v)) == v);
  CHECK(std::isinf(parse_double(format_double(-std::numeric_limits<double>::infinity()))));
  KeyValueDoc doc;
  doc.set("name", std::string("x"));
  doc.set("vec", Vec::LinSpaced(3, 0.1, 0.3));
  const KeyValueDoc back = KeyValueDoc::parse("# comment\n" + doc.to_string());
  CHECK(back.to_string() == doc.to_string());
  CHECK(back.get_vector("vec") == Vec::LinSpaced(3, 0.1, 0.3));
  CHECK_THROWS_AS(back.get("missing"), IoError);
}
