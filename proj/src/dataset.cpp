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

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lfmc {

namespace {

struct BlockResult {
  std::int64_t clamped = 0;
};

BlockResult fill_block(const Prior& prior, const Simulator& simulator, std::uint64_t seed, Eigen::Index block,
                       Eigen::Index begin, Eigen::Index end, int max_retries, Mat& thetas, Mat& xs) {
  RngStream rng = RngStream(seed).derive(static_cast<std::uint64_t>(block));
  BlockResult result;
  for (Eigen::Index row = begin; row < end; ++row) {
    const Vec theta = prior.sample(rng, 1).row(0).transpose();
    bool done = false;
    std::string last_error = "non-finite output";
    for (int attempt = 0; attempt <= max_retries && !done; ++attempt) {
      try {
        Simulation sim = simulator.simulate(theta, rng);
        if (sim.x.size() != xs.cols()) {
          throw DimensionError("simulator '" + simulator.name + "' returned " + std::to_string(sim.x.size()) +
                               " values, expected " + std::to_string(xs.cols()));
        }
        if (!sim.x.allFinite()) continue;
        thetas.row(row) = theta.transpose();
        xs.row(row) = sim.x.transpose();
        result.clamped += sim.clamped ? 1 : 0;
        done = true;
      } catch (const DimensionError&) {
        throw;
      } catch (const Error& e) {
        last_error = e.what();
      }
    }
    if (!done) {
      throw NumericalError("simulator '" + simulator.name + "' failed at theta = (" + format_vector(theta) +
                           ") after " + std::to_string(max_retries + 1) + " attempts: " + last_error);
    }
  }
  return result;
}

}  // namespace

void refresh_statistics(JointDataset& dataset) {
  dataset.theta_stats = Standardizer::fit(dataset.thetas);
  dataset.x_stats = Standardizer::fit(dataset.xs);
}

JointDataset generate_joint_dataset(const Prior& prior, const Simulator& simulator, Eigen::Index n,
                                    std::uint64_t seed, const DatasetOptions& options) {
  if (n < 2) throw ConfigError("generate_joint_dataset: need at least 2 rows");
  if (prior.dim() != simulator.theta_dim) throw DimensionError("generate_joint_dataset: prior/simulator dimension mismatch");
  if (options.block_rows < 1) throw ConfigError("generate_joint_dataset: block_rows must be positive");
  JointDataset ds;
  ds.thetas.resize(n, simulator.theta_dim);
  ds.xs.resize(n, simulator.x_dim);
  ds.simulator = simulator.name;
  ds.prior = prior.describe();
  ds.seed = seed;

  const Eigen::Index blocks = (n + options.block_rows - 1) / options.block_rows;
  std::vector<BlockResult> results(static_cast<std::size_t>(blocks));
  const int workers = std::max(1, std::min<int>(options.workers, static_cast<int>(blocks)));
  std::atomic<Eigen::Index> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    while (true) {
      const Eigen::Index b = next.fetch_add(1);
      if (b >= blocks) return;
      const Eigen::Index begin = b * options.block_rows;
      const Eigen::Index end = std::min(n, begin + options.block_rows);
      try {
        results[static_cast<std::size_t>(b)] =
            fill_block(prior, simulator, seed, b, begin, end, options.max_retries, ds.thetas, ds.xs);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(blocks);
        return;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  for (const auto& r : results) ds.clamped_rows += r.clamped;
  refresh_statistics(ds);
  return ds;
}

void save_dataset(const JointDataset& dataset, const std::string& prefix) {
  KeyValueDoc meta;
  meta.set("format", std::string("lfmc-dataset-1"));
  meta.set("rows", static_cast<std::int64_t>(dataset.size()));
  meta.set("theta_dim", static_cast<std::int64_t>(dataset.theta_dim()));
  meta.set("x_dim", static_cast<std::int64_t>(dataset.x_dim()));
  meta.set("simulator", dataset.simulator);
  meta.set("prior", dataset.prior);
  meta.set("seed", std::to_string(dataset.seed));
  meta.set("clamped_rows", dataset.clamped_rows);
  meta.set("theta_mean", dataset.theta_stats.mean);
  meta.set("theta_std", dataset.theta_stats.std);
  meta.set("x_mean", dataset.x_stats.mean);
  meta.set("x_std", dataset.x_stats.std);
  meta.set("thetas_file", prefix_basename(prefix) + ".thetas.bin");
  meta.set("xs_file", prefix_basename(prefix) + ".xs.bin");
  write_f64_block(prefix + ".thetas.bin", dataset.thetas);
  write_f64_block(prefix + ".xs.bin", dataset.xs);
  meta.save(prefix + ".meta");
}

JointDataset load_dataset(const std::string& prefix) {
  const KeyValueDoc meta = KeyValueDoc::load(prefix + ".meta");
  if (meta.get_or("format", "") != "lfmc-dataset-1") throw IoError("'" + prefix + ".meta' is not a dataset file");
  JointDataset ds;
  const Eigen::Index rows = meta.get_int("rows");
  const Eigen::Index theta_dim = meta.get_int("theta_dim");
  const Eigen::Index x_dim = meta.get_int("x_dim");
  ds.thetas = read_f64_block(prefix + ".thetas.bin", rows, theta_dim);
  ds.xs = read_f64_block(prefix + ".xs.bin", rows, x_dim);
  ds.simulator = meta.get("simulator");
  ds.prior = meta.get("prior");
  ds.seed = std::stoull(meta.get("seed"));
  ds.clamped_rows = meta.get_int("clamped_rows");
  ds.theta_stats = Standardizer{meta.get_vector("theta_mean"), meta.get_vector("theta_std")};
  ds.x_stats = Standardizer{meta.get_vector("x_mean"), meta.get_vector("x_std")};
  if (ds.theta_stats.dim() != theta_dim || ds.x_stats.dim() != x_dim) {
    throw IoError("'" + prefix + ".meta': standardizer dimensions disagree with shapes");
  }
  return ds;
}

}  // namespace lfmc
