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

#ifndef LFMC_RANDOM_HPP
#define LFMC_RANDOM_HPP

#include <cstdint>
#include <random>

namespace lfmc {

/// A reproducible random stream identified by (seed, stream_id).
///
/// Streams with equal identifiers produce bit-identical sequences. Child
/// streams obtained through derive() are seeded from a SplitMix64 mix of the
/// parent identifiers, so workers and subcommands can split one user seed into
/// independent streams without coordination.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  RngStream derive(std::uint64_t child) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  result_type operator()() { return engine_(); }
  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }

  double uniform();  // [0, 1)
  double uniform(double low, double high);
  double normal();
  double exponential(double rate);
  std::size_t index(std::size_t n);  // uniform on {0, ..., n-1}

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace lfmc

#endif  // LFMC_RANDOM_HPP
