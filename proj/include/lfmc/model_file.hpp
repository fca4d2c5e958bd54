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

#ifndef LFMC_MODEL_FILE_HPP
#define LFMC_MODEL_FILE_HPP

#include "lfmc/ratio.hpp"

#include <memory>
#include <string>

namespace lfmc {

// Files: <prefix>.meta (architecture, standardizers, provenance) and, for network
// models, <prefix>.weights.bin (all layers' weights then biases, float64 LE).
// Supported kinds: mlp, mlp_reference, gaussian1d_oracle, constant.

void save_model(const RatioModel& model, const std::string& prefix);
std::shared_ptr<const RatioModel> load_model(const std::string& prefix);

/// Builds a model from a kind name without a file: "gaussian1d_oracle" or
/// "constant[:x_dim:theta_dim[:value]]".
std::shared_ptr<const RatioModel> make_builtin_model(const std::string& spec);

}  // namespace lfmc

#endif  // LFMC_MODEL_FILE_HPP
