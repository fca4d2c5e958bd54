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

#ifndef LFMC_CLI_HPP
#define LFMC_CLI_HPP

namespace lfmc {

// Process exit statuses.
enum ExitCode : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitUsage = 2,
  kExitIo = 3,
  kExitDiagnostic = 4,
  kExitNumerical = 5,
};

/// Entry point of the `lfmc` tool; returns the process exit status.
int run_cli(int argc, char** argv);

}  // namespace lfmc

#endif  // LFMC_CLI_HPP
