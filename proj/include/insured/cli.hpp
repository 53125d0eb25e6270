// Copyright 2026 The Insured Agents Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef INSURED_CLI_HPP_
#define INSURED_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace insured {

// Exit status contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNegative = 1;  // conditions fail, oracle mismatch
inline constexpr int kExitUsage = 2;     // bad flags or unreadable input

// Environment variable supplying the default --jobs for sweep.
inline constexpr const char* kJobsEnv = "INSURED_JOBS";

// Runs the `insured` command line. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace insured

#endif  // INSURED_CLI_HPP_
