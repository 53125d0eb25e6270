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

#ifndef INSURED_SWEEP_HPP_
#define INSURED_SWEEP_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "insured/sim.hpp"

namespace insured {

// Parameter keys, in CSV column order.
inline constexpr std::string_view kParamKeys[] = {"L", "G", "S_A", "S_I", "B",
                                                  "F", "R", "V_future", "P", "Pi_honest"};

struct GridAxis {
  std::string key;
  std::vector<SignedMoney> values;
};
using ParamGrid = std::vector<GridAxis>;

// "G=10,40;F=50,500" -> two axes. Throws std::invalid_argument on an unknown
// or repeated key, an empty axis, a malformed amount, or an empty grid.
ParamGrid parse_grid(std::string_view text);

// Sets one parameter by key. Throws std::invalid_argument for an unknown key
// or a negative value on a non-negative field.
void set_param(MechanismParams& params, std::string_view key, SignedMoney value);
SignedMoney get_param(const MechanismParams& params, std::string_view key);

// Cartesian product over the axes; the first axis varies slowest.
std::vector<MechanismParams> expand_grid(const MechanismParams& base, const ParamGrid& grid);

struct SweepRow {
  MechanismParams params;
  bool predicted = false;  // predict_honest_equilibrium
  double misbehavior_rate = 0.0;
  double dispute_rate = 0.0;
  std::int64_t verifier_invocations = 0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

// One scenario run per grid cell with the cell's parameters substituted.
// The parallel version runs cells on `jobs` threads (0 = OpenMP default) and
// returns rows in grid order; a failing cell rethrows the lowest-index error.
std::vector<SweepRow> sweep_serial(const ScenarioConfig& base, const ParamGrid& grid);
std::vector<SweepRow> sweep(const ScenarioConfig& base, const ParamGrid& grid, int jobs = 0);

// Header plus one LF-terminated line per row.
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

}  // namespace insured

#endif  // INSURED_SWEEP_HPP_
