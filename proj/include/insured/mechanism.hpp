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

#ifndef INSURED_MECHANISM_HPP_
#define INSURED_MECHANISM_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

#include "insured/money.hpp"

namespace insured {

// Money-valued parameters of one insured interaction.
struct MechanismParams {
  Money loss;              // L: harm to the user when the agent misbehaves
  Money gain;              // G: agent's one-shot gain from misbehaving
  Money agent_stake;       // S_A: deductible the agent locks with the insurer
  Money insurer_stake;     // S_I: slashable stake the insurer posts
  Money bond;              // B: escalation bond, posted by both disputants
  Money verifier_fee;      // F: fee charged when the verifier is called
  Money reputation_cost;   // R: insurer penalty for denying a valid claim
  Money future_value;      // V_future: agent's discounted future business
  Money premium;           // P
  SignedMoney honest_payoff;  // Pi_honest: agent's honest-path payoff

  friend bool operator==(const MechanismParams&, const MechanismParams&) = default;
};

struct ConditionReport {
  bool access_to_justice = false;  // 2L + B > F
  bool solvency = false;           // S_I >= L
  bool deterrence = false;         // S_A + V_future > G
  bool all_hold = false;

  friend bool operator==(const ConditionReport&, const ConditionReport&) = default;
};

// Evaluates the three equilibrium conditions. Comparisons are done in 128-bit
// arithmetic so the predicate is total on every valid parameter set.
ConditionReport check_conditions(const MechanismParams& params);

// Positive rational scale factor num/den.
struct Ratio {
  std::int64_t num = 1;
  std::int64_t den = 1;
};

// Multiplies every money field by c exactly. Throws MoneyError with
// kRoundingForbidden when any field would become fractional in micro-units,
// and std::invalid_argument when c <= 0.
MechanismParams scale_params(const MechanismParams& params, Ratio c);

// The deviation payoff of a caught misbehaving agent: G - S_A - V_future.
SignedMoney caught_deviation_payoff(const MechanismParams& params);

}  // namespace insured

#endif  // INSURED_MECHANISM_HPP_
