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

#include "insured/mechanism.hpp"

#include <stdexcept>

namespace insured {
namespace {

__extension__ typedef __int128 Wide;

Wide wide(Money m) { return static_cast<Wide>(m.micros()); }

std::int64_t scale_micros(std::int64_t micros, Ratio c, const char* field) {
  const Wide scaled = static_cast<Wide>(micros) * c.num;
  if (scaled % c.den != 0) {
    throw MoneyError(MoneyErrc::kRoundingForbidden,
                     std::string("scaling ") + field +
                         " produces a fractional micro-unit amount");
  }
  const Wide out = scaled / c.den;
  if (out > INT64_MAX || out < INT64_MIN) {
    throw MoneyError(MoneyErrc::kOverflow,
                     std::string("scaling ") + field + " overflows");
  }
  return static_cast<std::int64_t>(out);
}

Money scale(Money m, Ratio c, const char* field) {
  return Money::from_micros(scale_micros(m.micros(), c, field));
}

}  // namespace

ConditionReport check_conditions(const MechanismParams& p) {
  ConditionReport r;
  r.access_to_justice = 2 * wide(p.loss) + wide(p.bond) > wide(p.verifier_fee);
  r.solvency = wide(p.insurer_stake) >= wide(p.loss);
  r.deterrence = wide(p.agent_stake) + wide(p.future_value) > wide(p.gain);
  r.all_hold = r.access_to_justice && r.solvency && r.deterrence;
  return r;
}

MechanismParams scale_params(const MechanismParams& p, Ratio c) {
  if (c.num <= 0 || c.den <= 0) {
    throw std::invalid_argument("scale factor must be positive");
  }
  MechanismParams out;
  out.loss = scale(p.loss, c, "L");
  out.gain = scale(p.gain, c, "G");
  out.agent_stake = scale(p.agent_stake, c, "S_A");
  out.insurer_stake = scale(p.insurer_stake, c, "S_I");
  out.bond = scale(p.bond, c, "B");
  out.verifier_fee = scale(p.verifier_fee, c, "F");
  out.reputation_cost = scale(p.reputation_cost, c, "R");
  out.future_value = scale(p.future_value, c, "V_future");
  out.premium = scale(p.premium, c, "P");
  out.honest_payoff =
      SignedMoney(scale_micros(p.honest_payoff.micros(), c, "Pi_honest"));
  return out;
}

SignedMoney caught_deviation_payoff(const MechanismParams& p) {
  return SignedMoney(p.gain) - p.agent_stake - p.future_value;
}

}  // namespace insured
