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

// Parameter fixtures and random draws shared by the unit and acceptance tests.

#ifndef INSURED_TESTS_SUPPORT_DRAWS_HPP_
#define INSURED_TESTS_SUPPORT_DRAWS_HPP_

#include <algorithm>
#include <cstdint>

#include "insured/mechanism.hpp"
#include "insured/rng.hpp"

namespace insured::testing {

// L=100 G=40 S_A=30 S_I=150 B=20 F=50 R=10 V_future=20 P=8 Pi_honest=5.
inline MechanismParams base_params() {
  MechanismParams p;
  p.loss = Money::units(100);
  p.gain = Money::units(40);
  p.agent_stake = Money::units(30);
  p.insurer_stake = Money::units(150);
  p.bond = Money::units(20);
  p.verifier_fee = Money::units(50);
  p.reputation_cost = Money::units(10);
  p.future_value = Money::units(20);
  p.premium = Money::units(8);
  p.honest_payoff = SignedMoney::units(5);
  return p;
}

// Amounts are drawn in micro-units up to kSpan so fractional values appear.
inline constexpr std::int64_t kSpan = 1000 * kMicrosPerUnit;

class ParamDraws {
 public:
  explicit ParamDraws(std::uint64_t seed, std::uint64_t stream = 0)
      : rng_(Rng::for_stream(seed, stream)) {}

  Money money(std::int64_t lo, std::int64_t hi) {
    return Money::from_micros(rng_.uniform_int(lo, hi));
  }
  Money money() { return money(0, kSpan); }

  // No constraint at all.
  MechanismParams unconstrained() {
    MechanismParams p;
    p.loss = money(1, kSpan);
    p.gain = money();
    p.agent_stake = money();
    p.insurer_stake = money();
    p.bond = money(0, kSpan / 5);
    p.verifier_fee = money(0, 3 * kSpan);
    p.reputation_cost = money(0, kSpan / 5);
    p.future_value = money();
    p.premium = money(0, kSpan / 5);
    p.honest_payoff = SignedMoney(rng_.uniform_int(-kSpan / 2, kSpan));
    return p;
  }

  // All three conditions strict, and Pi_honest > G - S_A - V_future.
  MechanismParams all_hold() {
    MechanismParams p = unconstrained();
    solvent(p);
    just(p);
    deterred(p);
    honest_beats_deviation(p);
    return p;
  }

  // Only deterrence fails, with G - S_A - V_future > max(0, Pi_honest).
  MechanismParams deterrence_violated() {
    MechanismParams p = unconstrained();
    solvent(p);
    just(p);
    p.agent_stake = money(0, kSpan / 2);
    p.future_value = money(0, kSpan / 2);
    const std::int64_t margin = rng_.uniform_int(1, kSpan);
    p.gain = Money::from_micros(p.agent_stake.micros() + p.future_value.micros() + margin);
    p.honest_payoff = SignedMoney(rng_.uniform_int(-kSpan / 2, margin - 1));
    return p;
  }

  // Only access to justice fails (2L + B <= F).
  MechanismParams access_violated() {
    MechanismParams p = unconstrained();
    solvent(p);
    deterred(p);
    honest_beats_deviation(p);
    const std::int64_t floor = 2 * p.loss.micros() + p.bond.micros();
    p.verifier_fee = Money::from_micros(floor + rng_.uniform_int(0, kSpan));
    return p;
  }

  Rng& rng() { return rng_; }

 private:
  void solvent(MechanismParams& p) {
    p.insurer_stake = Money::from_micros(p.loss.micros() + rng_.uniform_int(0, kSpan));
  }
  void just(MechanismParams& p) {
    const std::int64_t cap = 2 * p.loss.micros() + p.bond.micros() - 1;
    p.verifier_fee = Money::from_micros(rng_.uniform_int(0, cap));
  }
  void deterred(MechanismParams& p) {
    const std::int64_t need = p.gain.micros() - p.agent_stake.micros() + 1;
    p.future_value = Money::from_micros(rng_.uniform_int(std::max<std::int64_t>(0, need),
                                                          std::max<std::int64_t>(0, need) + kSpan / 2));
  }
  void honest_beats_deviation(MechanismParams& p) {
    const std::int64_t dev = caught_deviation_payoff(p).micros();
    p.honest_payoff = SignedMoney(rng_.uniform_int(dev + 1, dev + 1 + kSpan));
  }

  Rng rng_;
};

}  // namespace insured::testing

#endif  // INSURED_TESTS_SUPPORT_DRAWS_HPP_
