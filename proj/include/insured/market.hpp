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

#ifndef INSURED_MARKET_HPP_
#define INSURED_MARKET_HPP_

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "insured/ledger.hpp"
#include "insured/mechanism.hpp"
#include "insured/money.hpp"
#include "insured/rng.hpp"

namespace insured {

// Beta pseudo-counts over an agent's per-episode misbehavior probability.
struct RiskPosterior {
  double alpha = 1.0;
  double beta = 1.0;

  double mean() const { return alpha / (alpha + beta); }
  bool valid() const;

  friend bool operator==(const RiskPosterior&, const RiskPosterior&) = default;
};

RiskPosterior update_posterior(const RiskPosterior& posterior, bool observed_misbehavior);

// Each safeguard tag found in `clean_pseudo_counts` adds that many clean
// observations to the prior.
RiskPosterior apply_safeguards(RiskPosterior prior, const std::set<std::string>& safeguards,
                               const std::map<std::string, double>& clean_pseudo_counts);

// P = round-half-up(mean * coverage * (1 + loading)), at least one micro-unit
// whenever the rate and the coverage are positive.
Money price_premium(const RiskPosterior& posterior, Money coverage, double loading);
Money price_premium_at_rate(double rate, Money coverage, double loading);

struct GainDistribution {
  enum class Kind { kFixed, kUniform, kGeometric };
  Kind kind = Kind::kFixed;  // kFixed draws the scenario's G
  Money low;                 // kUniform bounds, inclusive
  Money high;
  Money mean;                // kGeometric mean, in micro-units

  Money sample(Rng& rng, Money fixed_gain) const;
  double expected(Money fixed_gain) const;
};

struct AgentProfile {
  std::string id;
  double theta = 0.0;  // true misbehavior propensity
  GainDistribution gain;
  std::set<std::string> safeguards;
  bool audit_access_granted = true;
};

// Buys iff (1 - theta) * Pi_honest + theta * (E[G] - S_A) - quote / horizon > 0.
bool decide_purchase(const AgentProfile& agent, Money quote, const MechanismParams& params,
                     std::int64_t amortization_episodes = 1);

inline constexpr double kDefaultRiskFloor = 1e-4;

struct Certificate {
  std::string issuer;  // Layer-1 insurer
  std::string domain;  // e.g. "safety", "financial"
  double risk_discount = 0.0;
  Tick expiry = 0;

  friend bool operator==(const Certificate&, const Certificate&) = default;
};

struct StackComposition {
  double residual_risk = 1.0;
  std::vector<Certificate> applied;   // canonical order
  std::vector<std::string> warnings;  // one per excluded (expired) certificate
};

// residual = base * prod(1 - discount), floored. Expired certificates are left
// out of the product with a warning. Certificates are put in canonical order
// first, so the result does not depend on input order.
StackComposition compose_stack(double base_risk, std::span<const Certificate> certificates,
                               Tick now, double floor = kDefaultRiskFloor);

struct InsurerStack {
  std::string master;
  std::vector<Certificate> layer1;
  double base_risk = 1.0;
  double floor = kDefaultRiskFloor;
  double residual_risk = 1.0;
};

InsurerStack make_stack(std::string master, double base_risk,
                        std::vector<Certificate> layer1, Tick now,
                        double floor = kDefaultRiskFloor);

struct StackTerms {
  Money coverage;
  Money deductible;
  Money bond;
  Tick claim_deadline = 0;
  Tick expiry = 0;
  double loading = 0.0;
  double layer1_cut = 0.0;  // fraction of the master premium paid to Layer-1 issuers
};

// Integer split of `total` proportional to `weights` (largest remainder; ties
// go to the earlier weight).
std::vector<Money> split_proportional(Money total, std::span<const double> weights);

struct StackUnderwriting {
  Ledger::Underwriting underwriting;
  Money premium;
  std::vector<std::pair<std::string, Money>> layer1_shares;  // canonical cert order
};

// The master insurer posts the protocol stake and sells the policy at the
// residual-risk premium; Layer-1 issuers receive their share of the cut.
// Throws LedgerError(kExpiredCertificate) when any certificate has expired.
StackUnderwriting underwrite_stack(Ledger& ledger, const std::string& agent,
                                   const InsurerStack& stack, const StackTerms& terms,
                                   Tick tick);

}  // namespace insured

#endif  // INSURED_MARKET_HPP_
