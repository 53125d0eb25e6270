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

#ifndef INSURED_SIM_HPP_
#define INSURED_SIM_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "insured/game.hpp"
#include "insured/ledger.hpp"
#include "insured/market.hpp"
#include "insured/mechanism.hpp"
#include "insured/rng.hpp"

namespace insured {

// kPropensity: misbehaves with probability theta, regardless of incentives.
enum class AgentBehavior {
  kRationalSpe,
  kOpportunistic,
  kAlwaysMalicious,
  kAlwaysHonest,
  kPropensity,
};
enum class UserBehavior { kRationalSpe, kAlwaysClaim, kNeverClaim };
enum class InsurerBehavior { kRationalSpe, kAlwaysDeny, kAlwaysAccept };

struct BehaviorPolicy {
  AgentBehavior agent = AgentBehavior::kRationalSpe;
  double temptation = 0.0;  // Opportunistic(p): chance per episode of weighing a deviation
  UserBehavior user = UserBehavior::kRationalSpe;
  InsurerBehavior insurer = InsurerBehavior::kRationalSpe;
};

struct InsurerSpec {
  std::string id;
  double loading = 0.0;
  RiskPosterior prior;
};

enum class Pricing { kFixed, kExperienceRated };

struct StackSpec {
  std::string master;
  double base_risk = 1.0;
  double floor = kDefaultRiskFloor;
  std::vector<Certificate> certificates;
  double loading = 0.0;
  double layer1_cut = 0.0;
};

struct Funding {
  Money agent = Money::units(1'000'000);
  Money insurer = Money::units(1'000'000'000);
  Money user = Money::units(1'000'000);
  Money external = Money::units(1'000'000'000'000);
};

struct ScenarioConfig {
  std::uint64_t seed = 0;
  std::int64_t episodes = 1;
  MechanismParams params;
  std::vector<AgentProfile> population;
  BehaviorPolicy policies;
  bool enforcement_enabled = true;
  Money claim_bond;
  std::vector<InsurerSpec> insurers;
  Pricing pricing = Pricing::kFixed;
  std::optional<StackSpec> stack;
  Funding funding;
  Tick claim_deadline = 2;
  Tick verifier_delay = 3;
  std::map<std::string, double> safeguard_credits;  // tag -> clean pseudo-counts
};

// Validation failure with the offending field path, e.g. "population[2].theta".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

void validate(const ScenarioConfig& config);

enum class EpisodeStatus { kCompleted, kExcluded, kAborted };
std::string_view to_string(EpisodeStatus status);

struct EpisodeRecord {
  std::int64_t index = 0;
  EpisodeStatus status = EpisodeStatus::kCompleted;
  std::string agent;
  std::string insurer;  // empty when uninsured
  std::string note;     // exclusion / abort reason
  Money gain;
  Money premium;
  AgentAction action = AgentAction::kHonest;
  std::optional<GamePath> path;  // set for insured, completed episodes
  bool claimed = false;
  bool escalated = false;
  bool audited = false;
  std::optional<ClaimState> final_claim_state;
  Tick resolution_ticks = 0;
  SignedMoney agent_net;
  SignedMoney insurer_net;
  SignedMoney user_net;
  Money compensation_paid;
};

struct MetricsReport {
  std::int64_t episodes = 0;
  std::int64_t completed = 0;
  std::int64_t excluded = 0;
  std::int64_t aborted = 0;
  std::int64_t misbehaviors = 0;
  std::int64_t claims_filed = 0;
  std::int64_t disputes = 0;
  double misbehavior_rate = 0.0;
  double dispute_rate = 0.0;
  double mean_resolution_ticks = 0.0;
  std::map<std::int64_t, std::int64_t> user_loss_distribution;  // micro-units -> episodes
  Money premiums_collected;
  Money losses_paid;
  double insurer_loss_ratio = 0.0;
  std::int64_t verifier_invocations = 0;
  std::int64_t audit_access_events = 0;
  std::map<std::string, double> market_concentration;
  std::int64_t shortfalls = 0;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

// Mutable state of one scenario run: the ledger, the clock and every
// insurer's experience-rating posterior per agent.
class World {
 public:
  explicit World(const ScenarioConfig& config);

  const ScenarioConfig& config() const { return *config_; }
  Ledger& ledger() { return ledger_; }
  const Ledger& ledger() const { return ledger_; }
  Tick now() const { return tick_; }
  void advance_to(Tick t) { tick_ = t; }
  RiskPosterior& posterior(const std::string& insurer, const std::string& agent);
  std::map<std::string, std::int64_t>& policies_written() { return policies_written_; }

  static constexpr const char* kUser = "user";

 private:
  const ScenarioConfig* config_;
  Ledger ledger_;
  Tick tick_ = 0;
  std::map<std::pair<std::string, std::string>, RiskPosterior> posteriors_;
  std::map<std::string, std::int64_t> policies_written_;
};

// Decision hooks for one insured interaction.
struct StageChoices {
  std::function<bool(bool harmed)> claim;
  std::function<InsurerResponse(Ledger&, ClaimId)> respond;
  std::function<DisputeChoice(ClaimValidity truth)> dispute;
};

struct Interaction {
  ClaimOutcome outcome = ClaimOutcome::kNoClaim;
  bool claimed = false;
  bool escalated = false;
  bool caught = false;  // misbehavior verified by acceptance or verdict
  std::optional<ClaimState> final_state;
  Tick resolution_ticks = 0;
  Money compensation;
};

// Policy expiry for an interaction underwritten at `start`.
Tick interaction_expiry(Tick start, Tick verifier_delay);

// Stages 1-4 on an already underwritten policy, ending with its expiry. All
// exogenous payoffs (service revenue, G, Pi_honest, harm, lost future value)
// flow through the ledger's external account so that balance changes over
// the policy's life equal the game's leaf payoffs.
Interaction settle_interaction(Ledger& ledger, PolicyId policy, const std::string& user,
                               const MechanismParams& params, AgentAction action,
                               Money claim_bond, Tick start, Tick verifier_delay,
                               const StageChoices& choices);

// Runs the four-stage interaction for the agent chosen by `index`, driving
// every flow through the ledger. On a ledger error mid-episode the world is
// rolled back and the episode is recorded as aborted.
EpisodeRecord run_episode(World& world, std::int64_t index, Rng& rng);

struct ScenarioRun {
  MetricsReport report;
  Money supply_before;
  Money supply_after;
  Ledger ledger;
};

using EpisodeSink = std::function<void(const EpisodeRecord&)>;

ScenarioRun run_scenario_detailed(const ScenarioConfig& config, const EpisodeSink& sink = {});
MetricsReport run_scenario(const ScenarioConfig& config);

// A rational agent's choice for a realized gain, from the subgame-perfect profile.
StrategyProfile rational_profile(const MechanismParams& params);

}  // namespace insured

#endif  // INSURED_SIM_HPP_
