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

#ifndef INSURED_GAME_HPP_
#define INSURED_GAME_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "insured/mechanism.hpp"
#include "insured/money.hpp"

namespace insured {

enum class AgentAction { kHonest, kMalicious };
enum class ClaimValidity { kValid, kInvalid };
enum class InsurerResponse { kAccept, kDeny };
enum class DisputeChoice { kDrop, kEscalate };
enum class Player { kAgent, kInsurer, kUser };

std::string to_string(AgentAction a);
std::string to_string(ClaimValidity v);
std::string to_string(InsurerResponse r);
std::string to_string(DisputeChoice d);

// A pure strategy for every decision node of the four-stage game.
struct StrategyProfile {
  AgentAction agent = AgentAction::kHonest;
  bool user_claims_when_harmed = true;
  bool user_claims_when_unharmed = false;
  InsurerResponse on_valid_claim = InsurerResponse::kAccept;
  InsurerResponse on_invalid_claim = InsurerResponse::kDeny;
  DisputeChoice on_valid_denial = DisputeChoice::kEscalate;
  DisputeChoice on_invalid_denial = DisputeChoice::kDrop;

  InsurerResponse response(ClaimValidity v) const {
    return v == ClaimValidity::kValid ? on_valid_claim : on_invalid_claim;
  }
  DisputeChoice dispute(ClaimValidity v) const {
    return v == ClaimValidity::kValid ? on_valid_denial : on_invalid_denial;
  }

  // Agent honest; user claims only when harmed and escalates only valid
  // denials; insurer pays valid claims and rejects invalid ones.
  static StrategyProfile compliant() { return {}; }

  std::string to_string() const;

  friend bool operator==(const StrategyProfile&, const StrategyProfile&) = default;
};

enum class ClaimOutcome { kNoClaim, kAccepted, kDeniedDropped, kDeniedEscalated };

// One terminal path of the game tree.
struct GamePath {
  AgentAction agent = AgentAction::kHonest;
  ClaimOutcome outcome = ClaimOutcome::kNoClaim;

  // A claim is valid exactly when the agent misbehaved.
  ClaimValidity validity() const {
    return agent == AgentAction::kMalicious ? ClaimValidity::kValid
                                            : ClaimValidity::kInvalid;
  }
  std::string label() const;  // e.g. "M/Claim/Deny/Escalate"

  friend bool operator==(const GamePath&, const GamePath&) = default;
};

inline constexpr std::size_t kLeafCount = 8;
inline constexpr std::size_t kDecisionCount = 7;

std::array<GamePath, kLeafCount> all_paths();

struct LeafPayoffs {
  SignedMoney agent;
  SignedMoney insurer;
  SignedMoney user;
  bool verifier_invoked = false;

  SignedMoney of(Player p) const;

  friend bool operator==(const LeafPayoffs&, const LeafPayoffs&) = default;
};

// Payoffs at a terminal path. The four closed forms from the equilibrium
// argument are used verbatim (escalated valid claim, accepted valid claim,
// caught agent, escalated invalid claim); remaining leaves follow the
// completion documented in README.md. Throws std::invalid_argument for a
// path outside the eight terminal paths.
LeafPayoffs leaf_payoffs(const MechanismParams& params, const GamePath& path);

enum class DecisionPoint {
  kAgentChoice,      // Honest / Malicious
  kClaimIfUnharmed,  // NoClaim / Claim after Honest
  kClaimIfHarmed,    // NoClaim / Claim after Malicious
  kRespondInvalid,   // Accept / Deny
  kRespondValid,     // Accept / Deny
  kDisputeInvalid,   // Drop / Escalate
  kDisputeValid,     // Drop / Escalate
};

// Actions are indexed 0/1 at every decision node in the order listed above.
using ActionVector = std::array<int, kDecisionCount>;
ActionVector to_actions(const StrategyProfile& profile);
StrategyProfile from_actions(const ActionVector& actions);

struct GameNode {
  // Decision nodes.
  std::optional<DecisionPoint> decision;
  Player player = Player::kAgent;
  std::array<int, 2> children{-1, -1};
  int compliant_action = 0;  // preferred action when the mover is indifferent
  // Terminal nodes.
  std::optional<GamePath> path;
  LeafPayoffs payoffs;

  bool is_terminal() const { return path.has_value(); }
};

class GameTree {
 public:
  const MechanismParams& params() const { return params_; }
  std::span<const GameNode> nodes() const { return nodes_; }
  const GameNode& node(int index) const { return nodes_.at(index); }
  static constexpr int root() { return 0; }
  int decision_node(DecisionPoint point) const;
  std::size_t leaf_count() const;
  std::vector<const GameNode*> leaves() const;

  friend GameTree build_game(const MechanismParams& params);
  friend bool operator==(const GameTree& a, const GameTree& b);

 private:
  MechanismParams params_;
  std::vector<GameNode> nodes_;
  std::array<int, kDecisionCount> decision_index_{};
};

GameTree build_game(const MechanismParams& params);

struct SpeSolution {
  StrategyProfile profile;
  GamePath path;
  LeafPayoffs payoffs;
};

// Backward induction with indifference resolved toward the compliant action
// (Honest, NoClaim, Accept a valid claim, Deny an invalid one, Drop).
SpeSolution solve_spe(const GameTree& tree);

// Exhaustive oracle: every pure profile in which no mover at any node can
// strictly gain from a single-node deviation. Ordered by action vector.
std::vector<StrategyProfile> brute_force_spe(const GameTree& tree);

// Terminal path reached from the root when everyone follows `profile`.
GamePath play(const GameTree& tree, const StrategyProfile& profile);

// True iff all three conditions hold and Pi_honest > G - S_A - V_future.
bool predict_honest_equilibrium(const MechanismParams& params);

// Batch kernels. The serial versions are the reference the OpenMP versions
// are tested against; results are index-aligned with the input.
std::vector<StrategyProfile> solve_batch_serial(std::span<const MechanismParams> batch);
std::vector<StrategyProfile> solve_batch(std::span<const MechanismParams> batch, int jobs = 0);

// Per draw: is solve_spe's profile a member of brute_force_spe's set?
std::vector<char> oracle_membership_serial(std::span<const MechanismParams> batch);
std::vector<char> oracle_membership(std::span<const MechanismParams> batch, int jobs = 0);

}  // namespace insured

#endif  // INSURED_GAME_HPP_
