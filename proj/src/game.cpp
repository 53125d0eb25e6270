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

#include "insured/game.hpp"

#include <omp.h>

#include <stdexcept>

namespace insured {
namespace {

constexpr int kActionCount = 2;

bool valid_enum(AgentAction a) {
  return a == AgentAction::kHonest || a == AgentAction::kMalicious;
}

bool valid_enum(ClaimOutcome o) {
  switch (o) {
    case ClaimOutcome::kNoClaim:
    case ClaimOutcome::kAccepted:
    case ClaimOutcome::kDeniedDropped:
    case ClaimOutcome::kDeniedEscalated:
      return true;
  }
  return false;
}

int thread_count(int jobs) { return jobs > 0 ? jobs : omp_get_max_threads(); }

// Continuation payoffs from `index` when play follows `actions`.
const LeafPayoffs& follow(const GameTree& tree, int index, const ActionVector& actions) {
  const GameNode* node = &tree.node(index);
  while (!node->is_terminal()) {
    const int a = actions[static_cast<std::size_t>(*node->decision)];
    node = &tree.node(node->children[a]);
  }
  return node->payoffs;
}

}  // namespace

std::string to_string(AgentAction a) {
  return a == AgentAction::kHonest ? "Honest" : "Malicious";
}
std::string to_string(ClaimValidity v) {
  return v == ClaimValidity::kValid ? "Valid" : "Invalid";
}
std::string to_string(InsurerResponse r) {
  return r == InsurerResponse::kAccept ? "Accept" : "Deny";
}
std::string to_string(DisputeChoice d) {
  return d == DisputeChoice::kEscalate ? "Escalate" : "Drop";
}

std::string StrategyProfile::to_string() const {
  auto yes_no = [](bool b) { return b ? "Claim" : "NoClaim"; };
  return "agent=" + insured::to_string(agent) +
         " harmed=" + yes_no(user_claims_when_harmed) +
         " unharmed=" + yes_no(user_claims_when_unharmed) +
         " valid_claim=" + insured::to_string(on_valid_claim) +
         " invalid_claim=" + insured::to_string(on_invalid_claim) +
         " valid_denial=" + insured::to_string(on_valid_denial) +
         " invalid_denial=" + insured::to_string(on_invalid_denial);
}

std::string GamePath::label() const {
  std::string out = agent == AgentAction::kHonest ? "H" : "M";
  switch (outcome) {
    case ClaimOutcome::kNoClaim: return out + "/NoClaim";
    case ClaimOutcome::kAccepted: return out + "/Claim/Accept";
    case ClaimOutcome::kDeniedDropped: return out + "/Claim/Deny/Drop";
    case ClaimOutcome::kDeniedEscalated: return out + "/Claim/Deny/Escalate";
  }
  return out + "/?";
}

std::array<GamePath, kLeafCount> all_paths() {
  std::array<GamePath, kLeafCount> out;
  std::size_t i = 0;
  for (AgentAction a : {AgentAction::kHonest, AgentAction::kMalicious}) {
    for (ClaimOutcome o : {ClaimOutcome::kNoClaim, ClaimOutcome::kAccepted,
                           ClaimOutcome::kDeniedDropped,
                           ClaimOutcome::kDeniedEscalated}) {
      out[i++] = GamePath{a, o};
    }
  }
  return out;
}

SignedMoney LeafPayoffs::of(Player p) const {
  switch (p) {
    case Player::kAgent: return agent;
    case Player::kInsurer: return insurer;
    case Player::kUser: return user;
  }
  throw std::invalid_argument("unknown player");
}

LeafPayoffs leaf_payoffs(const MechanismParams& p, const GamePath& path) {
  if (!valid_enum(path.agent) || !valid_enum(path.outcome)) {
    throw std::invalid_argument("unknown terminal path");
  }
  const SignedMoney L = p.loss, G = p.gain, SA = p.agent_stake, B = p.bond,
                    F = p.verifier_fee, R = p.reputation_cost,
                    V = p.future_value, P = p.premium;
  const SignedMoney zero;
  LeafPayoffs out;
  out.verifier_invoked = path.outcome == ClaimOutcome::kDeniedEscalated;

  if (path.agent == AgentAction::kMalicious) {
    const SignedMoney caught = G - SA - V;
    switch (path.outcome) {
      case ClaimOutcome::kNoClaim:
      case ClaimOutcome::kDeniedDropped:
        out.agent = G;
        out.insurer = P;
        out.user = -L;
        break;
      case ClaimOutcome::kAccepted:
        out.agent = caught;
        out.insurer = -L + SA;
        out.user = zero;
        break;
      case ClaimOutcome::kDeniedEscalated:
        out.agent = caught;
        out.insurer = -L - B - F - R;
        out.user = L + B - F;
        break;
    }
    return out;
  }

  out.agent = p.honest_payoff;
  switch (path.outcome) {
    case ClaimOutcome::kNoClaim:
    case ClaimOutcome::kDeniedDropped:
      out.insurer = P;
      out.user = zero;
      break;
    case ClaimOutcome::kAccepted:
      out.insurer = -L + P;
      out.user = L;
      break;
    case ClaimOutcome::kDeniedEscalated:
      out.insurer = P + B - F;
      out.user = -B - F;
      break;
  }
  return out;
}

ActionVector to_actions(const StrategyProfile& s) {
  ActionVector a{};
  a[static_cast<std::size_t>(DecisionPoint::kAgentChoice)] =
      s.agent == AgentAction::kMalicious ? 1 : 0;
  a[static_cast<std::size_t>(DecisionPoint::kClaimIfUnharmed)] =
      s.user_claims_when_unharmed ? 1 : 0;
  a[static_cast<std::size_t>(DecisionPoint::kClaimIfHarmed)] =
      s.user_claims_when_harmed ? 1 : 0;
  a[static_cast<std::size_t>(DecisionPoint::kRespondInvalid)] =
      s.on_invalid_claim == InsurerResponse::kDeny ? 1 : 0;
  a[static_cast<std::size_t>(DecisionPoint::kRespondValid)] =
      s.on_valid_claim == InsurerResponse::kDeny ? 1 : 0;
  a[static_cast<std::size_t>(DecisionPoint::kDisputeInvalid)] =
      s.on_invalid_denial == DisputeChoice::kEscalate ? 1 : 0;
  a[static_cast<std::size_t>(DecisionPoint::kDisputeValid)] =
      s.on_valid_denial == DisputeChoice::kEscalate ? 1 : 0;
  return a;
}

StrategyProfile from_actions(const ActionVector& a) {
  auto at = [&](DecisionPoint d) { return a[static_cast<std::size_t>(d)]; };
  StrategyProfile s;
  s.agent = at(DecisionPoint::kAgentChoice) ? AgentAction::kMalicious
                                            : AgentAction::kHonest;
  s.user_claims_when_unharmed = at(DecisionPoint::kClaimIfUnharmed) == 1;
  s.user_claims_when_harmed = at(DecisionPoint::kClaimIfHarmed) == 1;
  s.on_invalid_claim = at(DecisionPoint::kRespondInvalid) ? InsurerResponse::kDeny
                                                          : InsurerResponse::kAccept;
  s.on_valid_claim = at(DecisionPoint::kRespondValid) ? InsurerResponse::kDeny
                                                      : InsurerResponse::kAccept;
  s.on_invalid_denial = at(DecisionPoint::kDisputeInvalid) ? DisputeChoice::kEscalate
                                                           : DisputeChoice::kDrop;
  s.on_valid_denial = at(DecisionPoint::kDisputeValid) ? DisputeChoice::kEscalate
                                                       : DisputeChoice::kDrop;
  return s;
}

int GameTree::decision_node(DecisionPoint point) const {
  return decision_index_[static_cast<std::size_t>(point)];
}

std::size_t GameTree::leaf_count() const { return leaves().size(); }

std::vector<const GameNode*> GameTree::leaves() const {
  std::vector<const GameNode*> out;
  for (const GameNode& n : nodes_) {
    if (n.is_terminal()) out.push_back(&n);
  }
  return out;
}

bool operator==(const GameTree& a, const GameTree& b) {
  if (a.nodes_.size() != b.nodes_.size()) return false;
  for (std::size_t i = 0; i < a.nodes_.size(); ++i) {
    const GameNode& x = a.nodes_[i];
    const GameNode& y = b.nodes_[i];
    if (x.decision != y.decision || x.player != y.player ||
        x.children != y.children || x.compliant_action != y.compliant_action ||
        x.path != y.path || x.payoffs != y.payoffs) {
      return false;
    }
  }
  return a.decision_index_ == b.decision_index_;
}

GameTree build_game(const MechanismParams& params) {
  GameTree tree;
  tree.params_ = params;
  auto& nodes = tree.nodes_;

  auto add_decision = [&](DecisionPoint d, Player who, int compliant) {
    GameNode n;
    n.decision = d;
    n.player = who;
    n.compliant_action = compliant;
    nodes.push_back(n);
    const int index = static_cast<int>(nodes.size()) - 1;
    tree.decision_index_[static_cast<std::size_t>(d)] = index;
    return index;
  };
  auto add_leaf = [&](AgentAction a, ClaimOutcome o) {
    GameNode n;
    n.path = GamePath{a, o};
    n.payoffs = leaf_payoffs(params, *n.path);
    nodes.push_back(n);
    return static_cast<int>(nodes.size()) - 1;
  };

  const int root = add_decision(DecisionPoint::kAgentChoice, Player::kAgent, 0);
  for (AgentAction a : {AgentAction::kHonest, AgentAction::kMalicious}) {
    const bool harmed = a == AgentAction::kMalicious;
    const int claim = add_decision(
        harmed ? DecisionPoint::kClaimIfHarmed : DecisionPoint::kClaimIfUnharmed,
        Player::kUser, 0);
    // Compliant insurer: accept valid claims, deny invalid ones.
    const int respond = add_decision(
        harmed ? DecisionPoint::kRespondValid : DecisionPoint::kRespondInvalid,
        Player::kInsurer, harmed ? 0 : 1);
    const int dispute = add_decision(
        harmed ? DecisionPoint::kDisputeValid : DecisionPoint::kDisputeInvalid,
        Player::kUser, 0);
    const int no_claim = add_leaf(a, ClaimOutcome::kNoClaim);
    const int accepted = add_leaf(a, ClaimOutcome::kAccepted);
    const int dropped = add_leaf(a, ClaimOutcome::kDeniedDropped);
    const int escalated = add_leaf(a, ClaimOutcome::kDeniedEscalated);

    nodes[root].children[harmed ? 1 : 0] = claim;
    nodes[claim].children = {no_claim, respond};
    nodes[respond].children = {accepted, dispute};
    nodes[dispute].children = {dropped, escalated};
  }
  return tree;
}

SpeSolution solve_spe(const GameTree& tree) {
  ActionVector chosen{};
  // Children always follow their parent in node order, so a reverse sweep
  // visits every subgame before the node that owns it.
  const auto nodes = tree.nodes();
  std::vector<int> reached_leaf(nodes.size(), -1);
  for (int i = static_cast<int>(nodes.size()) - 1; i >= 0; --i) {
    const GameNode& n = nodes[i];
    if (n.is_terminal()) {
      reached_leaf[i] = i;
      continue;
    }
    std::array<int, kActionCount> leaf{reached_leaf[n.children[0]],
                                       reached_leaf[n.children[1]]};
    const SignedMoney v0 = nodes[leaf[0]].payoffs.of(n.player);
    const SignedMoney v1 = nodes[leaf[1]].payoffs.of(n.player);
    int best = n.compliant_action;
    if (v0 > v1) best = 0;
    if (v1 > v0) best = 1;
    chosen[static_cast<std::size_t>(*n.decision)] = best;
    reached_leaf[i] = leaf[best];
  }
  const GameNode& outcome = nodes[reached_leaf[GameTree::root()]];
  return SpeSolution{from_actions(chosen), *outcome.path, outcome.payoffs};
}

std::vector<StrategyProfile> brute_force_spe(const GameTree& tree) {
  std::vector<StrategyProfile> out;
  const auto nodes = tree.nodes();
  for (unsigned mask = 0; mask < (1u << kDecisionCount); ++mask) {
    ActionVector actions{};
    for (std::size_t d = 0; d < kDecisionCount; ++d) {
      actions[d] = static_cast<int>((mask >> (kDecisionCount - 1 - d)) & 1u);
    }
    bool equilibrium = true;
    for (int i = 0; i < static_cast<int>(nodes.size()) && equilibrium; ++i) {
      const GameNode& n = nodes[i];
      if (n.is_terminal()) continue;
      const auto d = static_cast<std::size_t>(*n.decision);
      const SignedMoney current = follow(tree, i, actions).of(n.player);
      ActionVector deviated = actions;
      deviated[d] = 1 - actions[d];
      if (follow(tree, i, deviated).of(n.player) > current) equilibrium = false;
    }
    if (equilibrium) out.push_back(from_actions(actions));
  }
  return out;
}

GamePath play(const GameTree& tree, const StrategyProfile& profile) {
  const ActionVector actions = to_actions(profile);
  const GameNode* node = &tree.node(GameTree::root());
  while (!node->is_terminal()) {
    node = &tree.node(node->children[actions[static_cast<std::size_t>(*node->decision)]]);
  }
  return *node->path;
}

bool predict_honest_equilibrium(const MechanismParams& params) {
  return check_conditions(params).all_hold &&
         params.honest_payoff > caught_deviation_payoff(params);
}

std::vector<StrategyProfile> solve_batch_serial(std::span<const MechanismParams> batch) {
  std::vector<StrategyProfile> out(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    out[i] = solve_spe(build_game(batch[i])).profile;
  }
  return out;
}

std::vector<StrategyProfile> solve_batch(std::span<const MechanismParams> batch, int jobs) {
  std::vector<StrategyProfile> out(batch.size());
  const auto n = static_cast<std::int64_t>(batch.size());
#pragma omp parallel for schedule(static) num_threads(thread_count(jobs))
  for (std::int64_t i = 0; i < n; ++i) {
    out[i] = solve_spe(build_game(batch[i])).profile;
  }
  return out;
}

namespace {

char is_member(const MechanismParams& params) {
  const GameTree tree = build_game(params);
  const StrategyProfile solved = solve_spe(tree).profile;
  for (const StrategyProfile& s : brute_force_spe(tree)) {
    if (s == solved) return 1;
  }
  return 0;
}

}  // namespace

std::vector<char> oracle_membership_serial(std::span<const MechanismParams> batch) {
  std::vector<char> out(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) out[i] = is_member(batch[i]);
  return out;
}

std::vector<char> oracle_membership(std::span<const MechanismParams> batch, int jobs) {
  std::vector<char> out(batch.size());
  const auto n = static_cast<std::int64_t>(batch.size());
#pragma omp parallel for schedule(dynamic, 256) num_threads(thread_count(jobs))
  for (std::int64_t i = 0; i < n; ++i) out[i] = is_member(batch[i]);
  return out;
}

}  // namespace insured
