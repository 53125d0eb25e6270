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

#include "insured/ledger.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <algorithm>
#include <sstream>

namespace insured {

std::string_view to_string(AccountRole role) {
  switch (role) {
    case AccountRole::kAgentWallet: return "AgentWallet";
    case AccountRole::kInsurerWallet: return "InsurerWallet";
    case AccountRole::kUserWallet: return "UserWallet";
    case AccountRole::kStakeEscrow: return "StakeEscrow";
    case AccountRole::kBondEscrow: return "BondEscrow";
    case AccountRole::kVerifierFeeSink: return "VerifierFeeSink";
    case AccountRole::kExternal: return "External";
  }
  return "?";
}

std::string_view to_string(FlowKind kind) {
  switch (kind) {
    case FlowKind::kPremium: return "Premium";
    case FlowKind::kStakePost: return "StakePost";
    case FlowKind::kStakeReturn: return "StakeReturn";
    case FlowKind::kDeductiblePost: return "DeductiblePost";
    case FlowKind::kDeductibleSeize: return "DeductibleSeize";
    case FlowKind::kDeductibleReturn: return "DeductibleReturn";
    case FlowKind::kCompensation: return "Compensation";
    case FlowKind::kBondPost: return "BondPost";
    case FlowKind::kBondForfeit: return "BondForfeit";
    case FlowKind::kBondReturn: return "BondReturn";
    case FlowKind::kVerifierFee: return "VerifierFee";
    case FlowKind::kClaimBond: return "ClaimBond";
    case FlowKind::kReputationPenalty: return "ReputationPenalty";
    case FlowKind::kPremiumClawback: return "PremiumClawback";
    case FlowKind::kServiceRevenue: return "ServiceRevenue";
    case FlowKind::kHonestSurplus: return "HonestSurplus";
    case FlowKind::kMisbehaviorGain: return "MisbehaviorGain";
    case FlowKind::kHarm: return "Harm";
    case FlowKind::kFutureValueLoss: return "FutureValueLoss";
  }
  return "?";
}

std::string_view to_string(Party party) {
  switch (party) {
    case Party::kAgent: return "agent";
    case Party::kInsurer: return "insurer";
    case Party::kUser: return "user";
  }
  return "?";
}

std::string_view to_string(LedgerErrc code) {
  switch (code) {
    case LedgerErrc::kInsufficientFunds: return "InsufficientFunds";
    case LedgerErrc::kDuplicatePolicy: return "DuplicatePolicy";
    case LedgerErrc::kUnknownPolicy: return "UnknownPolicy";
    case LedgerErrc::kUnknownClaim: return "UnknownClaim";
    case LedgerErrc::kDeadlinePassed: return "DeadlinePassed";
    case LedgerErrc::kOverCoverage: return "OverCoverage";
    case LedgerErrc::kPolicyInactive: return "PolicyInactive";
    case LedgerErrc::kExcluded: return "Excluded";
    case LedgerErrc::kWrongState: return "WrongState";
    case LedgerErrc::kInvalidAmount: return "InvalidAmount";
    case LedgerErrc::kExpiredCertificate: return "ExpiredCertificate";
  }
  return "?";
}

std::string_view to_string(PolicyStatus status) {
  switch (status) {
    case PolicyStatus::kActive: return "Active";
    case PolicyStatus::kExpired: return "Expired";
    case PolicyStatus::kExhausted: return "Exhausted";
  }
  return "?";
}

std::string_view to_string(CoverageReason reason) {
  switch (reason) {
    case CoverageReason::kOk: return "Ok";
    case CoverageReason::kBadTag: return "BadTag";
    case CoverageReason::kUnknownPolicy: return "UnknownPolicy";
    case CoverageReason::kInactive: return "Inactive";
    case CoverageReason::kExpired: return "Expired";
    case CoverageReason::kInsufficientCoverage: return "InsufficientCoverage";
  }
  return "?";
}

std::string_view to_string(ClaimState state) {
  switch (state) {
    case ClaimState::kFiled: return "Filed";
    case ClaimState::kAccepted: return "Accepted";
    case ClaimState::kDenied: return "Denied";
    case ClaimState::kEscalated: return "Escalated";
    case ClaimState::kUpheldValid: return "UpheldValid";
    case ClaimState::kUpheldInvalid: return "UpheldInvalid";
    case ClaimState::kDropped: return "Dropped";
  }
  return "?";
}

bool is_terminal(ClaimState state) {
  return state == ClaimState::kAccepted || state == ClaimState::kUpheldValid ||
         state == ClaimState::kUpheldInvalid || state == ClaimState::kDropped;
}

namespace {

LedgerError wrong_state(std::string_view op, ClaimState state) {
  return LedgerError(LedgerErrc::kWrongState, std::nullopt,
                     std::string(op) + " not allowed in claim state " +
                         std::string(to_string(state)));
}

}  // namespace

Ledger::Ledger(ProtocolFees fees, std::string registry_key)
    : fees_(fees), registry_key_(std::move(registry_key)) {}

AccountId Ledger::stake_escrow(PolicyId id) {
  return {AccountRole::kStakeEscrow, "policy-" + std::to_string(id.value)};
}

AccountId Ledger::bond_escrow(ClaimId id) {
  return {AccountRole::kBondEscrow, "claim-" + std::to_string(id.value)};
}

void Ledger::fund(const AccountId& account, Money amount) {
  set_balance(account, balance(account) + amount);
}

Money Ledger::balance(const AccountId& account) const {
  auto it = balances_.find(account);
  return it == balances_.end() ? Money{} : it->second;
}

Money Ledger::total_supply() const {
  Money total;
  for (const auto& [id, amount] : balances_) total += amount;
  return total;
}

void Ledger::transfer(const AccountId& from, const AccountId& to, Money amount,
                      FlowKind memo, Tick tick) {
  if (amount.is_zero()) return;
  if (from == to) {
    throw LedgerError(LedgerErrc::kInvalidAmount, std::nullopt,
                      "transfer to the same account");
  }
  auto src = balances_.find(from);
  if (src == balances_.end() || src->second < amount) {
    throw LedgerError(LedgerErrc::kInsufficientFunds, std::nullopt,
                      "insufficient funds in " + std::string(to_string(from.role)) +
                          ":" + from.owner);
  }
  // Compute the credit side before debiting so an overflow leaves no trace.
  const Money credited = balance(to) + amount;
  set_balance(from, src->second - amount);
  set_balance(to, credited);
  log_.push_back(Transfer{from, to, amount, tick, memo});
}

void Ledger::require_funds(const AccountId& account, Money amount, Party party) const {
  if (balance(account) < amount) {
    throw LedgerError(LedgerErrc::kInsufficientFunds, party,
                      "insufficient funds: " + std::string(to_string(party)) +
                          " '" + account.owner + "' holds " +
                          balance(account).to_string() + ", needs " +
                          amount.to_string());
  }
}

void Ledger::charge(const AccountId& from, Party party, const AccountId& to,
                    Money amount, FlowKind memo, Tick tick) {
  const Money available = balance(from);
  const Money paid = std::min(available, amount);
  transfer(from, to, paid, memo, tick);
  if (paid < amount) {
    shortfalls_.push_back(Shortfall{from.owner, party, memo, amount - paid, tick});
    defaulted_.insert(from.owner);
  }
}

const PolicyRecord& Ledger::policy(PolicyId id) const {
  auto it = policies_.find(id);
  if (it == policies_.end()) {
    throw LedgerError(LedgerErrc::kUnknownPolicy, std::nullopt,
                      "unknown policy " + std::to_string(id.value));
  }
  return it->second;
}

PolicyRecord& Ledger::mutable_policy(PolicyId id) {
  touch(id);
  return const_cast<PolicyRecord&>(std::as_const(*this).policy(id));
}

const ClaimRecord& Ledger::claim(ClaimId id) const {
  auto it = claims_.find(id);
  if (it == claims_.end()) {
    throw LedgerError(LedgerErrc::kUnknownClaim, std::nullopt,
                      "unknown claim " + std::to_string(id.value));
  }
  return it->second;
}

ClaimRecord& Ledger::mutable_claim(ClaimId id) {
  touch(id);
  return const_cast<ClaimRecord&>(std::as_const(*this).claim(id));
}

CredentialTag Ledger::credential_tag(const CoverageCredential& c) const {
  std::ostringstream canonical;
  canonical << "policy=" << c.policy.value << ";insurer=" << c.insurer
            << ";coverage=" << c.coverage.micros() << ";expiry=" << c.expiry;
  const std::string msg = canonical.str();
  CredentialTag tag{};
  unsigned int len = 0;
  HMAC(EVP_sha256(), registry_key_.data(), static_cast<int>(registry_key_.size()),
       reinterpret_cast<const unsigned char*>(msg.data()), msg.size(), tag.data(),
       &len);
  return tag;
}

Ledger::Underwriting Ledger::underwrite(const std::string& agent,
                                        const std::string& insurer,
                                        const PolicyTerms& terms, Tick tick) {
  if (terms.coverage.is_zero()) {
    throw LedgerError(LedgerErrc::kInvalidAmount, Party::kInsurer,
                      "coverage must be positive");
  }
  if (terms.expiry <= tick) {
    throw LedgerError(LedgerErrc::kInvalidAmount, std::nullopt,
                      "policy expiry must be after issuance");
  }
  for (const auto& [id, p] : policies_) {
    if (p.agent == agent && p.insurer == insurer && p.status == PolicyStatus::kActive) {
      throw LedgerError(LedgerErrc::kDuplicatePolicy, std::nullopt,
                        "agent '" + agent + "' already holds an active policy from '" +
                            insurer + "'");
    }
  }
  const AccountId insurer_wallet = AccountId::insurer(insurer);
  const AccountId agent_wallet = AccountId::agent(agent);
  require_funds(insurer_wallet, terms.coverage, Party::kInsurer);
  require_funds(agent_wallet, terms.premium + terms.deductible, Party::kAgent);

  PolicyRecord record;
  record.id = PolicyId{next_policy_};
  record.agent = agent;
  record.insurer = insurer;
  record.terms = terms;
  record.issued = tick;
  record.stake_remaining = terms.coverage;
  record.deductible_remaining = terms.deductible;

  const AccountId escrow = stake_escrow(record.id);
  transfer(insurer_wallet, escrow, terms.coverage, FlowKind::kStakePost, tick);
  transfer(agent_wallet, escrow, terms.deductible, FlowKind::kDeductiblePost, tick);
  transfer(agent_wallet, insurer_wallet, terms.premium, FlowKind::kPremium, tick);
  ++next_policy_;
  touch(record.id);
  policies_.emplace(record.id, record);

  CoverageCredential credential{record.id, insurer, terms.coverage, terms.expiry, {}};
  credential.tag = credential_tag(credential);
  return {record, credential};
}

CoverageCheck Ledger::verify_coverage(const CoverageCredential& c, Money min_coverage,
                                      Tick tick) const {
  if (credential_tag(c) != c.tag) return {false, CoverageReason::kBadTag};
  auto it = policies_.find(c.policy);
  if (it == policies_.end()) return {false, CoverageReason::kUnknownPolicy};
  const PolicyRecord& p = it->second;
  if (p.insurer != c.insurer || p.terms.coverage != c.coverage ||
      p.terms.expiry != c.expiry) {
    return {false, CoverageReason::kBadTag};
  }
  if (p.status == PolicyStatus::kExpired || tick >= p.terms.expiry) {
    return {false, CoverageReason::kExpired};
  }
  if (p.status != PolicyStatus::kActive) return {false, CoverageReason::kInactive};
  if (c.coverage < min_coverage) return {false, CoverageReason::kInsufficientCoverage};
  return {true, CoverageReason::kOk};
}

ClaimRecord Ledger::file_claim(PolicyId policy_id, const std::string& user,
                               Money amount, ClaimValidity ground_truth,
                               Money claim_bond, Tick incident_tick, Tick tick,
                               std::string_view incident_kind) {
  PolicyRecord& p = mutable_policy(policy_id);
  if (p.status != PolicyStatus::kActive) {
    throw LedgerError(LedgerErrc::kPolicyInactive, std::nullopt,
                      "policy " + std::to_string(policy_id.value) + " is " +
                          std::string(to_string(p.status)));
  }
  if (incident_tick > tick || tick > incident_tick + p.terms.claim_deadline) {
    throw LedgerError(LedgerErrc::kDeadlinePassed, Party::kUser,
                      "claim filed at tick " + std::to_string(tick) +
                          " outside the deadline for incident at tick " +
                          std::to_string(incident_tick));
  }
  if (!incident_kind.empty() && p.terms.exclusions.count(std::string(incident_kind))) {
    throw LedgerError(LedgerErrc::kExcluded, Party::kUser,
                      "incident kind '" + std::string(incident_kind) + "' is excluded");
  }
  if (amount.is_zero()) {
    throw LedgerError(LedgerErrc::kInvalidAmount, Party::kUser, "claim amount must be positive");
  }
  // Coverage still available: posted stake minus payouts and open reservations.
  if (amount > p.stake_remaining - p.reserved) {
    throw LedgerError(LedgerErrc::kOverCoverage, Party::kUser,
                      "claim " + amount.to_string() + " exceeds available coverage " +
                          (p.stake_remaining - p.reserved).to_string());
  }
  require_funds(AccountId::user(user), claim_bond, Party::kUser);

  ClaimRecord c;
  c.id = ClaimId{next_claim_};
  c.policy = policy_id;
  c.claimant = user;
  c.amount = amount;
  c.claim_bond = claim_bond;
  c.incident_tick = incident_tick;
  c.filed_tick = tick;
  c.validity_ = ground_truth;
  transfer(AccountId::user(user), bond_escrow(c.id), claim_bond, FlowKind::kClaimBond, tick);
  ++next_claim_;
  p.reserved += amount;
  touch(c.id);
  claims_.emplace(c.id, c);
  return c;
}

void Ledger::settle_stake(PolicyRecord& p, Money paid_out) {
  p.stake_remaining -= paid_out;
  if (p.stake_remaining.is_zero() && p.status == PolicyStatus::kActive) {
    p.status = PolicyStatus::kExhausted;
  }
}

ClaimRecord Ledger::respond_claim(ClaimId id, InsurerResponse response, Tick tick) {
  ClaimRecord& c = mutable_claim(id);
  if (c.state != ClaimState::kFiled) throw wrong_state("respond", c.state);
  if (response == InsurerResponse::kDeny) {
    c.state = ClaimState::kDenied;
    return c;
  }
  PolicyRecord& p = mutable_policy(c.policy);
  const AccountId escrow = stake_escrow(p.id);
  const AccountId user = AccountId::user(c.claimant);
  const AccountId insurer = AccountId::insurer(p.insurer);

  transfer(escrow, user, c.amount, FlowKind::kCompensation, tick);
  if (c.validity_ == ClaimValidity::kValid) {
    transfer(escrow, insurer, p.deductible_remaining, FlowKind::kDeductibleSeize, tick);
    p.deductible_remaining = Money{};
    if (!p.premium_clawed_back) {
      charge(insurer, Party::kInsurer, AccountId::verifier_sink(), p.terms.premium,
             FlowKind::kPremiumClawback, tick);
      p.premium_clawed_back = true;
    }
  }
  transfer(bond_escrow(id), user, c.claim_bond, FlowKind::kBondReturn, tick);
  p.reserved -= c.amount;
  settle_stake(p, c.amount);
  c.state = ClaimState::kAccepted;
  c.resolved_tick = tick;
  return c;
}

ClaimRecord Ledger::escalate(ClaimId id, Tick tick) {
  ClaimRecord& c = mutable_claim(id);
  if (c.state != ClaimState::kDenied) throw wrong_state("escalate", c.state);
  const PolicyRecord& p = policy(c.policy);
  const Money bond = p.terms.bond;
  const AccountId user = AccountId::user(c.claimant);
  const AccountId insurer = AccountId::insurer(p.insurer);
  require_funds(user, bond, Party::kUser);
  require_funds(insurer, bond, Party::kInsurer);
  transfer(user, bond_escrow(id), bond, FlowKind::kBondPost, tick);
  transfer(insurer, bond_escrow(id), bond, FlowKind::kBondPost, tick);
  c.escalation_bond = bond;
  c.state = ClaimState::kEscalated;
  return c;
}

ClaimRecord Ledger::drop_claim(ClaimId id, Tick tick) {
  ClaimRecord& c = mutable_claim(id);
  if (c.state != ClaimState::kDenied) throw wrong_state("drop", c.state);
  PolicyRecord& p = mutable_policy(c.policy);
  transfer(bond_escrow(id), AccountId::insurer(p.insurer), c.claim_bond,
           FlowKind::kBondForfeit, tick);
  p.reserved -= c.amount;
  c.state = ClaimState::kDropped;
  c.resolved_tick = tick;
  return c;
}

ClaimRecord Ledger::adjudicate(ClaimId id, Tick tick) {
  ClaimRecord& c = mutable_claim(id);
  if (c.state != ClaimState::kEscalated) throw wrong_state("adjudicate", c.state);
  PolicyRecord& p = mutable_policy(c.policy);
  const AccountId escrow = stake_escrow(p.id);
  const AccountId bonds = bond_escrow(id);
  const AccountId user = AccountId::user(c.claimant);
  const AccountId insurer = AccountId::insurer(p.insurer);
  const AccountId sink = AccountId::verifier_sink();

  p.reserved -= c.amount;
  if (c.validity_ == ClaimValidity::kValid) {
    transfer(escrow, user, c.amount, FlowKind::kCompensation, tick);
    settle_stake(p, c.amount);
    // The insurer lost the dispute, so the agent's slashed deductible is
    // burned rather than paid to it.
    transfer(escrow, sink, p.deductible_remaining, FlowKind::kDeductibleSeize, tick);
    p.deductible_remaining = Money{};
    transfer(bonds, user, c.escalation_bond, FlowKind::kBondForfeit, tick);
    transfer(bonds, user, c.escalation_bond, FlowKind::kBondReturn, tick);
    transfer(bonds, user, c.claim_bond, FlowKind::kBondReturn, tick);
    charge(user, Party::kUser, sink, fees_.verifier_fee, FlowKind::kVerifierFee, tick);
    charge(insurer, Party::kInsurer, sink, fees_.verifier_fee, FlowKind::kVerifierFee, tick);
    charge(insurer, Party::kInsurer, sink, fees_.reputation_cost,
           FlowKind::kReputationPenalty, tick);
    if (!p.premium_clawed_back) {
      charge(insurer, Party::kInsurer, sink, p.terms.premium,
             FlowKind::kPremiumClawback, tick);
      p.premium_clawed_back = true;
    }
    c.state = ClaimState::kUpheldValid;
  } else {
    transfer(bonds, insurer, c.escalation_bond, FlowKind::kBondForfeit, tick);
    transfer(bonds, insurer, c.escalation_bond, FlowKind::kBondReturn, tick);
    transfer(bonds, insurer, c.claim_bond, FlowKind::kBondForfeit, tick);
    charge(user, Party::kUser, sink, fees_.verifier_fee, FlowKind::kVerifierFee, tick);
    charge(insurer, Party::kInsurer, sink, fees_.verifier_fee, FlowKind::kVerifierFee, tick);
    c.state = ClaimState::kUpheldInvalid;
  }
  c.resolved_tick = tick;
  return c;
}

PolicyRecord Ledger::expire_policy(PolicyId id, Tick tick) {
  PolicyRecord& p = mutable_policy(id);
  if (p.status == PolicyStatus::kExpired) {
    throw LedgerError(LedgerErrc::kWrongState, std::nullopt,
                      "policy " + std::to_string(id.value) + " already expired");
  }
  if (tick < p.terms.expiry) {
    throw LedgerError(LedgerErrc::kWrongState, std::nullopt,
                      "policy " + std::to_string(id.value) + " has not reached expiry");
  }
  if (!p.reserved.is_zero()) {
    throw LedgerError(LedgerErrc::kWrongState, std::nullopt,
                      "policy " + std::to_string(id.value) + " has open claims");
  }
  const AccountId escrow = stake_escrow(id);
  transfer(escrow, AccountId::insurer(p.insurer), p.stake_remaining,
           FlowKind::kStakeReturn, tick);
  transfer(escrow, AccountId::agent(p.agent), p.deductible_remaining,
           FlowKind::kDeductibleReturn, tick);
  p.stake_remaining = Money{};
  p.deductible_remaining = Money{};
  p.status = PolicyStatus::kExpired;
  return p;
}

ClaimValidity Ledger::audit_claim(ClaimId id) {
  const ClaimRecord& c = claim(id);
  ++audit_reads_;
  return c.validity_;
}

void Ledger::set_balance(const AccountId& account, Money amount) {
  touch(account);
  balances_[account] = amount;
}

void Ledger::touch(const AccountId& account) {
  if (!journal_ || journal_->balances.count(account)) return;
  auto it = balances_.find(account);
  journal_->balances.emplace(
      account, it == balances_.end() ? std::nullopt : std::optional<Money>(it->second));
}

void Ledger::touch(PolicyId id) {
  if (!journal_ || journal_->policies.count(id)) return;
  auto it = policies_.find(id);
  journal_->policies.emplace(
      id, it == policies_.end() ? std::nullopt : std::optional<PolicyRecord>(it->second));
}

void Ledger::touch(ClaimId id) {
  if (!journal_ || journal_->claims.count(id)) return;
  auto it = claims_.find(id);
  journal_->claims.emplace(
      id, it == claims_.end() ? std::nullopt : std::optional<ClaimRecord>(it->second));
}

void Ledger::begin_transaction() {
  if (journal_) throw std::logic_error("ledger transaction already open");
  Journal j;
  j.log_size = log_.size();
  j.shortfall_size = shortfalls_.size();
  j.next_policy = next_policy_;
  j.next_claim = next_claim_;
  j.audit_reads = audit_reads_;
  j.defaulted = defaulted_;
  journal_ = std::move(j);
}

void Ledger::commit() {
  if (!journal_) throw std::logic_error("no open ledger transaction");
  journal_.reset();
}

void Ledger::rollback() {
  if (!journal_) throw std::logic_error("no open ledger transaction");
  Journal j = std::move(*journal_);
  journal_.reset();
  for (auto& [account, before] : j.balances) {
    if (before) {
      balances_[account] = *before;
    } else {
      balances_.erase(account);
    }
  }
  for (auto& [id, before] : j.policies) {
    if (before) {
      policies_[id] = *before;
    } else {
      policies_.erase(id);
    }
  }
  for (auto& [id, before] : j.claims) {
    if (before) {
      claims_[id] = *before;
    } else {
      claims_.erase(id);
    }
  }
  log_.resize(j.log_size);
  shortfalls_.resize(j.shortfall_size);
  next_policy_ = j.next_policy;
  next_claim_ = j.next_claim;
  audit_reads_ = j.audit_reads;
  defaulted_ = std::move(j.defaulted);
}

void Ledger::write_event_log(std::ostream& out) const {
  for (const Transfer& t : log_) {
    out << t.tick << ',' << to_string(t.memo) << ',' << to_string(t.from.role) << ','
        << to_string(t.to.role) << ',' << t.amount.micros() << '\n';
  }
}

bool operator==(const Ledger& a, const Ledger& b) {
  return a.fees_.verifier_fee == b.fees_.verifier_fee &&
         a.fees_.reputation_cost == b.fees_.reputation_cost &&
         a.registry_key_ == b.registry_key_ && a.balances_ == b.balances_ &&
         a.policies_ == b.policies_ && a.claims_ == b.claims_ && a.log_ == b.log_ &&
         a.shortfalls_ == b.shortfalls_ && a.defaulted_ == b.defaulted_ &&
         a.next_policy_ == b.next_policy_ && a.next_claim_ == b.next_claim_ &&
         a.audit_reads_ == b.audit_reads_;
}

}  // namespace insured
