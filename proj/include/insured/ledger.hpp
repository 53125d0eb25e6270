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

#ifndef INSURED_LEDGER_HPP_
#define INSURED_LEDGER_HPP_

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "insured/game.hpp"
#include "insured/money.hpp"

namespace insured {

using Tick = std::int64_t;

enum class AccountRole {
  kAgentWallet,
  kInsurerWallet,
  kUserWallet,
  kStakeEscrow,      // one per policy: insurer stake plus agent deductible
  kBondEscrow,       // one per claim: claim bond and escalation bonds
  kVerifierFeeSink,  // single system sink for fees and penalties
  kExternal,         // off-protocol economy (task revenue, harm)
};

std::string_view to_string(AccountRole role);

struct AccountId {
  AccountRole role = AccountRole::kExternal;
  std::string owner;

  static AccountId agent(std::string id) { return {AccountRole::kAgentWallet, std::move(id)}; }
  static AccountId insurer(std::string id) { return {AccountRole::kInsurerWallet, std::move(id)}; }
  static AccountId user(std::string id) { return {AccountRole::kUserWallet, std::move(id)}; }
  static AccountId verifier_sink() { return {AccountRole::kVerifierFeeSink, "verifier"}; }
  static AccountId external() { return {AccountRole::kExternal, "external"}; }

  friend auto operator<=>(const AccountId&, const AccountId&) = default;
};

enum class FlowKind {
  kPremium,
  kStakePost,
  kStakeReturn,
  kDeductiblePost,
  kDeductibleSeize,
  kDeductibleReturn,
  kCompensation,
  kBondPost,
  kBondForfeit,
  kBondReturn,
  kVerifierFee,
  kClaimBond,
  kReputationPenalty,
  kPremiumClawback,
  // Off-protocol flows used by the episode engine.
  kServiceRevenue,
  kHonestSurplus,
  kMisbehaviorGain,
  kHarm,
  kFutureValueLoss,
};

std::string_view to_string(FlowKind kind);

struct Transfer {
  AccountId from;
  AccountId to;
  Money amount;
  Tick tick = 0;
  FlowKind memo = FlowKind::kPremium;

  friend bool operator==(const Transfer&, const Transfer&) = default;
};

enum class Party { kAgent, kInsurer, kUser };
std::string_view to_string(Party party);

enum class LedgerErrc {
  kInsufficientFunds,
  kDuplicatePolicy,
  kUnknownPolicy,
  kUnknownClaim,
  kDeadlinePassed,
  kOverCoverage,
  kPolicyInactive,
  kExcluded,
  kWrongState,
  kInvalidAmount,
  kExpiredCertificate,
};

std::string_view to_string(LedgerErrc code);

class LedgerError : public std::runtime_error {
 public:
  LedgerError(LedgerErrc code, std::optional<Party> party, const std::string& what)
      : std::runtime_error(what), code_(code), party_(party) {}
  LedgerErrc code() const noexcept { return code_; }
  std::optional<Party> party() const noexcept { return party_; }

 private:
  LedgerErrc code_;
  std::optional<Party> party_;
};

struct PolicyId {
  std::uint64_t value = 0;
  friend auto operator<=>(PolicyId, PolicyId) = default;
};

struct ClaimId {
  std::uint64_t value = 0;
  friend auto operator<=>(ClaimId, ClaimId) = default;
};

struct PolicyTerms {
  Money coverage;    // insurer stake S_I posted into escrow
  Money deductible;  // S_A
  Money premium;     // P
  Money bond;        // B, each side of an escalation
  Tick claim_deadline = 0;  // ticks after the incident during which a claim may be filed
  Tick expiry = 0;
  std::set<std::string> exclusions;

  friend bool operator==(const PolicyTerms&, const PolicyTerms&) = default;
};

enum class PolicyStatus { kActive, kExpired, kExhausted };
std::string_view to_string(PolicyStatus status);

struct PolicyRecord {
  PolicyId id;
  std::string agent;
  std::string insurer;
  PolicyTerms terms;
  Tick issued = 0;
  PolicyStatus status = PolicyStatus::kActive;
  Money stake_remaining;       // insurer stake still in escrow
  Money deductible_remaining;  // agent deductible still in escrow
  Money reserved;              // stake earmarked by open claims
  bool premium_clawed_back = false;

  friend bool operator==(const PolicyRecord&, const PolicyRecord&) = default;
};

using CredentialTag = std::array<std::uint8_t, 32>;

struct CoverageCredential {
  PolicyId policy;
  std::string insurer;
  Money coverage;
  Tick expiry = 0;
  CredentialTag tag{};
};

enum class CoverageReason { kOk, kBadTag, kUnknownPolicy, kInactive, kExpired, kInsufficientCoverage };
std::string_view to_string(CoverageReason reason);

struct CoverageCheck {
  bool ok = false;
  CoverageReason reason = CoverageReason::kBadTag;
  explicit operator bool() const { return ok; }
};

enum class ClaimState { kFiled, kAccepted, kDenied, kEscalated, kUpheldValid, kUpheldInvalid, kDropped };
std::string_view to_string(ClaimState state);
bool is_terminal(ClaimState state);

class Ledger;

class ClaimRecord {
 public:
  ClaimId id;
  PolicyId policy;
  std::string claimant;
  Money amount;
  Money claim_bond;
  Money escalation_bond;  // per side, fixed when escalated
  ClaimState state = ClaimState::kFiled;
  Tick incident_tick = 0;
  Tick filed_tick = 0;
  std::optional<Tick> resolved_tick;

  friend bool operator==(const ClaimRecord&, const ClaimRecord&) = default;

 private:
  friend class Ledger;
  ClaimValidity validity_ = ClaimValidity::kInvalid;  // verifier / audit only
};

struct Shortfall {
  std::string owner;
  Party party = Party::kUser;
  FlowKind memo = FlowKind::kVerifierFee;
  Money amount;
  Tick tick = 0;

  friend bool operator==(const Shortfall&, const Shortfall&) = default;
};

// Protocol-level dispute costs applied by adjudicate().
struct ProtocolFees {
  Money verifier_fee;     // F, charged to each escalating party
  Money reputation_cost;  // R, charged to an insurer that denied a valid claim
};

// Double-entry ledger with escrowed stakes and bonds. Single writer; copy the
// ledger for a snapshot. Every operation either completes or leaves the ledger
// unchanged.
class Ledger {
 public:
  explicit Ledger(ProtocolFees fees = {}, std::string registry_key = "insured-agents-registry");

  // Mints funds into an account. The only operation that changes total supply.
  void fund(const AccountId& account, Money amount);

  Money balance(const AccountId& account) const;
  Money total_supply() const;

  // Moves money between accounts, failing atomically on insufficient funds.
  // Zero amounts are no-ops and are not logged.
  void transfer(const AccountId& from, const AccountId& to, Money amount,
                FlowKind memo, Tick tick);

  struct Underwriting {
    PolicyRecord policy;
    CoverageCredential credential;
  };
  Underwriting underwrite(const std::string& agent, const std::string& insurer,
                          const PolicyTerms& terms, Tick tick);

  CoverageCheck verify_coverage(const CoverageCredential& credential,
                                Money min_coverage, Tick tick) const;

  ClaimRecord file_claim(PolicyId policy, const std::string& user, Money amount,
                         ClaimValidity ground_truth, Money claim_bond,
                         Tick incident_tick, Tick tick,
                         std::string_view incident_kind = {});
  ClaimRecord respond_claim(ClaimId claim, InsurerResponse response, Tick tick);
  ClaimRecord escalate(ClaimId claim, Tick tick);
  ClaimRecord drop_claim(ClaimId claim, Tick tick);
  ClaimRecord adjudicate(ClaimId claim, Tick tick);
  PolicyRecord expire_policy(PolicyId policy, Tick tick);

  // Reads a claim's ground truth on behalf of an audit-access holder. Each
  // read is counted.
  ClaimValidity audit_claim(ClaimId claim);
  std::int64_t audit_reads() const { return audit_reads_; }

  const PolicyRecord& policy(PolicyId id) const;
  const ClaimRecord& claim(ClaimId id) const;
  const std::map<AccountId, Money>& balances() const { return balances_; }
  const std::map<PolicyId, PolicyRecord>& policies() const { return policies_; }
  const std::vector<Transfer>& log() const { return log_; }
  const std::vector<Shortfall>& shortfalls() const { return shortfalls_; }
  bool defaulted(const std::string& owner) const { return defaulted_.count(owner) > 0; }
  const ProtocolFees& fees() const { return fees_; }
  void set_fees(ProtocolFees fees) { fees_ = fees; }

  CredentialTag credential_tag(const CoverageCredential& credential) const;

  // One record per line: tick,memo,from_role,to_role,amount_micros
  void write_event_log(std::ostream& out) const;

  static AccountId stake_escrow(PolicyId id);
  static AccountId bond_escrow(ClaimId id);

  // Equal ledger state; an open transaction journal is not compared.
  friend bool operator==(const Ledger& a, const Ledger& b);

  // Journaled multi-operation transaction. rollback() restores every balance,
  // record, log entry and counter touched since begin_transaction(). Not nested.
  void begin_transaction();
  void commit();
  void rollback();
  bool in_transaction() const { return journal_.has_value(); }

 private:
  struct Journal {
    std::size_t log_size = 0;
    std::size_t shortfall_size = 0;
    std::uint64_t next_policy = 0;
    std::uint64_t next_claim = 0;
    std::int64_t audit_reads = 0;
    std::set<std::string> defaulted;
    std::map<AccountId, std::optional<Money>> balances;
    std::map<PolicyId, std::optional<PolicyRecord>> policies;
    std::map<ClaimId, std::optional<ClaimRecord>> claims;
  };

  void touch(const AccountId& account);
  void touch(PolicyId id);
  void touch(ClaimId id);
  void set_balance(const AccountId& account, Money amount);

  PolicyRecord& mutable_policy(PolicyId id);
  ClaimRecord& mutable_claim(ClaimId id);
  void require_funds(const AccountId& account, Money amount, Party party) const;
  // Pays as much of `amount` as the payer holds; records any shortfall.
  void charge(const AccountId& from, Party party, const AccountId& to,
              Money amount, FlowKind memo, Tick tick);
  void settle_stake(PolicyRecord& policy, Money paid_out);

  ProtocolFees fees_;
  std::string registry_key_;
  std::map<AccountId, Money> balances_;
  std::map<PolicyId, PolicyRecord> policies_;
  std::map<ClaimId, ClaimRecord> claims_;
  std::vector<Transfer> log_;
  std::vector<Shortfall> shortfalls_;
  std::set<std::string> defaulted_;
  std::uint64_t next_policy_ = 1;
  std::uint64_t next_claim_ = 1;
  std::int64_t audit_reads_ = 0;
  std::optional<Journal> journal_;
};

}  // namespace insured

#endif  // INSURED_LEDGER_HPP_
