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

#include "insured/sim.hpp"

#include <cmath>
#include <set>

namespace insured {

std::string_view to_string(EpisodeStatus status) {
  switch (status) {
    case EpisodeStatus::kCompleted: return "completed";
    case EpisodeStatus::kExcluded: return "excluded";
    case EpisodeStatus::kAborted: return "aborted";
  }
  return "?";
}

namespace {

bool probability(double p) { return p >= 0.0 && p <= 1.0; }

std::string path_of(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

}  // namespace

void validate(const ScenarioConfig& c) {
  if (c.episodes < 1) throw ConfigError("episodes", "must be at least 1");
  if (c.population.empty()) throw ConfigError("population", "must list at least one agent");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < c.population.size(); ++i) {
    const AgentProfile& a = c.population[i];
    if (a.id.empty()) throw ConfigError(path_of("population", i) + ".id", "must be non-empty");
    if (!ids.insert(a.id).second) {
      throw ConfigError(path_of("population", i) + ".id", "duplicate agent id '" + a.id + "'");
    }
    if (!probability(a.theta)) {
      throw ConfigError(path_of("population", i) + ".theta", "must be in [0, 1]");
    }
    if (a.gain.kind == GainDistribution::Kind::kUniform && a.gain.low > a.gain.high) {
      throw ConfigError(path_of("population", i) + ".gain", "low exceeds high");
    }
  }
  if (!probability(c.policies.temptation)) {
    throw ConfigError("policies.agent.p", "must be in [0, 1]");
  }
  std::set<std::string> insurers;
  for (std::size_t i = 0; i < c.insurers.size(); ++i) {
    const InsurerSpec& s = c.insurers[i];
    if (s.id.empty()) throw ConfigError(path_of("insurers", i) + ".id", "must be non-empty");
    if (!insurers.insert(s.id).second) {
      throw ConfigError(path_of("insurers", i) + ".id", "duplicate insurer id '" + s.id + "'");
    }
    if (!(s.loading >= 0.0) || !std::isfinite(s.loading)) {
      throw ConfigError(path_of("insurers", i) + ".loading", "must be >= 0");
    }
    if (!s.prior.valid()) {
      throw ConfigError(path_of("insurers", i) + ".prior", "alpha and beta must be > 0");
    }
  }
  if (c.enforcement_enabled && !c.stack && c.insurers.empty()) {
    throw ConfigError("insurers", "at least one insurer is required when enforcement is on");
  }
  if (c.stack) {
    const StackSpec& s = *c.stack;
    if (s.master.empty()) throw ConfigError("stack.master", "must be non-empty");
    if (!(s.base_risk > 0.0 && s.base_risk <= 1.0)) {
      throw ConfigError("stack.base_risk", "must be in (0, 1]");
    }
    if (!(s.floor > 0.0 && s.floor <= 1.0)) throw ConfigError("stack.floor", "must be in (0, 1]");
    if (!probability(s.layer1_cut)) throw ConfigError("stack.layer1_cut", "must be in [0, 1]");
    if (!(s.loading >= 0.0)) throw ConfigError("stack.loading", "must be >= 0");
    for (std::size_t i = 0; i < s.certificates.size(); ++i) {
      const Certificate& cert = s.certificates[i];
      if (!(cert.risk_discount >= 0.0 && cert.risk_discount < 1.0)) {
        throw ConfigError(path_of("stack.certificates", i) + ".discount", "must be in [0, 1)");
      }
      if (cert.issuer.empty()) {
        throw ConfigError(path_of("stack.certificates", i) + ".issuer", "must be non-empty");
      }
    }
  }
  if (c.claim_deadline < 1) throw ConfigError("claim_deadline", "must be at least 1 tick");
  if (c.verifier_delay < 0) throw ConfigError("verifier_delay", "must be >= 0");
}

World::World(const ScenarioConfig& config)
    : config_(&config),
      ledger_(ProtocolFees{config.params.verifier_fee, config.params.reputation_cost}) {
  const Funding& f = config.funding;
  for (const AgentProfile& a : config.population) ledger_.fund(AccountId::agent(a.id), f.agent);
  std::set<std::string> insurer_ids;
  for (const InsurerSpec& s : config.insurers) insurer_ids.insert(s.id);
  if (config.stack) {
    insurer_ids.insert(config.stack->master);
    for (const Certificate& c : config.stack->certificates) insurer_ids.insert(c.issuer);
  }
  for (const std::string& id : insurer_ids) ledger_.fund(AccountId::insurer(id), f.insurer);
  ledger_.fund(AccountId::user(kUser), f.user);
  ledger_.fund(AccountId::external(), f.external);
}

RiskPosterior& World::posterior(const std::string& insurer, const std::string& agent) {
  auto key = std::make_pair(insurer, agent);
  auto it = posteriors_.find(key);
  if (it != posteriors_.end()) return it->second;
  RiskPosterior prior;
  for (const InsurerSpec& s : config_->insurers) {
    if (s.id == insurer) prior = s.prior;
  }
  for (const AgentProfile& a : config_->population) {
    if (a.id == agent) prior = apply_safeguards(prior, a.safeguards, config_->safeguard_credits);
  }
  return posteriors_.emplace(key, prior).first->second;
}

StrategyProfile rational_profile(const MechanismParams& params) {
  return solve_spe(build_game(params)).profile;
}

namespace {

struct Quote {
  std::string insurer;
  Money premium;
  double loading = 0.0;
};

// Lowest quote wins; ties go to the insurer listed first.
Quote best_quote(World& world, const AgentProfile& agent) {
  const ScenarioConfig& cfg = world.config();
  if (cfg.stack) {
    const StackComposition comp =
        compose_stack(cfg.stack->base_risk, cfg.stack->certificates, world.now(), cfg.stack->floor);
    return {cfg.stack->master,
            price_premium_at_rate(comp.residual_risk, cfg.params.insurer_stake, cfg.stack->loading),
            cfg.stack->loading};
  }
  std::optional<Quote> best;
  for (const InsurerSpec& s : cfg.insurers) {
    const Money premium =
        cfg.pricing == Pricing::kFixed
            ? cfg.params.premium
            : price_premium(world.posterior(s.id, agent.id), cfg.params.insurer_stake, s.loading);
    if (!best || premium < best->premium) best = Quote{s.id, premium, s.loading};
  }
  return *best;
}

void pay_signed(Ledger& ledger, const AccountId& party, SignedMoney amount, FlowKind memo,
                Tick tick) {
  if (amount.micros() >= 0) {
    ledger.transfer(AccountId::external(), party, Money::from_micros(amount.micros()), memo, tick);
  } else {
    ledger.transfer(party, AccountId::external(), Money::from_micros(-amount.micros()), memo,
                    tick);
  }
}

AgentAction choose_action(const ScenarioConfig& cfg, const AgentProfile& agent,
                          const MechanismParams& p, const StrategyProfile& profile, bool insured,
                          double draw) {
  const bool tempted = draw < cfg.policies.temptation;
  // Without enforcement nothing is ever claimed, so a deviation pays G.
  const SignedMoney deviation = insured ? caught_deviation_payoff(p) : SignedMoney(p.gain);
  switch (cfg.policies.agent) {
    case AgentBehavior::kRationalSpe:
      if (insured) return profile.agent;
      return deviation > p.honest_payoff ? AgentAction::kMalicious : AgentAction::kHonest;
    case AgentBehavior::kOpportunistic:
      return tempted && deviation > p.honest_payoff ? AgentAction::kMalicious
                                                    : AgentAction::kHonest;
    case AgentBehavior::kAlwaysMalicious:
      return AgentAction::kMalicious;
    case AgentBehavior::kAlwaysHonest:
      return AgentAction::kHonest;
    case AgentBehavior::kPropensity:
      return draw < agent.theta ? AgentAction::kMalicious : AgentAction::kHonest;
  }
  return AgentAction::kHonest;
}

// Insurer without audit access: weigh accept/deny by the posterior belief
// that the claim is valid, assuming the user follows the SPE at Stage 4.
InsurerResponse blind_response(const MechanismParams& p, const StrategyProfile& profile,
                               double belief_valid) {
  auto insurer_payoff = [&](ClaimValidity v, InsurerResponse r) {
    const AgentAction a =
        v == ClaimValidity::kValid ? AgentAction::kMalicious : AgentAction::kHonest;
    ClaimOutcome o = ClaimOutcome::kAccepted;
    if (r == InsurerResponse::kDeny) {
      o = profile.dispute(v) == DisputeChoice::kEscalate ? ClaimOutcome::kDeniedEscalated
                                                         : ClaimOutcome::kDeniedDropped;
    }
    return static_cast<long double>(leaf_payoffs(p, GamePath{a, o}).insurer.micros());
  };
  const long double q = belief_valid;
  const long double accept = q * insurer_payoff(ClaimValidity::kValid, InsurerResponse::kAccept) +
                             (1 - q) * insurer_payoff(ClaimValidity::kInvalid, InsurerResponse::kAccept);
  const long double deny = q * insurer_payoff(ClaimValidity::kValid, InsurerResponse::kDeny) +
                           (1 - q) * insurer_payoff(ClaimValidity::kInvalid, InsurerResponse::kDeny);
  return accept >= deny ? InsurerResponse::kAccept : InsurerResponse::kDeny;
}

SignedMoney delta(const Ledger& ledger, const AccountId& account, Money before) {
  return SignedMoney(ledger.balance(account)) - before;
}

}  // namespace

Tick interaction_expiry(Tick start, Tick verifier_delay) { return start + verifier_delay + 4; }

Interaction settle_interaction(Ledger& ledger, PolicyId policy_id, const std::string& user,
                               const MechanismParams& p, AgentAction action, Money claim_bond,
                               Tick start, Tick verifier_delay, const StageChoices& choices) {
  const PolicyRecord& policy = ledger.policy(policy_id);
  const AccountId agent_acc = AccountId::agent(policy.agent);
  const AccountId user_acc = AccountId::user(user);
  const Tick expiry = policy.terms.expiry;
  const bool harmed = action == AgentAction::kMalicious;
  const ClaimValidity truth = harmed ? ClaimValidity::kValid : ClaimValidity::kInvalid;
  Interaction out;

  // Stage 1. The agent's service revenue covers the premium it paid.
  const Tick incident = start + 1;
  ledger.transfer(AccountId::external(), agent_acc, policy.terms.premium,
                  FlowKind::kServiceRevenue, incident);
  if (harmed) {
    ledger.transfer(AccountId::external(), agent_acc, p.gain, FlowKind::kMisbehaviorGain, incident);
    ledger.transfer(user_acc, AccountId::external(), p.loss, FlowKind::kHarm, incident);
  } else {
    pay_signed(ledger, agent_acc, p.honest_payoff, FlowKind::kHonestSurplus, incident);
  }

  // Stage 2.
  bool claim = choices.claim(harmed);
  const Money claim_amount = std::min(p.loss, policy.stake_remaining - policy.reserved);
  if (claim_amount.is_zero() || ledger.balance(user_acc) < claim_bond) claim = false;

  if (claim) {
    out.claimed = true;
    ClaimRecord c =
        ledger.file_claim(policy_id, user, claim_amount, truth, claim_bond, incident, incident);

    // Stage 3.
    c = ledger.respond_claim(c.id, choices.respond(ledger, c.id), incident + 1);

    // Stage 4.
    if (c.state == ClaimState::kDenied) {
      const bool escalate = choices.dispute(truth) == DisputeChoice::kEscalate &&
                            ledger.balance(user_acc) >= p.bond;
      if (escalate) {
        ledger.escalate(c.id, incident + 2);
        c = ledger.adjudicate(c.id, incident + 2 + verifier_delay);
        out.escalated = true;
        out.outcome = ClaimOutcome::kDeniedEscalated;
      } else {
        c = ledger.drop_claim(c.id, incident + 2);
        out.outcome = ClaimOutcome::kDeniedDropped;
      }
    } else {
      out.outcome = ClaimOutcome::kAccepted;
    }
    out.final_state = c.state;
    out.resolution_ticks = *c.resolved_tick - c.filed_tick;
    if (c.state == ClaimState::kAccepted || c.state == ClaimState::kUpheldValid) {
      out.compensation = c.amount;
    }
    out.caught = c.state == ClaimState::kUpheldValid ||
                 (c.state == ClaimState::kAccepted && truth == ClaimValidity::kValid);
  }
  if (out.caught) {
    const Money loss = std::min(p.future_value, ledger.balance(agent_acc));
    ledger.transfer(agent_acc, AccountId::external(), loss, FlowKind::kFutureValueLoss, expiry);
  }
  ledger.expire_policy(policy_id, expiry);
  return out;
}

EpisodeRecord run_episode(World& world, std::int64_t index, Rng& rng) {
  const ScenarioConfig& cfg = world.config();
  const AgentProfile& agent =
      cfg.population[static_cast<std::size_t>(index) % cfg.population.size()];
  Ledger& ledger = world.ledger();
  const Tick start = world.now();

  EpisodeRecord rec;
  rec.index = index;
  rec.agent = agent.id;

  // Fixed draw order keeps each episode's stream independent of its branches.
  const Money gain = agent.gain.sample(rng, cfg.params.gain);
  const double draw = rng.uniform01();
  rec.gain = gain;

  MechanismParams p = cfg.params;
  p.gain = gain;

  const AccountId agent_acc = AccountId::agent(agent.id);
  const AccountId user_acc = AccountId::user(World::kUser);
  const Money agent_before = ledger.balance(agent_acc);
  const Money user_before = ledger.balance(user_acc);

  ledger.begin_transaction();
  try {
    if (!cfg.enforcement_enabled) {
      rec.action = choose_action(cfg, agent, p, StrategyProfile{}, false, draw);
      const Tick t = start + 1;
      if (rec.action == AgentAction::kHonest) {
        pay_signed(ledger, agent_acc, p.honest_payoff, FlowKind::kHonestSurplus, t);
      } else {
        ledger.transfer(AccountId::external(), agent_acc, gain, FlowKind::kMisbehaviorGain, t);
        ledger.transfer(user_acc, AccountId::external(), p.loss, FlowKind::kHarm, t);
      }
      rec.agent_net = delta(ledger, agent_acc, agent_before);
      rec.user_net = delta(ledger, user_acc, user_before);
      ledger.commit();
      world.advance_to(start + 2);
      return rec;
    }

    const Quote quote = best_quote(world, agent);
    if (!decide_purchase(agent, quote.premium, cfg.params)) {
      ledger.rollback();
      rec.status = EpisodeStatus::kExcluded;
      rec.note = "declined quote " + quote.premium.to_string();
      world.advance_to(start + 1);
      return rec;
    }

    const Tick expiry = interaction_expiry(start, cfg.verifier_delay);
    const AccountId insurer_acc = AccountId::insurer(quote.insurer);
    const Money insurer_before = ledger.balance(insurer_acc);

    Ledger::Underwriting uw;
    try {
      if (cfg.stack) {
        StackTerms terms;
        terms.coverage = p.insurer_stake;
        terms.deductible = p.agent_stake;
        terms.bond = p.bond;
        terms.claim_deadline = cfg.claim_deadline;
        terms.expiry = expiry;
        terms.loading = cfg.stack->loading;
        terms.layer1_cut = cfg.stack->layer1_cut;
        // Lapsed certificates earn no discount and no share of the premium.
        const StackComposition comp = compose_stack(cfg.stack->base_risk,
                                                     cfg.stack->certificates, start,
                                                     cfg.stack->floor);
        const InsurerStack stack = make_stack(cfg.stack->master, cfg.stack->base_risk,
                                              comp.applied, start, cfg.stack->floor);
        uw = underwrite_stack(ledger, agent.id, stack, terms, start).underwriting;
      } else {
        PolicyTerms terms;
        terms.coverage = p.insurer_stake;
        terms.deductible = p.agent_stake;
        terms.premium = quote.premium;
        terms.bond = p.bond;
        terms.claim_deadline = cfg.claim_deadline;
        terms.expiry = expiry;
        uw = ledger.underwrite(agent.id, quote.insurer, terms, start);
      }
    } catch (const LedgerError& e) {
      if (e.code() != LedgerErrc::kInsufficientFunds || e.party() != Party::kAgent) throw;
      ledger.rollback();
      rec.status = EpisodeStatus::kExcluded;
      rec.note = "cannot afford coverage";
      world.advance_to(start + 1);
      return rec;
    }
    // Users require proof of coverage for at least their exposure.
    const CoverageCheck check = ledger.verify_coverage(uw.credential, p.loss, start);
    if (!check) {
      ledger.rollback();
      rec.status = EpisodeStatus::kExcluded;
      rec.note = "coverage rejected: " + std::string(to_string(check.reason));
      world.advance_to(start + 1);
      return rec;
    }
    rec.insurer = quote.insurer;
    rec.premium = uw.policy.terms.premium;
    p.premium = rec.premium;

    const StrategyProfile profile = rational_profile(p);
    rec.action = choose_action(cfg, agent, p, profile, true, draw);

    StageChoices choices;
    choices.claim = [&](bool harmed_user) {
      switch (cfg.policies.user) {
        case UserBehavior::kRationalSpe:
          return harmed_user ? profile.user_claims_when_harmed : profile.user_claims_when_unharmed;
        case UserBehavior::kAlwaysClaim: return true;
        case UserBehavior::kNeverClaim: return false;
      }
      return false;
    };
    choices.respond = [&](Ledger& l, ClaimId id) {
      switch (cfg.policies.insurer) {
        case InsurerBehavior::kRationalSpe:
          if (agent.audit_access_granted) {
            rec.audited = true;
            return profile.response(l.audit_claim(id));
          }
          return blind_response(p, profile, world.posterior(quote.insurer, agent.id).mean());
        case InsurerBehavior::kAlwaysDeny: return InsurerResponse::kDeny;
        case InsurerBehavior::kAlwaysAccept: return InsurerResponse::kAccept;
      }
      return InsurerResponse::kAccept;
    };
    // The user knows whether they were harmed.
    choices.dispute = [&](ClaimValidity truth) { return profile.dispute(truth); };

    const Interaction done = settle_interaction(ledger, uw.policy.id, World::kUser, p, rec.action,
                                                cfg.claim_bond, start, cfg.verifier_delay, choices);
    rec.claimed = done.claimed;
    rec.escalated = done.escalated;
    rec.final_claim_state = done.final_state;
    rec.resolution_ticks = done.resolution_ticks;
    rec.compensation_paid = done.compensation;
    const bool caught = done.caught;
    const bool harmed = rec.action == AgentAction::kMalicious;
    const ClaimOutcome outcome = done.outcome;

    rec.path = GamePath{rec.action, outcome};
    rec.agent_net = delta(ledger, agent_acc, agent_before);
    rec.insurer_net = delta(ledger, insurer_acc, insurer_before);
    rec.user_net = delta(ledger, user_acc, user_before);
    ledger.commit();

    // Experience rating: audit access reveals conduct, otherwise only a
    // verified claim does.
    RiskPosterior& post = world.posterior(quote.insurer, agent.id);
    post = update_posterior(post, agent.audit_access_granted ? harmed : caught);
    ++world.policies_written()[quote.insurer];
    world.advance_to(expiry + 1);
    return rec;
  } catch (const std::exception& e) {
    if (ledger.in_transaction()) ledger.rollback();
    EpisodeRecord aborted;
    aborted.index = index;
    aborted.agent = agent.id;
    aborted.gain = gain;
    aborted.status = EpisodeStatus::kAborted;
    aborted.note = e.what();
    world.advance_to(start + 1);
    return aborted;
  }
}

ScenarioRun run_scenario_detailed(const ScenarioConfig& config, const EpisodeSink& sink) {
  validate(config);
  World world(config);
  ScenarioRun run{MetricsReport{}, world.ledger().total_supply(), Money{}, Ledger{}};
  MetricsReport& m = run.report;
  m.episodes = config.episodes;

  std::int64_t resolved_claims = 0;
  std::int64_t resolution_total = 0;
  for (std::int64_t i = 0; i < config.episodes; ++i) {
    Rng rng = Rng::for_stream(config.seed, static_cast<std::uint64_t>(i));
    const EpisodeRecord rec = run_episode(world, i, rng);
    if (sink) sink(rec);

    ++m.user_loss_distribution[rec.user_net.micros()];
    switch (rec.status) {
      case EpisodeStatus::kExcluded: ++m.excluded; continue;
      case EpisodeStatus::kAborted: ++m.aborted; continue;
      case EpisodeStatus::kCompleted: ++m.completed; break;
    }
    if (rec.action == AgentAction::kMalicious) ++m.misbehaviors;
    if (rec.claimed) {
      ++m.claims_filed;
      ++resolved_claims;
      resolution_total += rec.resolution_ticks;
    }
    if (rec.escalated) {
      ++m.disputes;
      ++m.verifier_invocations;
    }
    m.premiums_collected += rec.premium;
    m.losses_paid += rec.compensation_paid;
  }

  if (m.completed > 0) {
    m.misbehavior_rate = static_cast<double>(m.misbehaviors) / static_cast<double>(m.completed);
    m.dispute_rate = static_cast<double>(m.disputes) / static_cast<double>(m.completed);
  }
  if (resolved_claims > 0) {
    m.mean_resolution_ticks =
        static_cast<double>(resolution_total) / static_cast<double>(resolved_claims);
  }
  if (!m.premiums_collected.is_zero()) {
    m.insurer_loss_ratio = static_cast<double>(m.losses_paid.micros()) /
                           static_cast<double>(m.premiums_collected.micros());
  }
  m.audit_access_events = world.ledger().audit_reads();
  std::int64_t written = 0;
  for (const auto& [id, n] : world.policies_written()) written += n;
  for (const auto& [id, n] : world.policies_written()) {
    m.market_concentration[id] = static_cast<double>(n) / static_cast<double>(written);
  }
  m.shortfalls = static_cast<std::int64_t>(world.ledger().shortfalls().size());

  run.supply_after = world.ledger().total_supply();
  run.ledger = world.ledger();
  return run;
}

MetricsReport run_scenario(const ScenarioConfig& config) {
  return run_scenario_detailed(config).report;
}

}  // namespace insured
