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

// Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "insured/cli.hpp"
#include "insured/game.hpp"
#include "insured/market.hpp"
#include "insured/scenario.hpp"
#include "insured/sim.hpp"
#include "support/draws.hpp"
#include "support/ledger_ops.hpp"

namespace {

using namespace insured;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const std::string kScenarios = std::string(INSURED_SOURCE_DIR) + "/scenarios/";
constexpr std::uint64_t kSeed = 20260415;
constexpr int kDraws = 10'000;

std::vector<MechanismParams> all_hold_draws() {
  testing::ParamDraws draws(kSeed, 1);
  std::vector<MechanismParams> out;
  for (int i = 0; i < kDraws; ++i) out.push_back(draws.all_hold());
  return out;
}

Verdict theorem_reproduction() {
  const auto draws = all_hold_draws();
  const auto t0 = Clock::now();
  const auto profiles = solve_batch(draws);
  const double secs = seconds_since(t0);
  const auto ok = std::count(profiles.begin(), profiles.end(), StrategyProfile::compliant());
  return {ok == kDraws && secs < 10.0,
          std::to_string(ok) + "/" + std::to_string(kDraws) + " compliant in " +
              fmt("%.3f", secs) + " s"};
}

Verdict oracle_equivalence() {
  auto draws = all_hold_draws();
  testing::ParamDraws free(kSeed, 2);
  for (int i = 0; i < kDraws; ++i) draws.push_back(free.unconstrained());
  const auto member = oracle_membership(draws);
  const auto ok = std::count(member.begin(), member.end(), 1);
  return {ok == static_cast<long>(draws.size()),
          std::to_string(ok) + "/" + std::to_string(draws.size()) + " in the oracle set"};
}

Verdict necessity_probes() {
  testing::ParamDraws draws(kSeed, 3);
  std::vector<MechanismParams> deter, access;
  for (int i = 0; i < kDraws; ++i) {
    deter.push_back(draws.deterrence_violated());
    access.push_back(draws.access_violated());
  }
  long malicious = 0, drop = 0;
  for (const StrategyProfile& s : solve_batch(deter)) malicious += s.agent == AgentAction::kMalicious;
  for (const StrategyProfile& s : solve_batch(access)) drop += s.on_valid_denial == DisputeChoice::kDrop;
  return {malicious == kDraws && drop == kDraws,
          "deterrence violated -> Malicious " + std::to_string(malicious) + "/" +
              std::to_string(kDraws) + "; access violated -> Drop " + std::to_string(drop) +
              "/" + std::to_string(kDraws)};
}

Verdict payoff_fidelity() {
  testing::ParamDraws draws(kSeed, 4);
  int ok = 0;
  constexpr int kSets = 1000;
  for (int i = 0; i < kSets; ++i) {
    const MechanismParams p = draws.unconstrained();
    const std::int64_t L = p.loss.micros(), G = p.gain.micros(), SA = p.agent_stake.micros(),
                       B = p.bond.micros(), F = p.verifier_fee.micros(),
                       R = p.reputation_cost.micros(), V = p.future_value.micros();
    const LeafPayoffs esc = leaf_payoffs(p, {AgentAction::kMalicious, ClaimOutcome::kDeniedEscalated});
    const LeafPayoffs acc = leaf_payoffs(p, {AgentAction::kMalicious, ClaimOutcome::kAccepted});
    const LeafPayoffs inv = leaf_payoffs(p, {AgentAction::kHonest, ClaimOutcome::kDeniedEscalated});
    const bool good = esc.user.micros() == L + B - F &&       // user wins the dispute
                      acc.insurer.micros() == -L + SA &&      // insurer pays, seizes deductible
                      acc.agent.micros() == G - SA - V &&     // caught agent
                      esc.agent.micros() == G - SA - V &&
                      esc.insurer.micros() == -L - B - F - R &&  // insurer loses the dispute
                      inv.user.micros() == -B - F;               // user loses the dispute
    ok += good;
  }
  return {ok == kSets, std::to_string(ok) + "/" + std::to_string(kSets) + " parameter sets exact"};
}

Verdict ledger_conservation() {
  constexpr int kSequences = 100'000;
  constexpr int kSteps = 12;
  const auto t0 = Clock::now();
  long conserved = 0, rejected = 0;
#pragma omp parallel for reduction(+ : conserved, rejected) schedule(static)
  for (int s = 0; s < kSequences; ++s) {
    testing::LedgerFuzzer fuzz(kSeed, static_cast<std::uint64_t>(s));
    const Money supply = fuzz.ledger().total_supply();
    bool ok = true;
    for (int i = 0; i < kSteps; ++i) {
      fuzz.step();
      ok = ok && fuzz.ledger().total_supply() == supply;
    }
    conserved += ok;
    rejected += fuzz.failures();
  }
  const double secs = seconds_since(t0);
  return {conserved == kSequences && secs < 30.0,
          std::to_string(conserved) + "/" + std::to_string(kSequences) + " sequences (" +
              std::to_string(rejected) + " rejected ops) in " + fmt("%.2f", secs) + " s"};
}

Verdict ledger_game_consistency() {
  testing::ParamDraws draws(kSeed, 6);
  int paths = 0, exact = 0;
  for (int i = 0; i < 100; ++i) {
    const MechanismParams p = i == 0 ? testing::base_params() : draws.all_hold();
    for (GamePath path : all_paths()) {
      const testing::PathNets nets = testing::drive_path(p, path);
      const LeafPayoffs leaf = leaf_payoffs(p, path);
      const bool offset_leaf =
          path == GamePath{AgentAction::kMalicious, ClaimOutcome::kDeniedEscalated};
      const bool user_ok = offset_leaf ? leaf.user - nets.user == SignedMoney(p.loss)
                                       : nets.user == leaf.user;
      exact += nets.reached == path && nets.conserved && nets.agent == leaf.agent &&
               nets.insurer == leaf.insurer && user_ok;
      ++paths;
    }
  }
  return {exact == paths, std::to_string(exact) + "/" + std::to_string(paths) +
                              " path runs exact over 8 paths (M/Claim/Deny/Escalate user offset = L)"};
}

Verdict optimistic_execution() {
  const ScenarioConfig c = load_scenario(kScenarios + "optimistic.json");
  const MetricsReport m = run_scenario(c);
  return {m.episodes >= 10'000 && m.verifier_invocations == 0 && m.dispute_rate == 0.0 &&
              m.completed > 0,
          std::to_string(m.episodes) + " episodes, verifier_invocations=" +
              std::to_string(m.verifier_invocations) + ", dispute_rate=" +
              fmt("%g", m.dispute_rate)};
}

Verdict deterrence_effect() {
  ScenarioConfig c = load_scenario(kScenarios + "deterrence.json");
  c.enforcement_enabled = true;
  const MetricsReport on = run_scenario(c);
  c.enforcement_enabled = false;
  const MetricsReport off = run_scenario(c);
  const double diff = off.misbehavior_rate - on.misbehavior_rate;
  return {on.episodes >= 10'000 && diff > 0.05,
          "misbehavior_rate on=" + fmt("%.4f", on.misbehavior_rate) +
              " off=" + fmt("%.4f", off.misbehavior_rate) + " diff=" + fmt("%.4f", diff)};
}

Verdict experience_rating() {
  // The insurer observes conduct through audits on every episode.
  std::string detail;
  bool pass = true;
  for (double theta : {0.05, 0.3, 0.7}) {
    ScenarioConfig c;
    c.seed = kSeed;
    c.episodes = 5000;
    c.params = testing::base_params();
    c.params.premium = Money::units(1);
    c.policies.agent = AgentBehavior::kPropensity;
    c.population.push_back({"agent", theta, {}, {}, true});
    c.insurers.push_back({"insurer", 0.0, {}});
    validate(c);
    World world(c);
    std::int64_t observed = 0;
    for (std::int64_t i = 0; i < c.episodes; ++i) {
      Rng rng = Rng::for_stream(c.seed, static_cast<std::uint64_t>(i));
      observed += run_episode(world, i, rng).status == EpisodeStatus::kCompleted;
    }
    const double mean = world.posterior("insurer", "agent").mean();
    const double err = std::abs(mean - theta);
    pass = pass && observed == 5000 && err < 0.02;
    detail += (detail.empty() ? "" : "; ") + fmt("theta=%.2f", theta) + fmt(" mean=%.4f", mean);
  }
  return {pass, detail + " after 5000 observations"};
}

Verdict stack_composition() {
  std::vector<Certificate> certs{{"l1-safety", "safety", 0.5, 1000},
                                 {"l1-financial", "financial", 0.4, 1000}};
  const double residual = compose_stack(0.10, certs, 0).residual_risk;
  bool identical = true;
  std::string first_report;
  std::sort(certs.begin(), certs.end(),
            [](const Certificate& a, const Certificate& b) { return a.domain < b.domain; });
  do {
    const StackComposition comp = compose_stack(0.10, certs, 0);
    Ledger ledger;
    ledger.fund(AccountId::agent("a"), Money::units(1000));
    ledger.fund(AccountId::insurer("master"), Money::units(1000));
    StackTerms terms;
    terms.coverage = Money::units(100);
    terms.expiry = 10;
    terms.loading = 0.2;
    terms.layer1_cut = 0.5;
    const StackUnderwriting uw =
        underwrite_stack(ledger, "a", make_stack("master", 0.10, certs, 0), terms, 0);
    std::ostringstream report;
    report << fmt("%.17g", comp.residual_risk) << '|' << uw.premium.to_string();
    for (const auto& [issuer, share] : uw.layer1_shares) report << '|' << issuer << '=' << share.to_string();
    for (const Certificate& c : comp.applied) report << '|' << c.domain;
    ledger.write_event_log(report);
    if (first_report.empty()) first_report = report.str();
    identical = identical && report.str() == first_report;
  } while (std::next_permutation(certs.begin(), certs.end(),
                                 [](const Certificate& a, const Certificate& b) {
                                   return a.domain < b.domain;
                                 }));
  return {residual == 0.03 && identical,
          "residual=" + fmt("%.17g", residual) + (residual == 0.03 ? " (== 0.03)" : " (!= 0.03)") +
              ", permutations " + (identical ? "identical" : "differ")};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict determinism() {
  const auto dir = std::filesystem::temp_directory_path();
  const auto r1 = dir / "insured-acc-report-1.json", r2 = dir / "insured-acc-report-2.json";
  const auto c1 = dir / "insured-acc-sweep-1.csv", c8 = dir / "insured-acc-sweep-8.csv";
  std::ostringstream out, err;
  int rc = 0;
  for (const auto& path : {r1, r2}) {
    rc |= run_cli({"simulate", kScenarios + "deterrence.json", "--out", path.string()}, out, err);
  }
  for (const auto& [path, jobs] : {std::pair{c1, "1"}, std::pair{c8, "8"}}) {
    rc |= run_cli({"sweep", "--grid", "G=10,40,80;S_A=0,30,60;F=50,500", "--scenario",
                   kScenarios + "deterrence.json", "--out", path.string(), "--jobs", jobs},
                  out, err);
  }
  const std::string a = slurp(r1), b = slurp(r2), x = slurp(c1), y = slurp(c8);
  const bool pass = rc == 0 && !a.empty() && a == b && !x.empty() && x == y;
  return {pass, std::string("simulate reports ") + (a == b ? "identical" : "differ") +
                    ", sweep CSV jobs=1 vs jobs=8 " + (x == y ? "identical" : "differ") +
                    (rc ? " (command failed: " + err.str() + ")" : "")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"theorem reproduction", theorem_reproduction},
      {"oracle equivalence", oracle_equivalence},
      {"condition necessity probes", necessity_probes},
      {"payoff formula fidelity", payoff_fidelity},
      {"ledger conservation", ledger_conservation},
      {"ledger/game consistency", ledger_game_consistency},
      {"optimistic execution", optimistic_execution},
      {"deterrence effect", deterrence_effect},
      {"experience-rating convergence", experience_rating},
      {"stack composition", stack_composition},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("%s %2zu %-30s %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
