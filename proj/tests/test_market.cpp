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

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "insured/market.hpp"
#include "support/draws.hpp"

namespace insured {

namespace {

Certificate cert(std::string domain, double discount, std::string issuer = "",
                 Tick expiry = 1'000) {
  if (issuer.empty()) issuer = "l1-" + domain;
  return {std::move(issuer), std::move(domain), discount, expiry};
}

}  // namespace

TEST_SUITE("market") {

TEST_CASE("premium pricing") {
  CHECK(price_premium({4, 8}, Money::units(100), 0.2) == Money::units(40));
  CHECK(price_premium({1, 1}, Money::units(100), 0.0) == Money::units(50));
  CHECK(price_premium({1, 1e9}, Money::from_micros(1), 0.0) == Money::from_micros(1));
  CHECK(price_premium({1, 3}, Money{}, 0.5) == Money{});
  // Half a micro-unit rounds up.
  CHECK(price_premium_at_rate(0.5, Money::from_micros(3), 0.0) == Money::from_micros(2));
}

TEST_CASE("premium is monotone in mean, coverage and loading") {
  Rng rng = Rng::for_stream(3, 0);
  for (int i = 0; i < 2000; ++i) {
    const double a = 0.1 + 10 * rng.uniform01(), b = 0.1 + 10 * rng.uniform01();
    const Money cov = Money::from_micros(rng.uniform_int(0, 1'000'000'000));
    const double load = rng.uniform01();
    const Money base = price_premium({a, b}, cov, load);
    CHECK(price_premium({a + 1, b}, cov, load) >= base);
    CHECK(price_premium({a, b}, cov + Money::units(1), load) >= base);
    CHECK(price_premium({a, b}, cov, load + 0.1) >= base);
  }
}

TEST_CASE("posterior updates") {
  RiskPosterior p;
  p = update_posterior(p, true);
  CHECK(p == RiskPosterior{2, 1});
  RiskPosterior q;
  for (int i = 0; i < 3; ++i) q = update_posterior(q, true);
  for (int i = 0; i < 7; ++i) q = update_posterior(q, false);
  CHECK(q.mean() == doctest::Approx(1.0 / 3.0));
  CHECK(q.valid());
}

TEST_CASE("posterior mean converges on theta") {
  for (double theta : {0.05, 0.3, 0.7}) {
    Rng rng = Rng::for_stream(8, static_cast<std::uint64_t>(theta * 100));
    RiskPosterior p;
    for (int i = 0; i < 100'000; ++i) p = update_posterior(p, rng.bernoulli(theta));
    CHECK(std::abs(p.mean() - theta) < 0.02);
  }
}

TEST_CASE("safeguards add clean observations") {
  const RiskPosterior p = apply_safeguards({1, 1}, {"sandbox", "unknown"}, {{"sandbox", 8.0}});
  CHECK(p == RiskPosterior{1, 9});
}

TEST_CASE("purchase decision") {
  MechanismParams params = testing::base_params();
  AgentProfile honest{"a", 0.0, {}, {}, true};
  CHECK(decide_purchase(honest, Money::units(1), params));
  CHECK_FALSE(decide_purchase(honest, Money::units(6), params));
  CHECK_FALSE(decide_purchase(honest, Money::units(5), params));  // tie declines
  CHECK(decide_purchase(honest, Money::units(6), params, 2));     // amortized: 5 - 3 > 0

  // Risky agents value cover by their expected deviation payoff.
  AgentProfile risky{"b", 1.0, {}, {}, true};
  params.gain = Money::units(100);
  CHECK(decide_purchase(risky, Money::units(60), params));
  CHECK_FALSE(decide_purchase(risky, Money::units(70), params));
}

TEST_CASE("gain distributions") {
  Rng rng = Rng::for_stream(1, 1);
  GainDistribution fixed;
  CHECK(fixed.sample(rng, Money::units(7)) == Money::units(7));
  GainDistribution uni{GainDistribution::Kind::kUniform, Money::units(2), Money::units(4), {}};
  GainDistribution geo{GainDistribution::Kind::kGeometric, {}, {}, Money::units(10)};
  double sum = 0;
  for (int i = 0; i < 20'000; ++i) {
    const Money x = uni.sample(rng, Money{});
    CHECK(x >= Money::units(2));
    CHECK(x <= Money::units(4));
    sum += static_cast<double>(geo.sample(rng, Money{}).micros());
  }
  CHECK(sum / 20'000 / kMicrosPerUnit == doctest::Approx(10.0).epsilon(0.05));
}

TEST_CASE("stack composition") {
  const std::vector<Certificate> certs{cert("safety", 0.5), cert("financial", 0.4)};
  CHECK(compose_stack(0.10, certs, 0).residual_risk == 0.03);
  CHECK(compose_stack(0.10, {}, 0).residual_risk == 0.10);
  CHECK(compose_stack(0.10, std::vector<Certificate>{cert("x", 0.9999999)}, 0).residual_risk ==
        kDefaultRiskFloor);
}

TEST_CASE("stack composition is order independent") {
  std::vector<Certificate> certs{cert("safety", 0.5), cert("financial", 0.4),
                                 cert("privacy", 0.13, "p1"), cert("privacy", 0.07, "p0"),
                                 cert("ops", 0.33, "", 3)};
  std::sort(certs.begin(), certs.end(), [](const Certificate& a, const Certificate& b) {
    return a.risk_discount < b.risk_discount;
  });
  const StackComposition ref = compose_stack(0.7, certs, 5);
  CHECK(ref.warnings.size() == 1);
  do {
    const StackComposition c = compose_stack(0.7, certs, 5);
    CHECK(c.residual_risk == ref.residual_risk);
    CHECK(c.applied == ref.applied);
    CHECK(c.warnings == ref.warnings);
  } while (std::next_permutation(certs.begin(), certs.end(),
                                 [](const Certificate& a, const Certificate& b) {
                                   return a.risk_discount < b.risk_discount;
                                 }));
}

TEST_CASE("residual is nonincreasing in each discount") {
  Rng rng = Rng::for_stream(4, 0);
  for (int i = 0; i < 1000; ++i) {
    const double d1 = 0.99 * rng.uniform01(), d2 = 0.99 * rng.uniform01();
    const double bump = std::min(0.999, d1 + 0.01 * rng.uniform01());
    const double base = compose_stack(0.5, std::vector<Certificate>{cert("a", d1), cert("b", d2)}, 0).residual_risk;
    CHECK(compose_stack(0.5, std::vector<Certificate>{cert("a", bump), cert("b", d2)}, 0).residual_risk <= base);
  }
}

TEST_CASE("proportional split") {
  const std::vector<double> w{0.5, 0.4};
  const auto s = split_proportional(Money::units(9), w);
  CHECK(s == std::vector<Money>{Money::units(5), Money::units(4)});
  const std::vector<double> thirds{1, 1, 1};
  const auto t = split_proportional(Money::from_micros(10), thirds);
  CHECK(t == std::vector<Money>{Money::from_micros(4), Money::from_micros(3), Money::from_micros(3)});
}

TEST_CASE("stack underwriting") {
  Ledger ledger;
  ledger.fund(AccountId::agent("a"), Money::units(1000));
  ledger.fund(AccountId::insurer("master"), Money::units(1000));
  const std::vector<Certificate> certs{cert("safety", 0.5), cert("financial", 0.4)};
  const InsurerStack stack = make_stack("master", 0.10, certs, 0);
  CHECK(stack.residual_risk == 0.03);
  StackTerms terms;
  terms.coverage = Money::units(100);
  terms.expiry = 10;
  terms.loading = 0.2;
  terms.layer1_cut = 0.5;
  const Money supply = ledger.total_supply();
  const StackUnderwriting uw = underwrite_stack(ledger, "a", stack, terms, 0);
  CHECK(uw.premium == Money::parse("3.6"));
  CHECK(uw.underwriting.policy.insurer == "master");
  // Cut of 1.8 split 5:4 between the financial and safety issuers.
  REQUIRE(uw.layer1_shares.size() == 2);
  CHECK(uw.layer1_shares[0] == std::pair<std::string, Money>{"l1-financial", Money::parse("0.8")});
  CHECK(uw.layer1_shares[1] == std::pair<std::string, Money>{"l1-safety", Money::parse("1")});
  CHECK(ledger.balance(AccountId::insurer("l1-safety")) == Money::units(1));
  CHECK(ledger.total_supply() == supply);

  const Ledger before = ledger;
  const InsurerStack stale = make_stack("master", 0.10, {cert("safety", 0.5, "", 2)}, 0);
  try {
    underwrite_stack(ledger, "a", stale, terms, 5);
    FAIL("expected ExpiredCertificate");
  } catch (const LedgerError& e) {
    CHECK(e.code() == LedgerErrc::kExpiredCertificate);
  }
  CHECK(ledger == before);
}

}  // TEST_SUITE

}  // namespace insured
