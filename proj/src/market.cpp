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

#include "insured/market.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace insured {

bool RiskPosterior::valid() const {
  return std::isfinite(alpha) && std::isfinite(beta) && alpha > 0.0 && beta > 0.0;
}

RiskPosterior update_posterior(const RiskPosterior& posterior, bool observed_misbehavior) {
  if (!posterior.valid()) throw std::invalid_argument("invalid risk posterior");
  RiskPosterior out = posterior;
  if (observed_misbehavior) {
    out.alpha += 1.0;
  } else {
    out.beta += 1.0;
  }
  return out;
}

RiskPosterior apply_safeguards(RiskPosterior prior, const std::set<std::string>& safeguards,
                               const std::map<std::string, double>& clean_pseudo_counts) {
  for (const std::string& tag : safeguards) {
    auto it = clean_pseudo_counts.find(tag);
    if (it != clean_pseudo_counts.end() && it->second > 0.0) prior.beta += it->second;
  }
  return prior;
}

Money price_premium_at_rate(double rate, Money coverage, double loading) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw std::invalid_argument("risk rate outside [0, 1]");
  if (!(loading >= 0.0) || !std::isfinite(loading)) {
    throw std::invalid_argument("loading must be a finite value >= 0");
  }
  const long double exact = static_cast<long double>(rate) *
                            static_cast<long double>(coverage.micros()) *
                            (1.0L + static_cast<long double>(loading));
  // Half-up rounding; the relative nudge absorbs binary representation error
  // in inputs like 0.03 or 1.2 so that decimal halves round up.
  const long double rounded = std::floor(exact + 0.5L + exact * 1e-13L);
  if (rounded > static_cast<long double>(INT64_MAX)) {
    throw MoneyError(MoneyErrc::kOverflow, "premium overflows");
  }
  auto micros = static_cast<std::int64_t>(rounded);
  if (micros == 0 && rate > 0.0 && !coverage.is_zero()) micros = 1;
  return Money::from_micros(micros);
}

Money price_premium(const RiskPosterior& posterior, Money coverage, double loading) {
  if (!posterior.valid()) throw std::invalid_argument("invalid risk posterior");
  return price_premium_at_rate(posterior.mean(), coverage, loading);
}

Money GainDistribution::sample(Rng& rng, Money fixed_gain) const {
  switch (kind) {
    case Kind::kFixed:
      return fixed_gain;
    case Kind::kUniform:
      return Money::from_micros(rng.uniform_int(low.micros(), high.micros()));
    case Kind::kGeometric: {
      if (mean.is_zero()) return Money{};
      // Failures before first success with p = 1 / (mean + 1).
      const double p = 1.0 / (static_cast<double>(mean.micros()) + 1.0);
      const double u = 1.0 - rng.uniform01();  // (0, 1]
      const double k = std::floor(std::log(u) / std::log1p(-p));
      return Money::from_micros(static_cast<std::int64_t>(
          std::min(k, static_cast<double>(INT64_MAX / 4))));
    }
  }
  return fixed_gain;
}

double GainDistribution::expected(Money fixed_gain) const {
  switch (kind) {
    case Kind::kFixed: return static_cast<double>(fixed_gain.micros());
    case Kind::kUniform:
      return (static_cast<double>(low.micros()) + static_cast<double>(high.micros())) / 2.0;
    case Kind::kGeometric: return static_cast<double>(mean.micros());
  }
  return static_cast<double>(fixed_gain.micros());
}

bool decide_purchase(const AgentProfile& agent, Money quote, const MechanismParams& params,
                     std::int64_t amortization_episodes) {
  if (amortization_episodes < 1) {
    throw std::invalid_argument("amortization horizon must be at least one episode");
  }
  const long double theta = agent.theta;
  const long double honest = static_cast<long double>(params.honest_payoff.micros());
  const long double deviation =
      static_cast<long double>(agent.gain.expected(params.gain)) -
      static_cast<long double>(params.agent_stake.micros());
  const long double amortized =
      static_cast<long double>(quote.micros()) / static_cast<long double>(amortization_episodes);
  const long double value = (1.0L - theta) * honest + theta * deviation - amortized;
  return value > 0.0L;
}

namespace {

bool canonical_less(const Certificate& a, const Certificate& b) {
  return std::tie(a.domain, a.issuer, a.risk_discount, a.expiry) <
         std::tie(b.domain, b.issuer, b.risk_discount, b.expiry);
}

}  // namespace

StackComposition compose_stack(double base_risk, std::span<const Certificate> certificates,
                               Tick now, double floor) {
  if (!(base_risk > 0.0 && base_risk <= 1.0)) {
    throw std::invalid_argument("base risk must be in (0, 1]");
  }
  if (!(floor > 0.0 && floor <= 1.0)) throw std::invalid_argument("risk floor must be in (0, 1]");

  std::vector<Certificate> sorted(certificates.begin(), certificates.end());
  std::sort(sorted.begin(), sorted.end(), canonical_less);

  StackComposition out;
  long double residual = base_risk;
  for (const Certificate& c : sorted) {
    if (!(c.risk_discount >= 0.0 && c.risk_discount < 1.0)) {
      throw std::invalid_argument("certificate discount must be in [0, 1)");
    }
    if (c.expiry <= now) {
      out.warnings.push_back("expired certificate excluded: " + c.domain + " from " +
                             c.issuer);
      continue;
    }
    residual *= 1.0L - static_cast<long double>(c.risk_discount);
    out.applied.push_back(c);
  }
  out.residual_risk = std::max(static_cast<double>(residual), floor);
  return out;
}

InsurerStack make_stack(std::string master, double base_risk, std::vector<Certificate> layer1,
                        Tick now, double floor) {
  InsurerStack stack;
  stack.master = std::move(master);
  stack.base_risk = base_risk;
  stack.floor = floor;
  stack.residual_risk = compose_stack(base_risk, layer1, now, floor).residual_risk;
  std::sort(layer1.begin(), layer1.end(), canonical_less);
  stack.layer1 = std::move(layer1);
  return stack;
}

std::vector<Money> split_proportional(Money total, std::span<const double> weights) {
  std::vector<Money> out(weights.size());
  const long double sum = std::accumulate(weights.begin(), weights.end(), 0.0L);
  if (weights.empty() || sum <= 0.0L) return out;

  std::vector<std::int64_t> whole(weights.size());
  std::vector<long double> frac(weights.size());
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const long double exact = static_cast<long double>(total.micros()) * weights[i] / sum;
    whole[i] = static_cast<std::int64_t>(std::floor(exact));
    frac[i] = exact - static_cast<long double>(whole[i]);
    assigned += whole[i];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::int64_t left = total.micros() - assigned, k = 0; left > 0; --left, ++k) {
    ++whole[order[static_cast<std::size_t>(k) % order.size()]];
  }
  for (std::size_t i = 0; i < weights.size(); ++i) out[i] = Money::from_micros(whole[i]);
  return out;
}

StackUnderwriting underwrite_stack(Ledger& ledger, const std::string& agent,
                                   const InsurerStack& stack, const StackTerms& terms,
                                   Tick tick) {
  if (!(terms.layer1_cut >= 0.0 && terms.layer1_cut <= 1.0)) {
    throw std::invalid_argument("layer-1 cut must be in [0, 1]");
  }
  const StackComposition composition =
      compose_stack(stack.base_risk, stack.layer1, tick, stack.floor);
  if (!composition.warnings.empty()) {
    throw LedgerError(LedgerErrc::kExpiredCertificate, std::nullopt,
                      composition.warnings.front());
  }

  StackUnderwriting out;
  out.premium = price_premium_at_rate(composition.residual_risk, terms.coverage, terms.loading);

  PolicyTerms policy_terms;
  policy_terms.coverage = terms.coverage;
  policy_terms.deductible = terms.deductible;
  policy_terms.premium = out.premium;
  policy_terms.bond = terms.bond;
  policy_terms.claim_deadline = terms.claim_deadline;
  policy_terms.expiry = terms.expiry;
  out.underwriting = ledger.underwrite(agent, stack.master, policy_terms, tick);

  const Money cut = price_premium_at_rate(terms.layer1_cut, out.premium, 0.0);
  std::vector<double> weights;
  for (const Certificate& c : composition.applied) weights.push_back(c.risk_discount);
  const std::vector<Money> shares = split_proportional(cut, weights);
  for (std::size_t i = 0; i < shares.size(); ++i) {
    const std::string& issuer = composition.applied[i].issuer;
    if (issuer != stack.master) {
      ledger.transfer(AccountId::insurer(stack.master), AccountId::insurer(issuer), shares[i],
                      FlowKind::kPremium, tick);
    }
    out.layer1_shares.emplace_back(issuer, shares[i]);
  }
  return out;
}

}  // namespace insured
