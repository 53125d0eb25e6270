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

#include "insured/scenario.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace insured {

using nlohmann::json;

ScenarioError::ScenarioError(std::string field, int line, const std::string& what)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                         (field.empty() ? what : field + ": " + what)),
      field_(std::move(field)),
      line_(line) {}

std::string_view to_string(AgentBehavior behavior) {
  switch (behavior) {
    case AgentBehavior::kRationalSpe: return "rational_spe";
    case AgentBehavior::kOpportunistic: return "opportunistic";
    case AgentBehavior::kAlwaysMalicious: return "always_malicious";
    case AgentBehavior::kAlwaysHonest: return "always_honest";
    case AgentBehavior::kPropensity: return "propensity";
  }
  return "?";
}

std::string_view to_string(UserBehavior behavior) {
  switch (behavior) {
    case UserBehavior::kRationalSpe: return "rational_spe";
    case UserBehavior::kAlwaysClaim: return "always_claim";
    case UserBehavior::kNeverClaim: return "never_claim";
  }
  return "?";
}

std::string_view to_string(InsurerBehavior behavior) {
  switch (behavior) {
    case InsurerBehavior::kRationalSpe: return "rational_spe";
    case InsurerBehavior::kAlwaysDeny: return "always_deny";
    case InsurerBehavior::kAlwaysAccept: return "always_accept";
  }
  return "?";
}

namespace {

// Maps every JSON path in an (already well-formed) document to the line its
// value starts on.
class LineIndex {
 public:
  explicit LineIndex(std::string_view text) : text_(text) { value(""); }

  int line_of(const std::string& path) const {
    auto it = lines_.find(path);
    return it == lines_.end() ? 0 : it->second;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') ++line_;
      if (c != ' ' && c != '\t' && c != '\n' && c != '\r') break;
      ++pos_;
    }
  }

  std::string string() {
    std::string out;
    ++pos_;  // opening quote
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\') ++pos_;
      if (pos_ < text_.size()) out += text_[pos_++];
    }
    ++pos_;
    return out;
  }

  void value(const std::string& path) {
    skip_ws();
    if (pos_ >= text_.size()) return;
    lines_.emplace(path, line_);
    const char c = text_[pos_];
    if (c == '{') {
      ++pos_;
      for (;;) {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] == '}') break;
        const std::string key = string();
        skip_ws();
        ++pos_;  // colon
        value(path.empty() ? key : path + "." + key);
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ',') ++pos_;
      }
      ++pos_;
    } else if (c == '[') {
      ++pos_;
      for (std::size_t i = 0;; ++i) {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] == ']') break;
        value(path + "[" + std::to_string(i) + "]");
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ',') ++pos_;
      }
      ++pos_;
    } else if (c == '"') {
      string();
    } else {
      while (pos_ < text_.size() && std::string_view(",}] \t\r\n").find(text_[pos_]) ==
                                        std::string_view::npos) {
        ++pos_;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::map<std::string, int> lines_;
};

class Reader {
 public:
  explicit Reader(const LineIndex& index) : index_(index) {}

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    // Report the nearest enclosing path that has a known line.
    std::string p = path;
    int line = index_.line_of(p);
    while (line == 0 && !p.empty()) {
      const auto cut = p.find_last_of(".[");
      p = cut == std::string::npos ? std::string() : p.substr(0, cut);
      line = index_.line_of(p);
    }
    throw ScenarioError(path, line, what);
  }

  static std::string join(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
  }
  static std::string at(const std::string& base, std::size_t i) {
    return base + "[" + std::to_string(i) + "]";
  }

  const json& object(const json& j, const std::string& path,
                     std::initializer_list<std::string_view> allowed) const {
    if (!j.is_object()) fail(path, "expected an object");
    for (const auto& [key, v] : j.items()) {
      bool known = false;
      for (std::string_view a : allowed) known = known || key == a;
      if (!known) fail(join(path, key), "unknown key");
    }
    return j;
  }

  const json* find(const json& obj, const std::string& key) const {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
  }

  const json& require(const json& obj, const std::string& path, const std::string& key) const {
    const json* v = find(obj, key);
    if (v == nullptr) fail(join(path, key), "missing required field");
    return *v;
  }

  std::int64_t integer(const json& j, const std::string& path) const {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    if (j.is_number_unsigned() && j.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
      fail(path, "integer out of range");
    }
    return j.get<std::int64_t>();
  }

  std::uint64_t unsigned_integer(const json& j, const std::string& path) const {
    if (!j.is_number_integer() || (!j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
      fail(path, "expected a non-negative integer");
    }
    return j.get<std::uint64_t>();
  }

  double number(const json& j, const std::string& path) const {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
  }

  bool boolean(const json& j, const std::string& path) const {
    if (!j.is_boolean()) fail(path, "expected true or false");
    return j.get<bool>();
  }

  std::string text(const json& j, const std::string& path) const {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
  }

  // Decimal string or whole-unit integer; floats are refused so conversion stays exact.
  SignedMoney signed_money(const json& j, const std::string& path) const {
    try {
      if (j.is_string()) return SignedMoney::parse(j.get<std::string>());
      if (j.is_number_integer()) {
        return SignedMoney(checked_mul(integer(j, path), kMicrosPerUnit));
      }
    } catch (const MoneyError& e) {
      fail(path, e.what());
    }
    fail(path, "expected a decimal string or an integer");
  }

  Money money(const json& j, const std::string& path) const {
    const SignedMoney m = signed_money(j, path);
    if (m.micros() < 0) fail(path, "must not be negative");
    return Money::from_micros(m.micros());
  }

 private:
  const LineIndex& index_;
};

MechanismParams read_params(const Reader& r, const json& j) {
  const std::string path = "params";
  r.object(j, path, {"L", "G", "S_A", "S_I", "B", "F", "R", "V_future", "P", "Pi_honest"});
  auto req = [&](const char* key) { return r.money(r.require(j, path, key), path + "." + key); };
  MechanismParams p;
  p.loss = req("L");
  p.gain = req("G");
  p.agent_stake = req("S_A");
  p.insurer_stake = req("S_I");
  p.bond = req("B");
  p.verifier_fee = req("F");
  p.reputation_cost = req("R");
  p.future_value = req("V_future");
  if (const json* v = r.find(j, "P")) p.premium = r.money(*v, path + ".P");
  if (const json* v = r.find(j, "Pi_honest")) p.honest_payoff = r.signed_money(*v, path + ".Pi_honest");
  return p;
}

GainDistribution read_gain(const Reader& r, const json& j, const std::string& path) {
  r.object(j, path, {"kind", "low", "high", "mean"});
  const std::string kind = r.text(r.require(j, path, "kind"), path + ".kind");
  GainDistribution g;
  if (kind == "fixed") {
    g.kind = GainDistribution::Kind::kFixed;
  } else if (kind == "uniform") {
    g.kind = GainDistribution::Kind::kUniform;
    g.low = r.money(r.require(j, path, "low"), path + ".low");
    g.high = r.money(r.require(j, path, "high"), path + ".high");
  } else if (kind == "geometric") {
    g.kind = GainDistribution::Kind::kGeometric;
    g.mean = r.money(r.require(j, path, "mean"), path + ".mean");
  } else {
    r.fail(path + ".kind", "expected fixed, uniform or geometric");
  }
  return g;
}

AgentProfile read_agent(const Reader& r, const json& j, const std::string& path) {
  r.object(j, path, {"id", "theta", "gain", "safeguards", "audit_access"});
  AgentProfile a;
  a.id = r.text(r.require(j, path, "id"), path + ".id");
  if (const json* v = r.find(j, "theta")) a.theta = r.number(*v, path + ".theta");
  if (const json* v = r.find(j, "gain")) a.gain = read_gain(r, *v, path + ".gain");
  if (const json* v = r.find(j, "safeguards")) {
    if (!v->is_array()) r.fail(path + ".safeguards", "expected an array");
    for (std::size_t i = 0; i < v->size(); ++i) {
      a.safeguards.insert(r.text((*v)[i], Reader::at(path + ".safeguards", i)));
    }
  }
  if (const json* v = r.find(j, "audit_access")) {
    a.audit_access_granted = r.boolean(*v, path + ".audit_access");
  }
  return a;
}

BehaviorPolicy read_policies(const Reader& r, const json& j) {
  const std::string path = "policies";
  r.object(j, path, {"agent", "p", "user", "insurer"});
  BehaviorPolicy b;
  if (const json* v = r.find(j, "agent")) {
    const std::string s = r.text(*v, path + ".agent");
    if (s == "rational_spe") b.agent = AgentBehavior::kRationalSpe;
    else if (s == "opportunistic") b.agent = AgentBehavior::kOpportunistic;
    else if (s == "always_malicious") b.agent = AgentBehavior::kAlwaysMalicious;
    else if (s == "always_honest") b.agent = AgentBehavior::kAlwaysHonest;
    else if (s == "propensity") b.agent = AgentBehavior::kPropensity;
    else r.fail(path + ".agent", "unknown agent policy '" + s + "'");
  }
  if (const json* v = r.find(j, "p")) {
    if (b.agent != AgentBehavior::kOpportunistic) {
      r.fail(path + ".p", "only meaningful for the opportunistic agent policy");
    }
    b.temptation = r.number(*v, path + ".p");
  } else if (b.agent == AgentBehavior::kOpportunistic) {
    r.fail(path + ".p", "missing required field");
  }
  if (const json* v = r.find(j, "user")) {
    const std::string s = r.text(*v, path + ".user");
    if (s == "rational_spe") b.user = UserBehavior::kRationalSpe;
    else if (s == "always_claim") b.user = UserBehavior::kAlwaysClaim;
    else if (s == "never_claim") b.user = UserBehavior::kNeverClaim;
    else r.fail(path + ".user", "unknown user policy '" + s + "'");
  }
  if (const json* v = r.find(j, "insurer")) {
    const std::string s = r.text(*v, path + ".insurer");
    if (s == "rational_spe") b.insurer = InsurerBehavior::kRationalSpe;
    else if (s == "always_deny") b.insurer = InsurerBehavior::kAlwaysDeny;
    else if (s == "always_accept") b.insurer = InsurerBehavior::kAlwaysAccept;
    else r.fail(path + ".insurer", "unknown insurer policy '" + s + "'");
  }
  return b;
}

InsurerSpec read_insurer(const Reader& r, const json& j, const std::string& path) {
  r.object(j, path, {"id", "loading", "prior"});
  InsurerSpec s;
  s.id = r.text(r.require(j, path, "id"), path + ".id");
  if (const json* v = r.find(j, "loading")) s.loading = r.number(*v, path + ".loading");
  if (const json* v = r.find(j, "prior")) {
    r.object(*v, path + ".prior", {"alpha", "beta"});
    if (const json* a = r.find(*v, "alpha")) s.prior.alpha = r.number(*a, path + ".prior.alpha");
    if (const json* b = r.find(*v, "beta")) s.prior.beta = r.number(*b, path + ".prior.beta");
  }
  return s;
}

StackSpec read_stack(const Reader& r, const json& j) {
  const std::string path = "stack";
  r.object(j, path, {"master", "base_risk", "floor", "loading", "layer1_cut", "certificates"});
  StackSpec s;
  s.master = r.text(r.require(j, path, "master"), path + ".master");
  s.base_risk = r.number(r.require(j, path, "base_risk"), path + ".base_risk");
  if (const json* v = r.find(j, "floor")) s.floor = r.number(*v, path + ".floor");
  if (const json* v = r.find(j, "loading")) s.loading = r.number(*v, path + ".loading");
  if (const json* v = r.find(j, "layer1_cut")) s.layer1_cut = r.number(*v, path + ".layer1_cut");
  if (const json* v = r.find(j, "certificates")) {
    if (!v->is_array()) r.fail(path + ".certificates", "expected an array");
    for (std::size_t i = 0; i < v->size(); ++i) {
      const std::string cp = Reader::at(path + ".certificates", i);
      const json& c = r.object((*v)[i], cp, {"issuer", "domain", "discount", "expiry"});
      Certificate cert;
      cert.issuer = r.text(r.require(c, cp, "issuer"), cp + ".issuer");
      cert.domain = r.text(r.require(c, cp, "domain"), cp + ".domain");
      cert.risk_discount = r.number(r.require(c, cp, "discount"), cp + ".discount");
      cert.expiry = INT64_MAX;
      if (const json* e = r.find(c, "expiry")) cert.expiry = r.integer(*e, cp + ".expiry");
      s.certificates.push_back(std::move(cert));
    }
  }
  return s;
}

ScenarioConfig read_config(const Reader& r, const json& root) {
  r.object(root, "",
           {"schema_version", "seed", "episodes", "params", "population", "policies",
            "enforcement", "claim_bond", "insurers", "pricing", "stack", "funding",
            "claim_deadline", "verifier_delay", "safeguard_credits"});
  const std::int64_t version = r.integer(r.require(root, "", "schema_version"), "schema_version");
  if (version != kScenarioSchemaVersion) {
    r.fail("schema_version", "unsupported version " + std::to_string(version));
  }

  ScenarioConfig c;
  if (const json* v = r.find(root, "seed")) c.seed = r.unsigned_integer(*v, "seed");
  c.episodes = r.integer(r.require(root, "", "episodes"), "episodes");
  c.params = read_params(r, r.require(root, "", "params"));

  const json& pop = r.require(root, "", "population");
  if (!pop.is_array()) r.fail("population", "expected an array");
  for (std::size_t i = 0; i < pop.size(); ++i) {
    c.population.push_back(read_agent(r, pop[i], Reader::at("population", i)));
  }
  if (const json* v = r.find(root, "policies")) c.policies = read_policies(r, *v);
  if (const json* v = r.find(root, "enforcement")) c.enforcement_enabled = r.boolean(*v, "enforcement");
  if (const json* v = r.find(root, "claim_bond")) c.claim_bond = r.money(*v, "claim_bond");
  if (const json* v = r.find(root, "insurers")) {
    if (!v->is_array()) r.fail("insurers", "expected an array");
    for (std::size_t i = 0; i < v->size(); ++i) {
      c.insurers.push_back(read_insurer(r, (*v)[i], Reader::at("insurers", i)));
    }
  }
  if (const json* v = r.find(root, "pricing")) {
    const std::string s = r.text(*v, "pricing");
    if (s == "fixed") c.pricing = Pricing::kFixed;
    else if (s == "experience_rated") c.pricing = Pricing::kExperienceRated;
    else r.fail("pricing", "expected fixed or experience_rated");
  }
  if (const json* v = r.find(root, "stack")) c.stack = read_stack(r, *v);
  if (const json* v = r.find(root, "funding")) {
    r.object(*v, "funding", {"agent", "insurer", "user", "external"});
    if (const json* f = r.find(*v, "agent")) c.funding.agent = r.money(*f, "funding.agent");
    if (const json* f = r.find(*v, "insurer")) c.funding.insurer = r.money(*f, "funding.insurer");
    if (const json* f = r.find(*v, "user")) c.funding.user = r.money(*f, "funding.user");
    if (const json* f = r.find(*v, "external")) c.funding.external = r.money(*f, "funding.external");
  }
  if (const json* v = r.find(root, "claim_deadline")) c.claim_deadline = r.integer(*v, "claim_deadline");
  if (const json* v = r.find(root, "verifier_delay")) c.verifier_delay = r.integer(*v, "verifier_delay");
  if (const json* v = r.find(root, "safeguard_credits")) {
    if (!v->is_object()) r.fail("safeguard_credits", "expected an object");
    for (const auto& [tag, n] : v->items()) {
      c.safeguard_credits[tag] = r.number(n, "safeguard_credits." + tag);
    }
  }
  return c;
}

int line_at_byte(std::string_view text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) line += text[i] == '\n';
  return line;
}

json money_json(Money m) { return format_decimal_micros(m.micros()); }
json money_json(SignedMoney m) { return format_decimal_micros(m.micros()); }

}  // namespace

ScenarioConfig parse_scenario(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError("", line_at_byte(text, e.byte > 0 ? e.byte - 1 : 0), e.what());
  }
  const LineIndex index(text);
  const Reader reader(index);
  ScenarioConfig config = read_config(reader, root);
  try {
    validate(config);
  } catch (const ConfigError& e) {
    reader.fail(e.field(), std::string(e.what()).substr(e.field().size() + 2));
  }
  return config;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("", 0, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string report_to_json(const MetricsReport& m) {
  json j;
  j["episodes"] = m.episodes;
  j["completed"] = m.completed;
  j["excluded"] = m.excluded;
  j["aborted"] = m.aborted;
  j["misbehaviors"] = m.misbehaviors;
  j["claims_filed"] = m.claims_filed;
  j["disputes"] = m.disputes;
  j["misbehavior_rate"] = m.misbehavior_rate;
  j["dispute_rate"] = m.dispute_rate;
  j["mean_resolution_ticks"] = m.mean_resolution_ticks;
  json hist = json::object();
  for (const auto& [micros, count] : m.user_loss_distribution) {
    hist[format_decimal_micros(micros)] = count;
  }
  j["user_loss_distribution"] = hist;
  j["premiums_collected"] = money_json(m.premiums_collected);
  j["losses_paid"] = money_json(m.losses_paid);
  j["insurer_loss_ratio"] = m.insurer_loss_ratio;
  j["verifier_invocations"] = m.verifier_invocations;
  j["audit_access_events"] = m.audit_access_events;
  j["market_concentration"] = json::object();
  for (const auto& [id, share] : m.market_concentration) j["market_concentration"][id] = share;
  j["shortfalls"] = m.shortfalls;
  return j.dump(2) + "\n";
}

std::string episode_to_json(const EpisodeRecord& r) {
  json j;
  j["index"] = r.index;
  j["status"] = to_string(r.status);
  j["agent"] = r.agent;
  j["insurer"] = r.insurer;
  j["note"] = r.note;
  j["gain"] = money_json(r.gain);
  j["premium"] = money_json(r.premium);
  j["action"] = to_string(r.action);
  j["path"] = r.path ? json(r.path->label()) : json(nullptr);
  j["claimed"] = r.claimed;
  j["escalated"] = r.escalated;
  j["audited"] = r.audited;
  j["claim_state"] = r.final_claim_state ? json(to_string(*r.final_claim_state)) : json(nullptr);
  j["resolution_ticks"] = r.resolution_ticks;
  j["agent_net"] = money_json(r.agent_net);
  j["insurer_net"] = money_json(r.insurer_net);
  j["user_net"] = money_json(r.user_net);
  j["compensation_paid"] = money_json(r.compensation_paid);
  return j.dump();
}

}  // namespace insured
