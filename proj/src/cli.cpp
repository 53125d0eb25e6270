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

#include "insured/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>

#include "CLI11.hpp"
#include "insured/game.hpp"
#include "insured/market.hpp"
#include "insured/mechanism.hpp"
#include "insured/scenario.hpp"
#include "insured/sweep.hpp"

namespace insured {
namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParamFlags {
  std::map<std::string, std::string> text;  // key -> raw flag value

  void add(CLI::App& app) {
    static const std::pair<const char*, const char*> kRequired[] = {
        {"L", "--L"}, {"G", "--G"}, {"S_A", "--S-A"}, {"S_I", "--S-I"},
        {"B", "--B"}, {"F", "--F"}, {"R", "--R"},     {"V_future", "--V-future"}};
    for (const auto& [key, flag] : kRequired) {
      app.add_option(flag, text[key], std::string("Parameter ") + key)->required();
    }
    app.add_option("--P", text["P"], "Premium (default 0)");
    app.add_option("--pi-honest", text["Pi_honest"], "Honest-path agent payoff (default 0)");
  }

  MechanismParams parse() const {
    MechanismParams p;
    for (const auto& [key, raw] : text) {
      if (raw.empty()) continue;
      try {
        set_param(p, key, SignedMoney::parse(raw));
      } catch (const std::exception& e) {
        throw UsageError(key + ": " + e.what());
      }
    }
    return p;
  }
};

std::string yes_no(bool b) { return b ? "true" : "false"; }

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

int write_file(const std::string& path, const std::string& content, std::ostream& err) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!(f << content) || !f.flush()) {
    err << "error: cannot write " << path << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

int cmd_check(const ParamFlags& flags, std::ostream& out) {
  const ConditionReport r = check_conditions(flags.parse());
  out << "access_to_justice (2L + B > F): " << yes_no(r.access_to_justice) << "\n"
      << "solvency (S_I >= L): " << yes_no(r.solvency) << "\n"
      << "deterrence (S_A + V_future > G): " << yes_no(r.deterrence) << "\n"
      << "all_hold: " << yes_no(r.all_hold) << "\n";
  return r.all_hold ? kExitOk : kExitNegative;
}

int cmd_solve(const ParamFlags& flags, bool oracle, std::ostream& out) {
  const MechanismParams params = flags.parse();
  const GameTree tree = build_game(params);
  const SpeSolution s = solve_spe(tree);
  out << "profile: " << s.profile.to_string() << "\n"
      << "path: " << s.path.label() << "\n"
      << "payoffs: agent=" << s.payoffs.agent.to_string()
      << " insurer=" << s.payoffs.insurer.to_string() << " user=" << s.payoffs.user.to_string()
      << "\n"
      << "verifier_invoked: " << yes_no(s.payoffs.verifier_invoked) << "\n"
      << "honest_equilibrium_predicted: " << yes_no(predict_honest_equilibrium(params)) << "\n";
  if (!oracle) return kExitOk;
  const std::vector<StrategyProfile> set = brute_force_spe(tree);
  const bool member = std::find(set.begin(), set.end(), s.profile) != set.end();
  out << "oracle_spe_count: " << set.size() << "\n"
      << "solver ∈ oracle set: " << (member ? "yes" : "no") << "\n";
  return member ? kExitOk : kExitNegative;
}

int cmd_simulate(const std::string& scenario, const std::string& out_path,
                 const std::string& log_path, std::ostream& out, std::ostream& err) {
  const ScenarioConfig config = load_scenario(scenario);
  std::ofstream log;
  if (!log_path.empty()) {
    log.open(log_path, std::ios::binary | std::ios::trunc);
    if (!log) {
      err << "error: cannot write " << log_path << "\n";
      return kExitUsage;
    }
  }
  EpisodeSink sink;
  if (log.is_open()) sink = [&log](const EpisodeRecord& r) { log << episode_to_json(r) << '\n'; };
  const ScenarioRun run = run_scenario_detailed(config, sink);
  if (const int rc = write_file(out_path, report_to_json(run.report), err); rc != kExitOk) {
    return rc;
  }
  out << "episodes: " << run.report.episodes << " completed: " << run.report.completed
      << " misbehavior_rate: " << format_double(run.report.misbehavior_rate)
      << " dispute_rate: " << format_double(run.report.dispute_rate) << "\n";
  return kExitOk;
}

int default_jobs() {
  const char* env = std::getenv(kJobsEnv);
  if (env == nullptr || *env == '\0') return 0;
  int jobs = 0;
  const char* end = env + std::char_traits<char>::length(env);
  const auto res = std::from_chars(env, end, jobs);
  if (res.ec != std::errc() || res.ptr != end || jobs < 1) {
    throw UsageError(std::string(kJobsEnv) + " must be a positive integer");
  }
  return jobs;
}

int cmd_sweep(const std::string& grid_text, const std::string& scenario,
              const std::string& out_path, int jobs, std::ostream& out, std::ostream& err) {
  ParamGrid grid;
  try {
    grid = parse_grid(grid_text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--grid: ") + e.what());
  }
  const ScenarioConfig base = load_scenario(scenario);
  const std::vector<SweepRow> rows = sweep(base, grid, jobs);
  if (const int rc = write_file(out_path, sweep_to_csv(rows), err); rc != kExitOk) return rc;
  out << "rows: " << rows.size() << "\n";
  return kExitOk;
}

int cmd_stack(double base_risk, const std::vector<std::string>& certs, const std::string& coverage,
              double loading, double floor, std::ostream& out) {
  std::vector<Certificate> parsed;
  for (const std::string& text : certs) {
    // domain:discount[:issuer]
    const std::size_t a = text.find(':');
    if (a == std::string::npos) throw UsageError("--cert '" + text + "': expected domain:discount");
    const std::size_t b = text.find(':', a + 1);
    Certificate c;
    c.domain = text.substr(0, a);
    const std::string discount = text.substr(a + 1, b == std::string::npos ? b : b - a - 1);
    c.issuer = b == std::string::npos ? "layer1-" + c.domain : text.substr(b + 1);
    c.expiry = INT64_MAX;
    const auto res =
        std::from_chars(discount.data(), discount.data() + discount.size(), c.risk_discount);
    if (c.domain.empty() || res.ec != std::errc() ||
        res.ptr != discount.data() + discount.size() || !(c.risk_discount >= 0.0) ||
        !(c.risk_discount < 1.0)) {
      throw UsageError("--cert '" + text + "': discount must be a number in [0, 1)");
    }
    parsed.push_back(std::move(c));
  }
  if (!(base_risk > 0.0 && base_risk <= 1.0)) throw UsageError("--base-risk must be in (0, 1]");
  if (!(loading >= 0.0)) throw UsageError("--loading must be >= 0");
  if (!(floor > 0.0 && floor <= 1.0)) throw UsageError("--floor must be in (0, 1]");
  Money cov;
  try {
    cov = Money::parse(coverage);
  } catch (const MoneyError& e) {
    throw UsageError(std::string("--coverage: ") + e.what());
  }
  const StackComposition comp = compose_stack(base_risk, parsed, 0, floor);
  out << "residual_risk: " << format_double(comp.residual_risk) << "\n"
      << "premium: " << price_premium_at_rate(comp.residual_risk, cov, loading).to_string() << "\n"
      << "certificates:\n";
  for (const Certificate& c : comp.applied) {
    out << "  " << c.domain << " " << format_double(c.risk_discount) << " " << c.issuer << "\n";
  }
  for (const std::string& w : comp.warnings) out << "warning: " << w << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Insured-agent mechanism toolkit"};
  app.name("insured");
  app.require_subcommand(1);

  ParamFlags check_flags;
  CLI::App* check = app.add_subcommand("check", "Evaluate the three equilibrium conditions");
  check_flags.add(*check);

  ParamFlags solve_flags;
  bool oracle = false;
  CLI::App* solve = app.add_subcommand("solve", "Solve the game by backward induction");
  solve_flags.add(*solve);
  solve->add_flag("--oracle", oracle, "Cross-check against the exhaustive SPE oracle");

  std::string scenario, out_path, log_path;
  CLI::App* simulate = app.add_subcommand("simulate", "Run a scenario file");
  simulate->add_option("scenario", scenario, "Scenario JSON file")->required();
  simulate->add_option("--out", out_path, "Report output path")->required();
  simulate->add_option("--episodes-log", log_path, "Per-episode NDJSON output path");

  std::string grid_text, sweep_scenario, sweep_out;
  int jobs = -1;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run a scenario over a parameter grid");
  sweep_cmd->add_option("--grid", grid_text, "Grid, e.g. \"G=10,40;F=50,500\"")->required();
  sweep_cmd->add_option("--scenario", sweep_scenario, "Base scenario JSON file")->required();
  sweep_cmd->add_option("--out", sweep_out, "CSV output path")->required();
  sweep_cmd->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  double base_risk = 0.0, loading = 0.0, floor = kDefaultRiskFloor;
  std::vector<std::string> certs;
  std::string coverage;
  CLI::App* stack = app.add_subcommand("stack", "Compose a hierarchical underwriting stack");
  stack->add_option("--base-risk", base_risk, "Base risk rate")->required();
  stack->add_option("--cert", certs, "domain:discount[:issuer], repeatable");
  stack->add_option("--coverage", coverage, "Coverage amount")->required();
  stack->add_option("--loading", loading, "Premium loading")->required();
  stack->add_option("--floor", floor, "Residual risk floor");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    // Help requests exit 0; every other parse failure is a usage error.
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (check->parsed()) return cmd_check(check_flags, out);
    if (solve->parsed()) return cmd_solve(solve_flags, oracle, out);
    if (simulate->parsed()) return cmd_simulate(scenario, out_path, log_path, out, err);
    if (sweep_cmd->parsed()) {
      return cmd_sweep(grid_text, sweep_scenario, sweep_out, jobs > 0 ? jobs : default_jobs(), out,
                       err);
    }
    if (stack->parsed()) return cmd_stack(base_risk, certs, coverage, loading, floor, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ScenarioError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace insured
