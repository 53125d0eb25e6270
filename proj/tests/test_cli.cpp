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
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "insured/cli.hpp"

namespace insured {

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> base_flags(std::vector<std::string> extra = {}) {
  std::vector<std::string> v{"--L", "100", "--G", "40", "--S-A", "30", "--S-I", "150",
                             "--B", "20",  "--F", "50", "--R",   "10", "--V-future", "20",
                             "--P", "8",   "--pi-honest", "5"};
  v.insert(v.end(), extra.begin(), extra.end());
  return v;
}

std::vector<std::string> cmd(const std::string& sub, std::vector<std::string> rest) {
  rest.insert(rest.begin(), sub);
  return rest;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path temp(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("insured-cli-test-" + name);
}

const std::string kScenarios = std::string(INSURED_SOURCE_DIR) + "/scenarios/";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("check") {
  Result r = run(cmd("check", base_flags()));
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("all_hold: true") != std::string::npos);

  std::vector<std::string> f = base_flags();
  f[11] = "500";  // --F
  r = run(cmd("check", f));
  CHECK(r.code == kExitNegative);
  CHECK(r.out.find("access_to_justice (2L + B > F): false") != std::string::npos);

  f = base_flags();
  f.erase(f.begin(), f.begin() + 2);  // drop --L
  r = run(cmd("check", f));
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("--L") != std::string::npos);
}

TEST_CASE("flag errors are usage errors") {
  CHECK(run(cmd("check", base_flags({"--colour", "red"}))).code == kExitUsage);
  std::vector<std::string> f = base_flags();
  f[1] = "-100";
  Result r = run(cmd("check", f));
  CHECK(r.code == kExitUsage);
  f[1] = "1.0000001";
  r = run(cmd("check", f));
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("L") != std::string::npos);
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("solve") {
  Result r = run(cmd("solve", base_flags({"--oracle"})));
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("path: H/NoClaim") != std::string::npos);
  CHECK(r.out.find("agent=Honest") != std::string::npos);
  CHECK(r.out.find("solver ∈ oracle set: yes") != std::string::npos);

  std::vector<std::string> f = base_flags({"--oracle"});
  f[3] = "200";  // --G
  r = run(cmd("solve", f));
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("profile: agent=Malicious") != std::string::npos);
  CHECK(r.out.find("solver ∈ oracle set: yes") != std::string::npos);
}

TEST_CASE("simulate is byte-deterministic") {
  const auto a = temp("a.json"), b = temp("b.json"), log = temp("log.ndjson");
  Result r = run({"simulate", kScenarios + "optimistic.json", "--out", a.string(),
                  "--episodes-log", log.string()});
  REQUIRE(r.code == kExitOk);
  REQUIRE(run({"simulate", kScenarios + "optimistic.json", "--out", b.string()}).code == kExitOk);
  const std::string report = slurp(a);
  CHECK(report == slurp(b));
  CHECK(report.find("\"dispute_rate\": 0.0") != std::string::npos);
  const std::string events = slurp(log);
  CHECK(std::count(events.begin(), events.end(), '\n') == 10000);
}

TEST_CASE("simulate reports malformed files") {
  const auto bad = temp("bad.json");
  {
    std::ifstream in(kScenarios + "optimistic.json");
    std::ostringstream text;
    text << in.rdbuf();
    std::string doc = text.str();
    doc.replace(doc.find("\"episodes\": 10000"), 17, "\"episodes\": -1");
    std::ofstream(bad) << doc;
  }
  Result r = run({"simulate", bad.string(), "--out", temp("never.json").string()});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("line 4: episodes") != std::string::npos);
  r = run({"simulate", temp("missing.json").string(), "--out", temp("never.json").string()});
  CHECK(r.code == kExitUsage);
}

TEST_CASE("sweep") {
  const auto one = temp("one.csv"), eight = temp("eight.csv");
  Result r = run({"sweep", "--grid", "G=10,200", "--scenario", kScenarios + "deterrence.json",
                  "--out", one.string(), "--jobs", "1"});
  REQUIRE(r.code == kExitOk);
  const std::string csv = slurp(one);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  REQUIRE(run({"sweep", "--grid", "G=10,200", "--scenario", kScenarios + "deterrence.json",
               "--out", eight.string(), "--jobs", "8"}).code == kExitOk);
  CHECK(slurp(eight) == csv);
  CHECK(run({"sweep", "--grid", "", "--scenario", kScenarios + "deterrence.json", "--out",
             one.string()}).code == kExitUsage);
  CHECK(run({"sweep", "--grid", "G=1", "--scenario", kScenarios + "deterrence.json", "--out",
             one.string(), "--jobs", "0"}).code == kExitUsage);
}

TEST_CASE("stack") {
  Result r = run({"stack", "--base-risk", "0.10", "--cert", "safety:0.5", "--cert",
                  "financial:0.4", "--coverage", "100", "--loading", "0.2"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("residual_risk: 0.03\n") != std::string::npos);
  CHECK(r.out.find("premium: 3.6\n") != std::string::npos);
  Result s = run({"stack", "--base-risk", "0.10", "--cert", "financial:0.4", "--cert",
                  "safety:0.5", "--coverage", "100", "--loading", "0.2"});
  CHECK(s.out == r.out);
  CHECK(run({"stack", "--base-risk", "0.1", "--cert", "safety:1.5", "--coverage", "1",
             "--loading", "0"}).code == kExitUsage);
}

}  // TEST_SUITE

}  // namespace insured
