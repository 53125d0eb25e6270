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

#ifndef INSURED_SCENARIO_HPP_
#define INSURED_SCENARIO_HPP_

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "insured/sim.hpp"

namespace insured {

inline constexpr int kScenarioSchemaVersion = 1;

// Malformed scenario document. `field` is a JSON path such as
// "population[0].theta"; `line` is 1-based, or 0 when unknown.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string field, int line, const std::string& what);
  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  std::string field_;
  int line_;
};

// Parses and validates a scenario document. Unknown keys are errors.
ScenarioConfig parse_scenario(std::string_view text);
ScenarioConfig load_scenario(const std::filesystem::path& path);

// Canonical key-sorted JSON, two-space indent, trailing newline.
std::string report_to_json(const MetricsReport& report);

// One compact JSON object, no newline.
std::string episode_to_json(const EpisodeRecord& record);

std::string_view to_string(AgentBehavior behavior);
std::string_view to_string(UserBehavior behavior);
std::string_view to_string(InsurerBehavior behavior);

}  // namespace insured

#endif  // INSURED_SCENARIO_HPP_
