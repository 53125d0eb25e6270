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

#include "insured/sweep.hpp"

#include <omp.h>

#include <charconv>
#include <exception>
#include <set>
#include <stdexcept>

namespace insured {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t cut = s.find(sep, start);
    out.push_back(trim(s.substr(start, cut - start)));
    if (cut == std::string_view::npos) return out;
    start = cut + 1;
  }
}

template <typename Params>
auto money_field(Params& p, std::string_view key) -> decltype(&p.loss) {
  if (key == "L") return &p.loss;
  if (key == "G") return &p.gain;
  if (key == "S_A") return &p.agent_stake;
  if (key == "S_I") return &p.insurer_stake;
  if (key == "B") return &p.bond;
  if (key == "F") return &p.verifier_fee;
  if (key == "R") return &p.reputation_cost;
  if (key == "V_future") return &p.future_value;
  if (key == "P") return &p.premium;
  return nullptr;
}

std::string format_rate(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

SweepRow run_cell(const ScenarioConfig& base, const MechanismParams& params) {
  ScenarioConfig cfg = base;
  cfg.params = params;
  const MetricsReport m = run_scenario(cfg);
  return SweepRow{params, predict_honest_equilibrium(params), m.misbehavior_rate, m.dispute_rate,
                  m.verifier_invocations};
}

}  // namespace

void set_param(MechanismParams& params, std::string_view key, SignedMoney value) {
  if (key == "Pi_honest") {
    params.honest_payoff = value;
    return;
  }
  Money* f = money_field(params, key);
  if (f == nullptr) throw std::invalid_argument("unknown parameter '" + std::string(key) + "'");
  if (value.micros() < 0) {
    throw std::invalid_argument("parameter " + std::string(key) + " must not be negative");
  }
  *f = Money::from_micros(value.micros());
}

SignedMoney get_param(const MechanismParams& params, std::string_view key) {
  if (key == "Pi_honest") return params.honest_payoff;
  const Money* f = money_field(params, key);
  if (f == nullptr) throw std::invalid_argument("unknown parameter '" + std::string(key) + "'");
  return *f;
}

ParamGrid parse_grid(std::string_view text) {
  ParamGrid grid;
  std::set<std::string> seen;
  if (trim(text).empty()) throw std::invalid_argument("empty grid");
  for (std::string_view axis_text : split(text, ';')) {
    if (axis_text.empty()) continue;
    const std::size_t eq = axis_text.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("grid axis '" + std::string(axis_text) + "' lacks '='");
    }
    GridAxis axis;
    axis.key = std::string(trim(axis_text.substr(0, eq)));
    MechanismParams probe;
    get_param(probe, axis.key);  // validates the key
    if (!seen.insert(axis.key).second) {
      throw std::invalid_argument("grid axis '" + axis.key + "' repeated");
    }
    for (std::string_view v : split(axis_text.substr(eq + 1), ',')) {
      if (v.empty()) throw std::invalid_argument("empty value on grid axis '" + axis.key + "'");
      SignedMoney value;
      try {
        value = SignedMoney::parse(v);
      } catch (const MoneyError& e) {
        throw std::invalid_argument("grid axis '" + axis.key + "': " + e.what());
      }
      set_param(probe, axis.key, value);  // validates the sign
      axis.values.push_back(value);
    }
    grid.push_back(std::move(axis));
  }
  if (grid.empty()) throw std::invalid_argument("empty grid");
  return grid;
}

std::vector<MechanismParams> expand_grid(const MechanismParams& base, const ParamGrid& grid) {
  std::vector<MechanismParams> cells{base};
  for (const GridAxis& axis : grid) {
    std::vector<MechanismParams> next;
    next.reserve(cells.size() * axis.values.size());
    for (const MechanismParams& c : cells) {
      for (SignedMoney v : axis.values) {
        MechanismParams p = c;
        set_param(p, axis.key, v);
        next.push_back(p);
      }
    }
    cells = std::move(next);
  }
  return cells;
}

std::vector<SweepRow> sweep_serial(const ScenarioConfig& base, const ParamGrid& grid) {
  std::vector<SweepRow> rows;
  for (const MechanismParams& p : expand_grid(base.params, grid)) rows.push_back(run_cell(base, p));
  return rows;
}

std::vector<SweepRow> sweep(const ScenarioConfig& base, const ParamGrid& grid, int jobs) {
  const std::vector<MechanismParams> cells = expand_grid(base.params, grid);
  const auto n = static_cast<std::int64_t>(cells.size());
  std::vector<SweepRow> rows(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
#pragma omp parallel for schedule(dynamic) num_threads(jobs > 0 ? jobs : omp_get_max_threads())
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      rows[static_cast<std::size_t>(i)] = run_cell(base, cells[static_cast<std::size_t>(i)]);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out;
  for (std::string_view key : kParamKeys) {
    out += key;
    out += ',';
  }
  out += "predicted,misbehavior_rate,dispute_rate,verifier_invocations\n";
  for (const SweepRow& r : rows) {
    for (std::string_view key : kParamKeys) {
      out += format_decimal_micros(get_param(r.params, key).micros());
      out += ',';
    }
    out += r.predicted ? "true," : "false,";
    out += format_rate(r.misbehavior_rate) + ',';
    out += format_rate(r.dispute_rate) + ',';
    out += std::to_string(r.verifier_invocations) + '\n';
  }
  return out;
}

}  // namespace insured
