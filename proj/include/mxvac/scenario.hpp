// Copyright 2026 The mxvac Authors
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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "mxvac/mxg1.hpp"
#include "mxvac/vacation.hpp"

namespace mxvac {

inline constexpr int kSchemaVersion = 1;

struct Tolerances {
  double sup = 1e-7;  // analytic vs oracle
  double tv = 0.02;   // anything vs simulated
};

struct RunBlock {
  std::size_t j_max = 50;
  std::uint64_t n_cycles = 100'000;
  std::uint64_t seed = 1;
  unsigned replications = 16;
  std::size_t truncation = 400;
  Tolerances tolerances;
  /// Mean vacation length, for models that do not determine it.
  std::optional<double> e_b0;
};

struct Scenario {
  WorkingModeSpec working;
  VacationModelSpec vacation;
  RunBlock run;
};

/// Parses and validates a scenario document (JSON). Unknown and missing keys
/// are reported with their path, e.g. "$.working.service.rate". Throws
/// InvalidInput, or StabilityError when the working mode has load >= 1.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);

/// Canonical JSON form; parse_scenario(scenario_to_json(s)) reproduces s.
std::string scenario_to_json(const Scenario& s);

}  // namespace mxvac
