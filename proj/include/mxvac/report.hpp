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

#include <optional>
#include <string>
#include <vector>

#include "mxvac/ctmc.hpp"
#include "mxvac/scenario.hpp"
#include "mxvac/simulator.hpp"

namespace mxvac {

/// A distribution indexed by j = 0..n with an optional standard error per
/// entry. Serialized as CSV with the fixed columns j,value,source,stderr.
struct Table {
  std::string source;
  std::vector<double> value;
  std::vector<double> stderr_;  // empty when not applicable

  std::string to_csv() const;
  static Table from_csv(const std::string& text);
};

/// Everything the analytic route produces for one scenario.
struct Analysis {
  double load = 0.0;
  double mean_y = 0.0;
  Table working_law;   // decomposition coefficients, j = 0..j_max
  Table busy_law;      // conditional busy-period law of the plain M^X/G/1 queue
  Table transfer_pmf;  // psi_j
  Pmf working_pmf;     // with truncation mass
  std::optional<CycleQuantities> cycles;
  std::optional<Table> recursion;  // p_(1,j) from the level recursion
};

Analysis run_analysis(const Scenario& s);
SteadyStateReport run_oracle(const Scenario& s);
SimulationResult run_simulation(const Scenario& s);

std::string analysis_json(const Scenario& s, const Analysis& a);
std::string oracle_json(const Scenario& s, const SteadyStateReport& r);
std::string simulation_json(const Scenario& s, const SimulationResult& r);

Table oracle_working_table(const SteadyStateReport& r, std::size_t j_max);
Table simulated_working_table(const EmpiricalReport& r, std::size_t j_max);

struct PairMetrics {
  std::string a, b;
  double sup = 0.0;
  double tv = 0.0;
  /// Largest |z| over entries with a positive combined standard error; absent
  /// when neither side carries standard errors.
  std::optional<double> max_abs_z;
  std::string gate;  // "sup" or "tv"
  double threshold = 0.0;
  bool pass = false;
};

struct ComparisonReport {
  std::vector<std::string> sources;
  std::vector<PairMetrics> pairs;
  bool pass = true;

  std::string to_json() const;
};

/// Pairwise metrics over j = 0..max length. Pairs involving a table with
/// standard errors are gated on total variation, the others on the sup norm.
ComparisonReport compare_tables(const std::vector<Table>& tables, const Tolerances& tol);

}  // namespace mxvac
