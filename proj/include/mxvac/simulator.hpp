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
#include <vector>

#include "mxvac/mxg1.hpp"
#include "mxvac/pgf.hpp"
#include "mxvac/vacation.hpp"

namespace mxvac {

struct SimConfig {
  WorkingModeSpec working;
  VacationModelSpec vacation;
  std::uint64_t n_cycles = 100'000;  // per replication
  std::uint64_t seed = 1;
  unsigned replications = 16;
  /// Cycles per replication whose full record is kept in the log.
  std::size_t keep_records = 0;
  /// Levels j = 1..wald_levels enter the Wald and down-crossing audits.
  std::size_t wald_levels = 10;
  /// A single working period or vacation longer than this aborts the run.
  std::uint64_t max_events = 10'000'000;
  bool parallel = true;

  void validate() const;
};

/// One regeneration cycle. Vectors are indexed by level; subbusy holds
/// C_1..C_Y where C_i is the time for the queue to first drop from Y-i+1 to
/// Y-i.
struct CycleRecord {
  double vacation_duration = 0.0;
  double working_duration = 0.0;
  std::size_t y = 0;
  std::vector<double> time_in_state;          // T_j, j = 0.. (T_0 = 0)
  std::vector<std::uint64_t> downcrossings;   // N_k: transitions k+1 -> k
  std::vector<std::uint64_t> upcrossings;     // jumps from <= k to > k
  std::vector<double> subbusy;
};

struct CycleLog {
  std::uint64_t cycles = 0;
  std::vector<CycleRecord> records;  // first keep_records cycles of each replication
  /// Inline pathwise audits over every cycle.
  std::uint64_t crossing_mismatches = 0;
  double max_time_sum_error = 0.0;     // |sum_j T_j - working duration| / duration
  double max_subbusy_sum_error = 0.0;  // |sum_i C_i - working duration| / duration
};

/// Difference between an estimated quantity and the identity it should
/// satisfy, averaged over replications.
struct IdentityCheck {
  std::vector<double> diff_mean;  // index j (entry 0 unused)
  std::vector<double> diff_se;
  /// max_j |diff_mean| / diff_se (0 where se vanishes and the difference is 0).
  double max_abs_z() const;
  bool within(double z) const { return max_abs_z() <= z; }
};

struct EmpiricalReport {
  unsigned replications = 0;
  std::uint64_t cycles_per_replication = 0;
  std::uint64_t events = 0;
  std::vector<double> p0, p0_se;  // time-average p_(0,j)
  std::vector<double> p1, p1_se;  // time-average p_(1,j), p1[0] = 0
  double p0_dot = 0.0, p0_dot_se = 0.0;
  double p1_dot = 0.0, p1_dot_se = 0.0;
  std::vector<double> vacation_law, vacation_law_se;  // conditional on mode 0
  std::vector<double> working_law, working_law_se;    // conditional on mode 1
  std::vector<std::uint64_t> y_counts;
  std::vector<std::uint64_t> seen_counts;  // queue length seen by working-mode arrivals
  double mean_vacation = 0.0, mean_vacation_se = 0.0;
  double mean_working = 0.0, mean_working_se = 0.0;
  double mean_cycle = 0.0, mean_cycle_se = 0.0;
  double mean_y = 0.0, mean_y_se = 0.0;
  std::vector<double> level_time, level_time_se;  // E[T_j]
  std::vector<double> level_down, level_down_se;  // E[N_k]
  IdentityCheck wald;             // E[T_j] against the Wald identity with empirical psi
  IdentityCheck downcross;        // E[N_k] against the level-crossing formula
};

struct SimulationResult {
  EmpiricalReport report;
  CycleLog log;
};

SimulationResult simulate(const SimConfig& cfg);

enum class Mode { vacation = 0, working = 1 };

/// Time-average law within one mode.
Pmf empirical_conditional_law(const EmpiricalReport& report, Mode mode);

struct LevelCrossingAudit {
  std::uint64_t cycles_checked = 0;
  std::uint64_t mismatches = 0;
  double max_time_sum_error = 0.0;
  double max_subbusy_sum_error = 0.0;
  bool ok(double rel_tol = 1e-12) const {
    return mismatches == 0 && max_time_sum_error <= rel_tol && max_subbusy_sum_error <= rel_tol;
  }
};

/// Re-checks the stored records and folds in the inline audit counters.
LevelCrossingAudit level_crossing_audit(const CycleLog& log);

/// Transfer sizes and vacation-mode occupancy from the vacation dynamics alone.
struct VacationSample {
  std::uint64_t vacations = 0;
  std::vector<std::uint64_t> y_counts;
  Pmf transfer;
  double mean_duration = 0.0;
  std::vector<double> occupancy;  // time-average law during vacations
};

VacationSample simulate_vacations(const VacationModelSpec& vac, std::uint64_t n_vacations,
                                  std::uint64_t seed);

/// Time-average law of the standalone system behind a disaster-coupled
/// vacation model: exit events clear the system instead of ending a phase.
Pmf simulate_standalone(const DisasterCoupled& d, std::uint64_t n_clearings, std::uint64_t seed);

}  // namespace mxvac
