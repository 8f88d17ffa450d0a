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
#include <vector>

#include "mxvac/mxg1.hpp"
#include "mxvac/pgf.hpp"
#include "mxvac/vacation.hpp"

namespace mxvac {

/// State (mode, count): mode 0 is vacation (count >= 0), mode 1 is working
/// (count >= 1).
struct StateIndex {
  int mode = 0;
  std::size_t count = 0;

  bool operator==(const StateIndex&) const = default;
};

struct Transition {
  std::size_t from;
  std::size_t to;
  double rate;
};

/// Generator of the truncated chain on (0,0..N) and (1,1..N). Only
/// off-diagonal rates are stored; the diagonal is minus the row sum.
class GeneratorMatrix {
 public:
  explicit GeneratorMatrix(std::size_t truncation);

  std::size_t truncation() const { return n_; }
  std::size_t dimension() const { return 2 * n_ + 1; }
  std::size_t index(StateIndex s) const;
  StateIndex state(std::size_t i) const;

  /// Adds rate from -> to; self-loops and zero rates are ignored. Targets
  /// beyond the truncation are dropped and their rate is recorded.
  void add(StateIndex from, StateIndex to, double rate);

  const std::vector<Transition>& transitions() const { return t_; }
  /// Diagonal entries (minus total outflow inside the truncated space).
  std::vector<double> diagonal() const;
  /// Total rate dropped at the truncation boundary, per source state.
  const std::vector<double>& dropped_rate() const { return dropped_; }
  /// max_i |sum_j q(i, j)|, including the diagonal.
  double max_row_sum() const;
  double min_off_diagonal() const;

 private:
  std::size_t n_;
  std::vector<Transition> t_;
  std::vector<double> dropped_;
};

/// Requires exponential service, finite batch support and a vacation model
/// with memoryless dynamics (everything except the hypergeometric ratio and
/// non-exponential vacation or vacation-mode service).
GeneratorMatrix build_generator(const WorkingModeSpec& spec, const VacationModelSpec& vac,
                                std::size_t truncation);

struct StationaryVector {
  std::vector<double> pi;
  double residual = 0.0;  // max_j |(pi Q)_j|
};

/// Direct sparse solve of pi Q = 0 with one equation replaced by sum pi = 1.
StationaryVector steady_state(const GeneratorMatrix& g);

struct SteadyStateReport {
  std::size_t truncation = 0;
  std::vector<double> p0;  // p_(0,j), j = 0..N
  std::vector<double> p1;  // p_(1,j), j = 0..N with p1[0] = 0
  double p0_dot = 0.0;
  double p1_dot = 0.0;
  Pmf vacation_law;  // conditional on vacation mode
  Pmf working_law;   // conditional on working mode
  Pmf transfer_law;  // law of Y from the exit flux
  double e_y = 0.0;
  double cycle_rate = 0.0;  // cycles per unit time
  double e_b0 = 0.0;
  double e_b1 = 0.0;
  double boundary_mass = 0.0;  // p_(0,N) + p_(1,N)
  bool boundary_flag = false;  // boundary_mass > 1e-9
  double residual = 0.0;
};

SteadyStateReport oracle_report(const WorkingModeSpec& spec, const VacationModelSpec& vac,
                                std::size_t truncation);

}  // namespace mxvac
