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

#include "mxvac/batch_law.hpp"
#include "mxvac/pgf.hpp"
#include "mxvac/service_law.hpp"
#include "mxvac/transfer_law.hpp"

namespace mxvac {

/// The working-mode M^X/G/1 queue: Poisson batch arrivals at rate `lambda`,
/// batch sizes `batch`, service times `service`.
struct WorkingModeSpec {
  double lambda;
  BatchLaw batch;
  ServiceLaw service;

  /// rho = lambda E[S] E[B].
  double load() const { return lambda * service.mean() * batch.mean(); }
  /// Throws InvalidInput unless lambda > 0 and the queue is stable.
  void validate() const;
};

/// Per-cycle time bookkeeping. A cycle is one vacation followed by one
/// working period.
struct CycleQuantities {
  double e_b0 = 0.0;  // E[vacation duration]
  double e_b1 = 0.0;  // E[working duration]
  double e_t = 0.0;   // E[cycle length]
  double p0_dot = 0.0;
  double p1_dot = 0.0;
};

/// Unconditional working-state probabilities p_(1,j), stored with j = 1 at
/// index 0.
struct WorkingStateProbs {
  std::vector<double> probs;
  double truncation_mass = 0.0;

  double at(std::size_t j) const { return j >= 1 && j <= probs.size() ? probs[j - 1] : 0.0; }
};

/// Per-cycle level expectations from the Wald and level-crossing identities:
/// expected_time[j] = E[T_j] (j >= 1), expected_downcrossings[k] = E[N_k]
/// (k >= 1). Index 0 is unused and zero.
struct LevelExpectations {
  std::vector<double> expected_time;
  std::vector<double> expected_downcrossings;
};

/// alpha(z) = int_0^inf exp(-lambda (1 - B(z)) t) (1 - F_S(t)) dt.
cplx alpha_of_z(const WorkingModeSpec& spec, cplx z);

/// Time-average queue-length PGF P(z) of the plain M^X/G/1 queue.
PgfHandle regular_mxg1_pgf(const WorkingModeSpec& spec);

/// Queue-length PGF of the plain M^X/G/1 queue given the server is busy.
PgfHandle conditional_busy_pgf(const WorkingModeSpec& spec);

/// Conditional working-mode PGF when every working period starts with exactly
/// one customer, in its closed form (no division by B^e).
PgfHandle single_start_pgf(const WorkingModeSpec& spec);

/// Conditional queue-length PGF in the working mode:
///   busy-conditional M^X/G/1 PGF / B^e(z) * Psi^e(z).
/// The division is by PGF values. |B^e(z)| <= 1e-12 on [0, 1] raises
/// DiagnosticFailure; elsewhere on the disk the single-start form is used.
PgfHandle decomposition_pgf(const WorkingModeSpec& spec, const TransferLaw& transfer);

/// a_j: expected time with j extra arrivals present during one service.
/// Production route: Taylor coefficients of alpha(z) by extraction.
std::vector<double> a_coefficients_extracted(const WorkingModeSpec& spec, std::size_t j_max);

/// Validator route: adaptive quadrature of r_j(t) (1 - F_S(t)) with r_j the
/// compound-Poisson arrival-count law.
std::vector<double> a_coefficients_quadrature(const WorkingModeSpec& spec, std::size_t j_max);

/// Both routes, cross-checked; throws DiagnosticFailure when they differ by
/// more than `tolerance`. Returns the extraction route.
std::vector<double> a_coefficients(const WorkingModeSpec& spec, std::size_t j_max,
                                   double tolerance = 1e-7);

CycleQuantities cycle_quantities(const WorkingModeSpec& spec, const TransferLaw& transfer,
                                 double e_b0);

/// p_(1,j), j = 1..j_max, from the forward recursion over levels. The
/// implicit p_(1,j) term on the right-hand side (a_0 lambda p_(1,j)) is moved
/// to the left. `a` must hold at least j_max coefficients.
WorkingStateProbs recursive_working_probs(const WorkingModeSpec& spec,
                                          const TransferLaw& transfer,
                                          const CycleQuantities& cycles,
                                          std::size_t j_max,
                                          const std::vector<double>& a);

/// Convenience overload computing the a_j by extraction.
WorkingStateProbs recursive_working_probs(const WorkingModeSpec& spec,
                                          const TransferLaw& transfer,
                                          const CycleQuantities& cycles,
                                          std::size_t j_max);

/// E[T_j] and E[N_k] per cycle, built directly from the Wald identity and the
/// level-crossing balance (no division by E[T]).
LevelExpectations level_expectations(const WorkingModeSpec& spec,
                                     const std::vector<double>& psi,
                                     const std::vector<double>& a, std::size_t j_max);

}  // namespace mxvac
