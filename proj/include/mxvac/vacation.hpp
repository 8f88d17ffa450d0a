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

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mxvac/batch_law.hpp"
#include "mxvac/mxg1.hpp"
#include "mxvac/pgf.hpp"
#include "mxvac/service_law.hpp"
#include "mxvac/transfer_law.hpp"

namespace mxvac {

/// A state-indexed rate or probability f(j), j = 0, 1, ..., given as a ratio
/// of two polynomials in j (coefficients in ascending powers).
class RateSequence {
 public:
  RateSequence() : RateSequence(constant(0.0)) {}
  static RateSequence constant(double c);
  static RateSequence rational(std::vector<double> numerator,
                               std::vector<double> denominator = {1.0});

  double operator()(std::size_t j) const;
  const std::vector<double>& numerator() const { return num_; }
  const std::vector<double>& denominator() const { return den_; }

 private:
  RateSequence(std::vector<double> n, std::vector<double> d)
      : num_(std::move(n)), den_(std::move(d)) {}
  std::vector<double> num_, den_;
};

// ---- vacation model parameter sets ---------------------------------------

/// Multiple vacations of length V; batches (rate lambda_v, size B_v) arrive
/// during the vacation; the vacation mode ends at the first vacation end that
/// finds at least one customer.
struct MultipleVacations {
  double lambda_v;
  BatchLaw batch_v;
  ServiceLaw vacation;
};

/// Markovian vacation mode with balking and disasters. In state j an arriving
/// batch (size law `batch`) is admitted with probability admit(j), disasters
/// clear the system at rate disaster(j) and the vacation ends at rate exit(j)
/// (exit(0) is treated as zero).
struct MarkovianBalking {
  double lambda_v;
  RateSequence admit;
  RateSequence exit;
  RateSequence disaster;
  BatchLaw batch = BatchLaw::point(1);
};

/// Transfer law given by the ratio
///   P(Y = j+1) / P(Y = j) = x prod_i (j + a_i) / prod_i (j + b_i),  j >= 1,
/// with x = `argument`.
struct HypergeometricRatio {
  std::vector<std::complex<double>> numerator_roots;
  std::vector<std::complex<double>> denominator_roots;
  double argument = 1.0;
};

/// Exponential(gamma) multiple vacations with Poisson(lambda_v) arrivals and
/// abandonment epochs at rate xi where each waiting customer leaves with
/// probability p.
struct BinomialReneging {
  double lambda_v, xi, gamma, p;
};

/// M/M/1 vacation-mode queue; the vacation ends at rate gamma when nonempty.
struct MM1Inner {
  double lambda_v, mu_v, gamma;
};

/// Chain-sequence birth-death vacation mode (lambda_0 = 1,
/// lambda_n + mu_n = 1, lambda_{n-1} mu_n = a); exit at rate gamma.
struct ChainBDPInner {
  double a, gamma;
};

/// M^X/G/1 vacation-mode queue with disasters at rate xi; exit at rate gamma.
struct MXG1DisasterInner {
  double lambda_v;
  BatchLaw batch_v;
  ServiceLaw service_v;
  double xi, gamma;
};

/// Vacation mode whose transfer law follows from a standalone system with
/// clearing at rate gamma (plus any internal disasters).
struct DisasterCoupled {
  std::variant<MM1Inner, ChainBDPInner, MXG1DisasterInner> inner;
};

using VacationModelSpec = std::variant<MultipleVacations, MarkovianBalking, HypergeometricRatio,
                                       BinomialReneging, DisasterCoupled>;

/// Vacation-mode occupancy. Before calibration p0[0] = p00 = 1 and the
/// vector is relative to that seed.
struct VacationSteadyState {
  std::vector<double> p0;
  double p00 = 1.0;
  double e_b0 = 0.0;
  /// sum_i exit(i) p_(0,i) over the stored (unnormalized) vector.
  double exit_mass = 0.0;
  /// Bound on the neglected tail of the occupancy series.
  double tail_bound = 0.0;
  /// Sum of the product series 1 + sum_k prod_j (...), relative to the seed.
  double normalizer = 1.0;
};

// ---- multiple vacations ---------------------------------------------------

TransferLaw multiple_vacation_psi(const MultipleVacations& m);
double multiple_vacation_e_b0(const MultipleVacations& m);

// ---- Markovian vacation with balking and disasters -------------------------

/// Product-form occupancy relative to p_(0,0) = 1. Requires unit batches.
/// At least `k_min` terms are kept even when they are negligible.
VacationSteadyState markovian_steady_state(const MarkovianBalking& m,
                                           std::size_t k_max = 1'000'000,
                                           std::size_t k_min = 0);
/// psi_i proportional to exit(i) p_(0,i); independent of the seed scale.
TransferLaw markovian_psi(const VacationSteadyState& ss, const RateSequence& exit);
/// E[B0] from the first-step equation, solved for E[B0].
double expected_vacation_duration(const MarkovianBalking& m, std::size_t k_max = 1'000'000);
/// Rescales the occupancy so that it sums to p0. = E[B0] / (E[B0] + E[B1]).
VacationSteadyState calibrate_p00(const VacationSteadyState& ss, double e_b0, double e_b1);

// ---- rational ratio / hypergeometric transfer laws ------------------------

TransferLaw hypergeometric_psi(const HypergeometricRatio& h);
/// Generalized hypergeometric series pFq(a; b; z) for |z| <= 1.
std::complex<double> hypergeometric_pfq(std::span<const std::complex<double>> a,
                                        std::span<const std::complex<double>> b,
                                        std::complex<double> z);

// ---- binomial reneging -----------------------------------------------------

/// Unnormalized vacation-mode PGF
///   sum_{j>=0} prod_{k=0..j} xi / (gamma + xi + lambda_v (1-p)^k (1 - z)).
std::complex<double> binomial_reneging_g0(const BinomialReneging& m, std::complex<double> z,
                                          double tol = 1e-16);
/// Derivative of the unnormalized G0 at z = 1.
double binomial_reneging_g0_slope(const BinomialReneging& m, double tol = 1e-16);
/// Psi(z) = (G0(z) - G0(0)) / (G0(1) - G0(0)). The mean is estimated
/// numerically when not supplied.
TransferLaw psi_from_g0(std::function<std::complex<double>(std::complex<double>)> g0,
                        double p00_value, double p0dot_value,
                        std::optional<double> mean = std::nullopt);
TransferLaw binomial_reneging_psi(const BinomialReneging& m);
double binomial_reneging_e_b0(const BinomialReneging& m);

// ---- vacation modes coupled to systems with clearing -----------------------

/// Root of mu rho^2 - (gamma + lambda + mu) rho + lambda = 0 in (0, 1).
double mm1_disaster_rho(const MM1Inner& m);

struct ChainRates {
  double birth;
  double death;
};
ChainRates chain_bdp_rates(double a, std::size_t n);
/// Stationary law of the chain-sequence BDP with clearing at rate gamma.
/// Stops once the mass is within 1e-8 of one and the terms are negligible;
/// `n_max` is the ceiling.
Pmf chain_bdp_disaster_pmf(double a, double gamma, std::size_t n_max = 1'000'000);

/// Smallest root in (0, 1) of z = F_S(xi + gamma + lambda (1 - B(z))).
double mxg1_disaster_root(const MXG1DisasterInner& m);
/// Psi for the M^X/G/1 vacation mode with disasters.
TransferLaw mxg1_disaster_psi(const MXG1DisasterInner& m);
/// Empty probability of the standalone system with clearing at xi + gamma.
double mxg1_disaster_empty_prob(const MXG1DisasterInner& m);

/// Stationary PGF Pi(z) of the standalone system with clearing.
PgfHandle disaster_stationary_pgf(const DisasterCoupled& d);
/// Psi(z) = (Pi(z) - pi_0) / (1 - pi_0).
TransferLaw disaster_coupled_psi(const DisasterCoupled& d);
double disaster_coupled_e_b0(const DisasterCoupled& d);

// ---- dispatch --------------------------------------------------------------

std::string model_name(const VacationModelSpec& v);
void validate(const VacationModelSpec& v);
TransferLaw transfer_law(const VacationModelSpec& v);
/// E[B0], when the model determines it.
std::optional<double> vacation_e_b0(const VacationModelSpec& v);
/// p_(0,k), k = 0..k_max, when a closed form exists.
std::optional<std::vector<double>> vacation_mode_probs(const VacationModelSpec& v,
                                                       const CycleQuantities& cycles,
                                                       std::size_t k_max);

}  // namespace mxvac
