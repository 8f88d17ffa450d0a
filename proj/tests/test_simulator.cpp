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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "mxvac/ctmc.hpp"
#include "mxvac/errors.hpp"
#include "mxvac/mxg1.hpp"
#include "mxvac/simulator.hpp"
#include "mxvac/vacation.hpp"
#include "oracles.hpp"

using namespace mxvac;

namespace {

const WorkingModeSpec kMM1{1.0, BatchLaw::point(1), ServiceLaw::exponential(2.0)};

SimConfig config(const WorkingModeSpec& w, const VacationModelSpec& v, std::uint64_t cycles,
                 unsigned reps = 16, std::uint64_t seed = 7) {
  SimConfig c{w, v};
  c.n_cycles = cycles;
  c.replications = reps;
  c.seed = seed;
  return c;
}

std::vector<double> normalized(const std::vector<std::uint64_t>& counts) {
  double total = 0.0;
  for (auto c : counts) total += double(c);
  std::vector<double> out(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) out[i] = double(counts[i]) / total;
  return out;
}

}  // namespace

TEST_CASE("M/M/1 with exponential idle vacation matches the oracle") {
  const MarkovianBalking m{1.0, RateSequence::constant(1.0), RateSequence::constant(1.0),
                           RateSequence::constant(0.0)};
  const SimulationResult s = simulate(config(kMM1, m, 6250));
  const SteadyStateReport r = oracle_report(kMM1, m, 400);
  CHECK(s.report.p1_dot_se > 0.0);
  CHECK(std::abs(s.report.p1_dot - r.p1_dot) <= 3.0 * s.report.p1_dot_se);
  double total = 0.0;
  for (double p : s.report.p0) total += p;
  for (double p : s.report.p1) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.report.p0_dot + s.report.p1_dot == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("transfer histogram for multiple vacations") {
  const MultipleVacations mv{1.2, BatchLaw::point(1), ServiceLaw::exponential(0.7)};
  const SimulationResult s = simulate(config(kMM1, mv, 6250));
  CHECK(oracle::tv_diff(normalized(s.report.y_counts), multiple_vacation_psi(mv).probabilities(60)) <
        0.01);
  CHECK(std::abs(s.report.mean_y - multiple_vacation_psi(mv).mean_y()) <= 3.0 * s.report.mean_y_se);
}

TEST_CASE("rare vacation arrivals leave the system in vacation") {
  const MultipleVacations mv{1e-3, BatchLaw::point(1), ServiceLaw::exponential(1.0)};
  const SimulationResult s = simulate(config(kMM1, mv, 100, 4));
  CHECK(s.report.p0_dot > 0.999);
}

TEST_CASE("working-mode law against the decomposition") {
  const WorkingModeSpec w{0.5, BatchLaw::from_pmf(Pmf::from_weights({0.0, 0.5, 0.5})),
                          ServiceLaw::exponential(3.0)};
  const MultipleVacations mv{1.0, BatchLaw::point(1), ServiceLaw::exponential(0.8)};
  const SimulationResult s = simulate(config(w, mv, 6250));
  const Pmf law = empirical_conditional_law(s.report, Mode::working);
  const Pmf ref = extract_coefficients(decomposition_pgf(w, multiple_vacation_psi(mv)), 80);
  CHECK(oracle::tv_diff(law.dense(), ref.dense()) < 0.02);

  // Arrivals see time averages.
  CHECK(oracle::tv_diff(normalized(s.report.seen_counts), ref.dense()) < 0.02);

  // Renewal-reward structure.
  const auto& r = s.report;
  const double se = r.p1_dot_se * r.mean_cycle + r.p1_dot * r.mean_cycle_se + r.mean_working_se;
  CHECK(std::abs(r.p1_dot * r.mean_cycle - r.mean_working) <= 3.0 * se);
  const double e_b1 = w.service.mean() * r.mean_y / (1.0 - w.load());
  CHECK(std::abs(r.mean_working - e_b1) <= 3.0 * (r.mean_working_se + w.service.mean() * r.mean_y_se / (1.0 - w.load())));
}

TEST_CASE("arrival-epoch law is the single-start law convolved with the equilibrium transfer law") {
  const WorkingModeSpec w{0.6, BatchLaw::point(1), ServiceLaw::deterministic(1.0)};
  const MultipleVacations mv{0.6, BatchLaw::from_pmf(Pmf::from_weights({0.0, 0.5, 0.5})),
                             ServiceLaw::deterministic(1.5)};
  const SimulationResult s = simulate(config(w, mv, 6250));
  const Pmf single = extract_coefficients(single_start_pgf(w), 120);
  const TransferLaw t = multiple_vacation_psi(mv);
  const auto tails = t.tails(120);
  std::vector<double> conv(121, 0.0);
  for (std::size_t i = 0; i <= 120; ++i) {
    for (std::size_t k = 0; i + k <= 120; ++k) conv[i + k] += single.at(i) * tails[k] / t.mean_y();
  }
  CHECK(oracle::tv_diff(normalized(s.report.seen_counts), conv) < 0.02);
}

TEST_CASE("coupled vacation law equals the standalone law") {
  const DisasterCoupled d{MM1Inner{1.0, 2.0, 1.0}};
  const SimulationResult s = simulate(config(kMM1, d, 6250));
  const Pmf vac = empirical_conditional_law(s.report, Mode::vacation);
  const Pmf standalone = simulate_standalone(d, 100000, 5);
  CHECK(oracle::tv_diff(vac.dense(), standalone.dense()) < 0.02);
  const Pmf exact = extract_coefficients(disaster_stationary_pgf(d), 60);
  CHECK(oracle::tv_diff(vac.dense(), exact.dense()) < 0.02);
}

TEST_CASE("pathwise audits and estimator identities") {
  const WorkingModeSpec w{0.5, BatchLaw::from_pmf(Pmf::from_weights({0.0, 0.6, 0.4})),
                          ServiceLaw::erlang(2, 5.0)};
  const MultipleVacations mv{0.8, BatchLaw::from_pmf(Pmf::from_weights({0.0, 0.7, 0.3})),
                             ServiceLaw::deterministic(1.0)};
  SimConfig c = config(w, mv, 25000, 64);
  c.keep_records = 20;
  const SimulationResult s = simulate(c);
  const LevelCrossingAudit a = level_crossing_audit(s.log);
  CHECK(a.cycles_checked == 64u * 25000u);
  CHECK(a.mismatches == 0);
  CHECK(a.ok());
  CHECK(s.report.wald.within(3.0));
  CHECK(s.report.downcross.within(3.0));
  REQUIRE(s.log.records.size() == 64u * 20u);
  for (const CycleRecord& r : s.log.records) {
    CHECK(r.subbusy.size() == r.y);
    double t = 0.0, cs = 0.0;
    for (double x : r.time_in_state) t += x;
    for (double x : r.subbusy) cs += x;
    CHECK(t == doctest::Approx(r.working_duration).epsilon(1e-12));
    CHECK(cs == doctest::Approx(r.working_duration).epsilon(1e-12));
    for (std::size_t k = 0; k < r.downcrossings.size(); ++k) {
      CHECK(r.downcrossings[k] == (k < r.upcrossings.size() ? r.upcrossings[k] : 0));
    }
  }
}

TEST_CASE("time-in-state expectations follow the recursion") {
  const WorkingModeSpec w{0.01, BatchLaw::point(1), ServiceLaw::exponential(1.0)};
  const MultipleVacations mv{0.01, BatchLaw::point(1), ServiceLaw::exponential(0.5)};
  const SimulationResult s = simulate(config(w, mv, 6250));
  const TransferLaw t = multiple_vacation_psi(mv);
  const CycleQuantities q = cycle_quantities(w, t, multiple_vacation_e_b0(mv));
  const WorkingStateProbs p = recursive_working_probs(w, t, q, 5);
  for (std::size_t j = 1; j <= 3; ++j) {
    CAPTURE(j);
    CHECK(std::abs(s.report.p1[j] - p.at(j)) <= 3.0 * s.report.p1_se[j] + 1e-12);
  }
  CHECK(p.at(1) > 10 * p.at(2));
}

TEST_CASE("single cycle") {
  SimConfig c = config(kMM1, MultipleVacations{1.0, BatchLaw::point(1), ServiceLaw::exponential(1.0)}, 1, 1);
  c.keep_records = 1;
  const SimulationResult s = simulate(c);
  REQUIRE(s.log.records.size() == 1);
  const CycleRecord& r = s.log.records[0];
  const Pmf law = empirical_conditional_law(s.report, Mode::working);
  for (std::size_t j = 1; j < r.time_in_state.size(); ++j) {
    CHECK(law.at(j) == doctest::Approx(r.time_in_state[j] / r.working_duration).epsilon(1e-12));
  }
  CHECK(s.report.mean_vacation == doctest::Approx(r.vacation_duration));
  CHECK(s.report.mean_y == doctest::Approx(double(r.y)));
}

TEST_CASE("determinism") {
  const VacationModelSpec v = BinomialReneging{1.0, 1.0, 1.0, 0.5};
  SimConfig c = config(kMM1, v, 2000, 8, 123);
  const SimulationResult a = simulate(c);
  c.parallel = false;
  const SimulationResult b = simulate(c);
  CHECK(a.report.p1 == b.report.p1);
  CHECK(a.report.p0 == b.report.p0);
  CHECK(a.report.p1_se == b.report.p1_se);
  CHECK(a.report.y_counts == b.report.y_counts);
  CHECK(a.report.events == b.report.events);
  CHECK(a.report.mean_cycle == b.report.mean_cycle);
  c.seed = 124;
  CHECK(simulate(c).report.p1 != a.report.p1);
}

TEST_CASE("configuration checks") {
  const MultipleVacations mv{1.0, BatchLaw::point(1), ServiceLaw::exponential(1.0)};
  CHECK_THROWS_AS(simulate(config(kMM1, mv, 0)), InvalidInput);
  CHECK_THROWS_AS(simulate(config(kMM1, mv, 10, 0)), InvalidInput);
  CHECK_THROWS_AS(simulate(config({2.0, BatchLaw::point(1), ServiceLaw::exponential(2.0)}, mv, 10)),
                  InvalidInput);
  CHECK_THROWS_AS(simulate(config(kMM1, HypergeometricRatio{{}, {}, 0.5}, 10)), InvalidInput);

  SimConfig c = config({0.99, BatchLaw::point(1), ServiceLaw::exponential(1.0)}, mv, 1000, 2);
  c.max_events = 50;
  CHECK_THROWS_AS(simulate(c), StabilityError);
}

TEST_CASE("vacation dynamics alone") {
  const MarkovianBalking m{1.5, RateSequence::rational({1.0}, {1.0, 0.5}), RateSequence::constant(0.7),
                           RateSequence::constant(0.3)};
  const VacationSample s = simulate_vacations(m, 100000, 8);
  CHECK(s.vacations == 100000u);
  const TransferLaw t = transfer_law(m);
  CHECK(oracle::tv_diff(normalized(s.y_counts), t.probabilities(60)) < 0.01);
  CHECK(s.mean_duration == doctest::Approx(expected_vacation_duration(m)).epsilon(0.02));
}
