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
#include <complex>
#include <vector>

#include "doctest.h"
#include "mxvac/ctmc.hpp"
#include "mxvac/errors.hpp"
#include "mxvac/simulator.hpp"
#include "mxvac/vacation.hpp"
#include "oracles.hpp"

using namespace mxvac;

namespace {

// gamma_k = k + 1, p_k = 1 / (k + 1), lambda_v = 1.
MarkovianBalking worked_example() {
  return {1.0, RateSequence::rational({1.0}, {1.0, 1.0}), RateSequence::rational({1.0, 1.0}),
          RateSequence::constant(0.0)};
}

HypergeometricRatio worked_ratio() {
  using c = std::complex<double>;
  return {{c(2.0, 0.0), c(2.0, 0.0)}, {c(1.0, 0.0), c(1.0, 0.0), c(2.0, -1.0), c(2.0, 1.0)}};
}

std::vector<double> transfer_freq(const VacationSample& s) {
  std::vector<double> f(s.y_counts.size(), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = double(s.y_counts[i]) / double(s.vacations);
  return f;
}

void check_proper(const TransferLaw& t) {
  CHECK(std::abs(t.psi()(0.0)) < 1e-12);
  CHECK(t.psi()(1.0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::isfinite(t.mean_y()));
  for (double p : t.probabilities(64)) CHECK(p >= -1e-10);
}

}  // namespace

TEST_CASE("multiple vacations") {
  const double lv = 1.5, g = 0.8;
  const MultipleVacations m{lv, BatchLaw::point(1), ServiceLaw::exponential(g)};
  const TransferLaw t = multiple_vacation_psi(m);
  for (double z = 0.0; z <= 1.0; z += 0.1) {
    const double ref = (g / (g + lv * (1 - z)) - g / (g + lv)) * (g + lv) / lv;
    CHECK(t.psi()(z) == doctest::Approx(ref).epsilon(1e-12));
  }
  check_proper(t);
  CHECK_THROWS_AS(multiple_vacation_psi({lv, BatchLaw::point(1), ServiceLaw::deterministic(0.0)}),
                  InvalidInput);

  const MultipleVacations d{1.0, BatchLaw::from_pmf(Pmf::from_weights({0.0, 0.7, 0.3})),
                            ServiceLaw::deterministic(0.8)};
  const VacationSample s = simulate_vacations(d, 100000, 17);
  CHECK(oracle::tv_diff(transfer_freq(s), multiple_vacation_psi(d).probabilities(40)) < 0.01);
  CHECK(s.mean_duration ==
        doctest::Approx(multiple_vacation_e_b0(d)).epsilon(0.02));
}

TEST_CASE("markovian steady state") {
  const double lv = 2.0, g = 0.5;
  const MarkovianBalking m{lv, RateSequence::constant(1.0), RateSequence::constant(g),
                           RateSequence::constant(0.0)};
  const VacationSteadyState ss = markovian_steady_state(m);
  CHECK(ss.p0[0] == 1.0);
  for (std::size_t k = 1; k < 30; ++k) {
    CHECK(ss.p0[k] == doctest::Approx(std::pow(lv / (lv + g), double(k))).epsilon(1e-12));
  }

  const VacationSteadyState w = markovian_steady_state(worked_example());
  const TransferLaw t = markovian_psi(w, worked_example().exit);
  const auto psi = t.probabilities(8);
  for (std::size_t k = 1; k < 8; ++k) {
    const double x = double(k);
    CHECK(psi[k + 1] / psi[k] ==
          doctest::Approx((x + 2) * (x + 2) / ((x + 1) * (x + 1) * (x * x + 4 * x + 5))));
  }
}

TEST_CASE("markovian transfer law") {
  const double lv = 2.0, g = 0.5;
  const MarkovianBalking m{lv, RateSequence::constant(1.0), RateSequence::constant(g),
                           RateSequence::constant(0.0)};
  VacationSteadyState ss = markovian_steady_state(m);
  const TransferLaw t = markovian_psi(ss, m.exit);
  const double r = lv / (lv + g);
  const auto psi = t.probabilities(30);
  for (std::size_t k = 1; k <= 30; ++k) {
    CHECK(psi[k] == doctest::Approx((1 - r) * std::pow(r, double(k - 1))).epsilon(1e-12));
  }

  for (double& v : ss.p0) v *= 7.0;
  ss.exit_mass *= 7.0;
  const auto scaled = markovian_psi(ss, m.exit).probabilities(30);
  CHECK(oracle::sup_diff(psi, scaled) < 1e-15);

  const TransferLaw mv = multiple_vacation_psi({lv, BatchLaw::point(1), ServiceLaw::exponential(g)});
  for (double z = 0.0; z < 1.0; z += 0.05) CHECK(std::abs(t.psi()(z) - mv.psi()(z)) < 1e-10);
  check_proper(t);
}

TEST_CASE("expected vacation duration") {
  const double lv = 2.0, g = 0.5;
  MarkovianBalking m{lv, RateSequence::constant(1.0), RateSequence::constant(g),
                     RateSequence::constant(0.0)};
  CHECK(expected_vacation_duration(m) == doctest::Approx(1 / lv + 1 / g).epsilon(1e-12));
  m.exit = RateSequence::constant(1e9);
  CHECK(expected_vacation_duration(m) == doctest::Approx(1 / lv).epsilon(1e-8));

  // Disasters and state-dependent balking, against an absorption-time solve.
  const MarkovianBalking d{1.2, RateSequence::rational({1.0}, {1.0, 0.5}),
                           RateSequence::rational({0.3, 0.2}), RateSequence::constant(0.4)};
  const int n = 300;
  const double ref = oracle::absorption_time(n, 0, [&](int i, int j) {
    if (j == i + 1 && j < n) return d.lambda_v * d.admit(i);
    if (i >= 1 && j == n) return d.exit(i);
    if (i >= 1 && j == 0) return d.disaster(i);
    return 0.0;
  });
  CHECK(expected_vacation_duration(d) == doctest::Approx(ref).epsilon(1e-8));
}

TEST_CASE("calibration") {
  VacationSteadyState ss;
  ss.p0 = {1.0, 1.0};
  ss.normalizer = 2.0;
  const VacationSteadyState c = calibrate_p00(ss, 1.0, 1.0);
  CHECK(c.p00 == doctest::Approx(0.25));
  CHECK(c.p0[0] + c.p0[1] == doctest::Approx(0.5));

  const WorkingModeSpec w{1.0, BatchLaw::point(1), ServiceLaw::exponential(2.0)};
  const MarkovianBalking m{1.0, RateSequence::constant(1.0), RateSequence::constant(1.0),
                           RateSequence::constant(0.0)};
  const double e_b0 = expected_vacation_duration(m);
  const CycleQuantities q = cycle_quantities(w, markovian_psi(markovian_steady_state(m), m.exit), e_b0);
  const VacationSteadyState cal = calibrate_p00(markovian_steady_state(m), e_b0, q.e_b1);
  const SteadyStateReport r = oracle_report(w, m, 400);
  CHECK(std::abs(cal.p00 - r.p0[0]) < 1e-8);
  double sum = 0.0;
  for (double v : cal.p0) sum += v;
  CHECK(sum == doctest::Approx(q.p0_dot).epsilon(1e-10));
}

TEST_CASE("hypergeometric transfer law") {
  const TransferLaw h = hypergeometric_psi(worked_ratio());
  const TransferLaw m = markovian_psi(markovian_steady_state(worked_example()), worked_example().exit);
  CHECK(oracle::sup_diff(h.probabilities(40), m.probabilities(40)) < 1e-10);
  check_proper(h);

  const TransferLaw one = hypergeometric_psi({{std::complex<double>(-1.0, 0.0)}, {}});
  CHECK(one.mean_y() == doctest::Approx(1.0));
  CHECK(one.psi()(0.3) == doctest::Approx(0.3));

  const TransferLaw geo = hypergeometric_psi({{}, {}, 0.4});
  const auto p = geo.probabilities(20);
  for (std::size_t k = 1; k <= 20; ++k) CHECK(p[k] == doctest::Approx(0.6 * std::pow(0.4, double(k - 1))));

  CHECK_THROWS_AS(hypergeometric_psi({{}, {}, 1.0}), InvalidInput);
  CHECK_THROWS_AS(hypergeometric_psi({{std::complex<double>(1.0, 1.0)}, {}}), InvalidInput);
}

TEST_CASE("pFq series") {
  using c = std::complex<double>;
  const std::vector<c> a{c(1.0)}, b{};
  // 1F0(1;;z) = 1 / (1 - z).
  CHECK(std::abs(hypergeometric_pfq(a, b, c(0.5)) - 2.0) < 1e-12);
  // 0F0(;;z) = e^z.
  CHECK(std::abs(hypergeometric_pfq({}, {}, c(0.7)) - std::exp(0.7)) < 1e-12);
  CHECK_THROWS_AS(hypergeometric_pfq(a, b, c(1.5)), InvalidInput);
}

TEST_CASE("binomial reneging") {
  const BinomialReneging m{1.0, 1.0, 1.0, 0.5};
  CHECK(binomial_reneging_g0(m, 1.0).real() == doctest::Approx(m.xi / m.gamma).epsilon(1e-12));

  // p = 1: only the k = 0 factor carries z.
  const BinomialReneging all{1.0, 2.0, 0.5, 1.0};
  for (double z : {0.0, 0.4, 0.9}) {
    const double f0 = all.xi / (all.gamma + all.xi + all.lambda_v * (1 - z));
    const double f = all.xi / (all.gamma + all.xi);
    CHECK(binomial_reneging_g0(all, z).real() == doctest::Approx(f0 / (1 - f)).epsilon(1e-12));
  }

  const TransferLaw lin = psi_from_g0([](std::complex<double> z) { return 0.3 + 0.7 * z; }, 0.3, 1.0);
  CHECK(lin.psi()(0.4) == doctest::Approx(0.4));
  CHECK(lin.mean_y() == doctest::Approx(1.0));

  const TransferLaw fast = binomial_reneging_psi({1.0, 1.0, 1e8, 0.5});
  CHECK(fast.mean_y() == doctest::Approx(1.0).epsilon(1e-6));

  const TransferLaw t = binomial_reneging_psi(m);
  check_proper(t);
  const VacationSample s = simulate_vacations(m, 100000, 3);
  CHECK(oracle::tv_diff(transfer_freq(s), t.probabilities(40)) < 0.01);
  CHECK(s.mean_duration == doctest::Approx(binomial_reneging_e_b0(m)).epsilon(0.02));

  // With an M/M/1 working mode the conditional law is the M/M/1 busy law
  // convolved with Y^e.
  const WorkingModeSpec w{1.0, BatchLaw::point(1), ServiceLaw::exponential(2.0)};
  const PgfHandle g = decomposition_pgf(w, t);
  const PgfHandle ye = equilibrium_pgf(t.psi());
  for (double z = 0.05; z < 1.0; z += 0.1) {
    CHECK(g(z) == doctest::Approx((2.0 - 1.0) * z / (2.0 - z) * ye(z)).epsilon(1e-10));
  }
}

TEST_CASE("disaster coupled M/M/1") {
  const MM1Inner in{1.0, 2.0, 1.0};
  const double rho = mm1_disaster_rho(in);
  CHECK(rho == doctest::Approx((4.0 - std::sqrt(8.0)) / 4.0).epsilon(1e-14));
  CHECK(rho == doctest::Approx(0.2928932).epsilon(1e-7));
  const TransferLaw t = disaster_coupled_psi({in});
  for (double z = 0.0; z <= 1.0; z += 0.1) {
    CHECK(t.psi()(z) == doctest::Approx((1 - rho) * z / (1 - rho * z)).epsilon(1e-12));
  }
  check_proper(t);
  CHECK(mm1_disaster_rho({1.0, 2.0, 1e9}) < 1e-8);

  // Standalone system simulated directly.
  const Pmf sim = simulate_standalone({in}, 100000, 9);
  std::vector<double> ref(40);
  for (std::size_t i = 0; i < ref.size(); ++i) ref[i] = (1 - rho) * std::pow(rho, double(i));
  CHECK(oracle::tv_diff(sim.dense(), ref) < 0.01);
}

TEST_CASE("chain sequence rates") {
  // With lambda_0 = 1 the a = 0.25 chain is (n + 2) / (2 (n + 1)), tending to
  // the symmetric walk 1/2, 1/2 (which is the a = 0.25 chain with lambda_0 = 1/2).
  for (std::size_t n = 1; n <= 200; ++n) {
    const ChainRates r = chain_bdp_rates(0.25, n);
    CHECK(r.birth == doctest::Approx((n + 2.0) / (2.0 * (n + 1.0))).epsilon(1e-12));
  }
  CHECK(std::abs(chain_bdp_rates(0.25, 100000).birth - 0.5) < 1e-5);
  // lambda_1 = 1 - a / lambda_0 = 0.8 exactly; the reference values
  // 0.796, 0.746, 0.729, 0.723, 0.721 sit about 0.004 below these.
  const double exact[] = {0.8, 0.75, 11.0 / 15.0, 0.7272727272727273, 0.725};
  const double reference[] = {0.796, 0.746, 0.729, 0.723, 0.721};
  for (std::size_t n = 1; n <= 5; ++n) {
    CHECK(chain_bdp_rates(0.2, n).birth == doctest::Approx(exact[n - 1]).epsilon(1e-12));
    CHECK(std::abs(chain_bdp_rates(0.2, n).birth - reference[n - 1]) < 5e-3);
  }
  CHECK(chain_bdp_rates(0.2, 0).birth == 1.0);
  for (double a : {0.05, 0.2, 0.25}) {
    for (std::size_t n = 1; n <= 100; ++n) {
      const ChainRates r = chain_bdp_rates(a, n);
      CHECK(std::abs(chain_bdp_rates(a, n - 1).birth * r.death - a) < 1e-12);
      CHECK(std::abs(r.birth + r.death - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("chain sequence with clearing") {
  const Pmf p = chain_bdp_disaster_pmf(0.25, 1.0);
  CHECK(p.total() == doctest::Approx(1.0).epsilon(1e-8));

  for (double a : {0.25, 0.1}) {
    const double g = 0.6;
    const int n = 400;
    const auto ref = oracle::dense_stationary(n, [&](int i, int j) {
      double r = 0.0;
      if (j == i + 1) r += chain_bdp_rates(a, std::size_t(i)).birth;
      if (i >= 1 && j == i - 1) r += chain_bdp_rates(a, std::size_t(i)).death;
      if (i >= 1 && j == 0) r += g;
      return r;
    });
    CHECK(oracle::sup_diff(chain_bdp_disaster_pmf(a, g).dense(), ref) < 1e-7);
  }
  CHECK(chain_bdp_disaster_pmf(0.2, 1e9).at(0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK_THROWS_AS(validate(VacationModelSpec{DisasterCoupled{ChainBDPInner{0.3, 1.0}}}), InvalidInput);
}

TEST_CASE("M^X/G/1 vacation mode with disasters") {
  const MXG1DisasterInner m{1.0, BatchLaw::point(1), ServiceLaw::exponential(2.0), 0.5, 0.5};
  const double z = mxg1_disaster_root(m);
  CHECK(z > 0.0);
  CHECK(z < 1.0);
  const double fixed = m.service_v.lst(m.xi + m.gamma + m.lambda_v * (1 - z)).real();
  CHECK(std::abs(z - fixed) < 1e-12);
  // Exponential service: the root solves a quadratic.
  const double s = 2.0 + 1.0 + 1.0;
  CHECK(z == doctest::Approx((s - std::sqrt(s * s - 8.0)) / 2.0).epsilon(1e-12));

  const TransferLaw t = mxg1_disaster_psi(m);
  check_proper(t);

  const MXG1DisasterInner g{0.8, BatchLaw::from_pmf(Pmf::from_weights({0.0, 0.5, 0.5})),
                            ServiceLaw::erlang(2, 4.0), 0.3, 0.6};
  const VacationSample sample = simulate_vacations(DisasterCoupled{g}, 100000, 21);
  CHECK(oracle::tv_diff(transfer_freq(sample), mxg1_disaster_psi(g).probabilities(60)) < 0.015);
}

TEST_CASE("dispatch") {
  const VacationModelSpec specs[] = {
      MultipleVacations{1.0, BatchLaw::point(1), ServiceLaw::exponential(1.0)},
      worked_example(), worked_ratio(), BinomialReneging{1.0, 1.0, 1.0, 0.5},
      DisasterCoupled{MM1Inner{1.0, 2.0, 1.0}}, DisasterCoupled{ChainBDPInner{0.2, 1.0}},
      DisasterCoupled{MXG1DisasterInner{1.0, BatchLaw::point(1), ServiceLaw::exponential(2.0), 0.5, 0.5}}};
  const char* names[] = {"multiple_vacations", "markovian_balking", "hypergeometric_ratio",
                         "binomial_reneging", "disaster_mm1", "disaster_chain_bdp", "disaster_mxg1"};
  for (std::size_t i = 0; i < std::size(specs); ++i) {
    CHECK(model_name(specs[i]) == names[i]);
    CHECK_NOTHROW(validate(specs[i]));
    check_proper(transfer_law(specs[i]));
    const auto e = vacation_e_b0(specs[i]);
    if (i == 2) {
      CHECK_FALSE(e.has_value());
    } else {
      REQUIRE(e.has_value());
      CHECK(*e > 0.0);
    }
  }
  CHECK_THROWS_AS(validate(VacationModelSpec{BinomialReneging{1.0, 1.0, 1.0, 1.5}}), InvalidInput);
  CHECK_THROWS_AS(validate(VacationModelSpec{DisasterCoupled{MM1Inner{-1.0, 2.0, 1.0}}}), InvalidInput);
}
