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

#include "mxvac/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <sstream>

#include "mxvac/errors.hpp"
#include "mxvac/random.hpp"

namespace mxvac {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class T>
void bump(std::vector<T>& v, std::size_t i, T amount) {
  if (i >= v.size()) v.resize(i + 1, T{});
  v[i] += amount;
}

void too_long(const char* where, std::uint64_t limit) {
  std::ostringstream os;
  os << where << " exceeded " << limit << " events; the system looks unstable";
  throw StabilityError(os.str());
}

// Vacation-mode dynamics. In clearing mode an exit empties the system and the
// process continues, which realizes the standalone system with clearing.
class VacationRunner {
 public:
  VacationRunner(const VacationModelSpec& v, bool clearing) : v_(v), clearing_(clearing) {
    if (std::holds_alternative<HypergeometricRatio>(v)) {
      throw InvalidInput("hypergeometric ratio: the model has no vacation dynamics to simulate");
    }
    if (clearing && !std::holds_alternative<DisasterCoupled>(v)) {
      throw InvalidInput("standalone simulation needs a disaster-coupled vacation model");
    }
  }

  /// Runs from an empty system until an exit (or, in clearing mode, until
  /// `clearings` exits). Time spent at each level is added to occ; returns the
  /// number present at the final exit.
  std::size_t run(Rng& rng, std::vector<double>& occ, double& duration,
                  std::uint64_t max_events, std::uint64_t clearings = 1) {
    std::size_t j = 0;
    double elapsed = 0.0;
    std::uint64_t events = 0, exits = 0;
    auto stay = [&](double dt) {
      bump(occ, j, dt);
      elapsed += dt;
      if (++events > max_events) too_long("vacation", max_events);
    };
    // Returns true when the run is over.
    auto on_exit = [&]() {
      if (!clearing_) return true;
      j = 0;
      return ++exits >= clearings;
    };
    std::size_t y = 0;
    std::visit(
        overloaded{
            [&](const MultipleVacations& m) {
              for (;;) {
                double rem = m.vacation.sample(rng);
                for (;;) {
                  const double a = rng.exponential(m.lambda_v);
                  if (a >= rem) break;
                  stay(a);
                  rem -= a;
                  j += m.batch_v.sample(rng);
                }
                stay(rem);
                if (j >= 1) break;
              }
            },
            [&](const MarkovianBalking& m) {
              for (;;) {
                const double d = j >= 1 ? m.disaster(j) : 0.0;
                const double e = j >= 1 ? m.exit(j) : 0.0;
                const double total = m.lambda_v + d + e;
                stay(rng.exponential(total));
                const double u = rng.uniform() * total;
                if (u < m.lambda_v) {
                  if (rng.bernoulli(m.admit(j))) j += m.batch.sample(rng);
                } else if (u < m.lambda_v + d) {
                  j = 0;
                } else {
                  break;
                }
              }
            },
            [&](const HypergeometricRatio&) {},
            [&](const BinomialReneging& m) {
              for (;;) {
                const double busy = j >= 1 ? m.xi + m.gamma : 0.0;
                const double total = m.lambda_v + busy;
                stay(rng.exponential(total));
                const double u = rng.uniform() * total;
                if (u < m.lambda_v) {
                  ++j;
                } else if (u < m.lambda_v + m.xi) {
                  std::size_t left = 0;
                  for (std::size_t i = 0; i < j; ++i) left += rng.bernoulli(m.p) ? 1 : 0;
                  j -= left;
                } else {
                  break;
                }
              }
            },
            [&](const DisasterCoupled& dc) {
              std::visit(
                  overloaded{
                      [&](const MM1Inner& m) {
                        for (;;) {
                          const double busy = j >= 1 ? m.mu_v + m.gamma : 0.0;
                          const double total = m.lambda_v + busy;
                          stay(rng.exponential(total));
                          const double u = rng.uniform() * total;
                          if (u < m.lambda_v) {
                            ++j;
                          } else if (u < m.lambda_v + m.mu_v) {
                            --j;
                          } else {
                            y = j;
                            if (on_exit()) break;
                          }
                        }
                      },
                      [&](const ChainBDPInner& c) {
                        for (;;) {
                          const ChainRates r = rates(c.a, j);
                          const double total = r.birth + r.death + (j >= 1 ? c.gamma : 0.0);
                          stay(rng.exponential(total));
                          const double u = rng.uniform() * total;
                          if (u < r.birth) {
                            ++j;
                          } else if (u < r.birth + r.death) {
                            --j;
                          } else {
                            y = j;
                            if (on_exit()) break;
                          }
                        }
                      },
                      [&](const MXG1DisasterInner& m) {
                        double service_left = kInf;  // invalidated by clearing events
                        for (;;) {
                          const double busy = j >= 1 ? m.xi + m.gamma : 0.0;
                          const double total = m.lambda_v + busy;
                          const double dt = rng.exponential(total);
                          if (j >= 1 && service_left <= dt) {
                            stay(service_left);
                            --j;
                            service_left = j >= 1 ? m.service_v.sample(rng) : kInf;
                            continue;
                          }
                          stay(dt);
                          if (j >= 1) service_left -= dt;
                          const double u = rng.uniform() * total;
                          if (u < m.lambda_v) {
                            if (j == 0) service_left = m.service_v.sample(rng);
                            j += m.batch_v.sample(rng);
                          } else if (u < m.lambda_v + m.xi) {
                            j = 0;
                            service_left = kInf;
                          } else {
                            y = j;
                            service_left = kInf;
                            if (on_exit()) break;
                          }
                        }
                      },
                  },
                  dc.inner);
              j = y;
            },
        },
        v_);
    duration = elapsed;
    return j;
  }

 private:
  ChainRates rates(double a, std::size_t j) {
    while (chain_.size() <= j) chain_.push_back(chain_bdp_rates(a, chain_.size()));
    return chain_[j];
  }

  const VacationModelSpec& v_;
  bool clearing_;
  std::vector<ChainRates> chain_;
};

struct RepStats {
  std::uint64_t cycles = 0;
  std::uint64_t events = 0;
  std::vector<double> occ0, occ1;
  double sum_vac = 0.0, sum_work = 0.0;
  double sum_y = 0.0;
  std::vector<std::uint64_t> y_counts, seen_counts;
  std::vector<double> t_sum;
  std::vector<double> n_sum;
  std::uint64_t crossing_mismatches = 0;
  double max_time_err = 0.0, max_subbusy_err = 0.0;
  std::vector<CycleRecord> records;
};

RepStats run_replication(const SimConfig& cfg, std::uint64_t stream) {
  Rng rng = Rng::for_stream(cfg.seed, stream);
  VacationRunner vacation(cfg.vacation, false);
  const WorkingModeSpec& w = cfg.working;
  RepStats st;
  CycleRecord rec;
  for (std::uint64_t c = 0; c < cfg.n_cycles; ++c) {
    double vac_time = 0.0;
    const std::size_t y = vacation.run(rng, st.occ0, vac_time, cfg.max_events);

    rec.time_in_state.assign(y + 1, 0.0);
    rec.downcrossings.assign(y + 1, 0);
    rec.upcrossings.assign(y + 1, 0);
    rec.subbusy.clear();
    // The transfer is an upward jump from 0 to y.
    for (std::size_t k = 0; k < y; ++k) ++rec.upcrossings[k];

    std::size_t j = y;
    double now = 0.0, last_tau = 0.0;
    std::ptrdiff_t target = static_cast<std::ptrdiff_t>(y) - 1;
    double service_left = w.service.sample(rng);
    double arrival_in = rng.exponential(w.lambda);
    std::uint64_t events = 0;
    while (j >= 1) {
      if (++events > cfg.max_events) too_long("working period", cfg.max_events);
      if (arrival_in < service_left) {
        const double dt = arrival_in;
        rec.time_in_state[j] += dt;
        bump(st.occ1, j, dt);
        now += dt;
        service_left -= dt;
        const std::size_t b = w.batch.sample(rng);
        bump<std::uint64_t>(st.seen_counts, j, 1);
        if (j + b >= rec.time_in_state.size()) {
          rec.time_in_state.resize(j + b + 1, 0.0);
          rec.downcrossings.resize(j + b + 1, 0);
          rec.upcrossings.resize(j + b + 1, 0);
        }
        for (std::size_t k = j; k < j + b; ++k) ++rec.upcrossings[k];
        j += b;
        arrival_in = rng.exponential(w.lambda);
      } else {
        const double dt = service_left;
        rec.time_in_state[j] += dt;
        bump(st.occ1, j, dt);
        now += dt;
        arrival_in -= dt;
        --j;
        ++rec.downcrossings[j];
        if (static_cast<std::ptrdiff_t>(j) == target) {
          rec.subbusy.push_back(now - last_tau);
          last_tau = now;
          --target;
        }
        if (j >= 1) service_left = w.service.sample(rng);
      }
    }
    st.events += events;

    rec.vacation_duration = vac_time;
    rec.working_duration = now;
    rec.y = y;
    double t_total = 0.0, c_total = 0.0;
    for (double v : rec.time_in_state) t_total += v;
    for (double v : rec.subbusy) c_total += v;
    st.max_time_err = std::max(st.max_time_err, std::abs(t_total - now) / now);
    st.max_subbusy_err = std::max(st.max_subbusy_err, std::abs(c_total - now) / now);
    if (rec.subbusy.size() != y || rec.upcrossings != rec.downcrossings) ++st.crossing_mismatches;

    ++st.cycles;
    st.sum_vac += vac_time;
    st.sum_work += now;
    st.sum_y += static_cast<double>(y);
    bump<std::uint64_t>(st.y_counts, y, 1);
    if (st.t_sum.size() < rec.time_in_state.size()) {
      st.t_sum.resize(rec.time_in_state.size(), 0.0);
      st.n_sum.resize(rec.time_in_state.size(), 0.0);
    }
    for (std::size_t k = 0; k < rec.time_in_state.size(); ++k) {
      st.t_sum[k] += rec.time_in_state[k];
      st.n_sum[k] += static_cast<double>(rec.downcrossings[k]);
    }
    if (st.records.size() < cfg.keep_records) st.records.push_back(rec);
  }
  return st;
}

struct Moments {
  double mean = 0.0, se = 0.0;
};

Moments moments(const std::vector<double>& xs) {
  Moments m;
  const double n = static_cast<double>(xs.size());
  if (xs.empty()) return m;
  for (double x : xs) m.mean += x;
  m.mean /= n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.se = std::sqrt(ss / (n - 1.0) / n);
  }
  return m;
}

// Per-level mean and standard error across replications of vectors that may
// have different lengths (missing entries are zero).
void vector_moments(const std::vector<std::vector<double>>& rows, std::vector<double>& mean,
                    std::vector<double>& se) {
  std::size_t len = 0;
  for (const auto& r : rows) len = std::max(len, r.size());
  mean.assign(len, 0.0);
  se.assign(len, 0.0);
  std::vector<double> col(rows.size());
  for (std::size_t k = 0; k < len; ++k) {
    for (std::size_t r = 0; r < rows.size(); ++r) col[r] = k < rows[r].size() ? rows[r][k] : 0.0;
    const Moments m = moments(col);
    mean[k] = m.mean;
    se[k] = m.se;
  }
}

template <class T>
void add_counts(std::vector<T>& into, const std::vector<T>& from) {
  if (into.size() < from.size()) into.resize(from.size(), T{});
  for (std::size_t i = 0; i < from.size(); ++i) into[i] += from[i];
}

}  // namespace

void SimConfig::validate() const {
  working.validate();
  mxvac::validate(vacation);
  if (std::holds_alternative<HypergeometricRatio>(vacation)) {
    throw InvalidInput("hypergeometric ratio: the model has no vacation dynamics to simulate");
  }
  if (n_cycles < 1) throw InvalidInput("simulation: n_cycles must be >= 1");
  if (replications < 1) throw InvalidInput("simulation: replications must be >= 1");
  if (max_events < 1) throw InvalidInput("simulation: max_events must be >= 1");
}

double IdentityCheck::max_abs_z() const {
  double z = 0.0;
  for (std::size_t j = 1; j < diff_mean.size(); ++j) {
    if (diff_se[j] > 0.0) {
      z = std::max(z, std::abs(diff_mean[j]) / diff_se[j]);
    } else if (diff_mean[j] != 0.0) {
      return kInf;
    }
  }
  return z;
}

SimulationResult simulate(const SimConfig& cfg) {
  cfg.validate();
  std::vector<RepStats> reps(cfg.replications);
  if (cfg.parallel && cfg.replications > 1) {
    std::vector<std::future<RepStats>> futs;
    futs.reserve(cfg.replications);
    for (unsigned r = 0; r < cfg.replications; ++r) {
      futs.push_back(std::async(std::launch::async, run_replication, std::cref(cfg), r));
    }
    for (unsigned r = 0; r < cfg.replications; ++r) reps[r] = futs[r].get();
  } else {
    for (unsigned r = 0; r < cfg.replications; ++r) reps[r] = run_replication(cfg, r);
  }

  SimulationResult out;
  EmpiricalReport& rep = out.report;
  CycleLog& log = out.log;
  rep.replications = cfg.replications;
  rep.cycles_per_replication = cfg.n_cycles;

  const std::size_t n = cfg.replications;
  std::vector<std::vector<double>> p0(n), p1(n), law0(n), law1(n), tj(n), nk(n);
  std::vector<double> dot0(n), dot1(n), mv(n), mw(n), mc(n), my(n);
  const std::size_t levels = cfg.wald_levels;
  const std::vector<double> a = a_coefficients(cfg.working, levels + 1);
  std::vector<std::vector<double>> wald(n), down(n);

  for (std::size_t r = 0; r < n; ++r) {
    const RepStats& s = reps[r];
    const double total = s.sum_vac + s.sum_work;
    const double cycles = static_cast<double>(s.cycles);
    p0[r] = s.occ0;
    p1[r] = s.occ1;
    for (double& v : p0[r]) v /= total;
    for (double& v : p1[r]) v /= total;
    if (p1[r].empty()) p1[r].push_back(0.0);
    dot0[r] = s.sum_vac / total;
    dot1[r] = s.sum_work / total;
    law0[r] = s.occ0;
    law1[r] = s.occ1;
    for (double& v : law0[r]) v /= s.sum_vac;
    for (double& v : law1[r]) v /= s.sum_work;
    mv[r] = s.sum_vac / cycles;
    mw[r] = s.sum_work / cycles;
    mc[r] = total / cycles;
    my[r] = s.sum_y / cycles;
    tj[r] = s.t_sum;
    nk[r] = s.n_sum;
    for (double& v : tj[r]) v /= cycles;
    for (double& v : nk[r]) v /= cycles;

    // Identities evaluated on this replication's estimates.
    std::vector<double> psi(s.y_counts.size(), 0.0);
    for (std::size_t k = 0; k < psi.size(); ++k) psi[k] = static_cast<double>(s.y_counts[k]) / cycles;
    const LevelExpectations le = level_expectations(cfg.working, psi, a, levels);
    auto at = [](const std::vector<double>& v, std::size_t k) { return k < v.size() ? v[k] : 0.0; };
    wald[r].assign(levels + 1, 0.0);
    down[r].assign(levels + 1, 0.0);
    double ytail = 1.0 - at(psi, 0);
    for (std::size_t k = 1; k <= levels; ++k) {
      wald[r][k] = at(tj[r], k) - le.expected_time[k];
      ytail -= at(psi, k);
      double rhs = ytail;
      for (std::size_t i = 1; i <= k; ++i) rhs += cfg.working.lambda * at(tj[r], i) * cfg.working.batch.tail(k - i);
      down[r][k] = at(nk[r], k) - rhs;
    }

    rep.events += s.events;
    add_counts(rep.y_counts, s.y_counts);
    add_counts(rep.seen_counts, s.seen_counts);
    log.cycles += s.cycles;
    log.crossing_mismatches += s.crossing_mismatches;
    log.max_time_sum_error = std::max(log.max_time_sum_error, s.max_time_err);
    log.max_subbusy_sum_error = std::max(log.max_subbusy_sum_error, s.max_subbusy_err);
    log.records.insert(log.records.end(), s.records.begin(), s.records.end());
  }

  vector_moments(p0, rep.p0, rep.p0_se);
  vector_moments(p1, rep.p1, rep.p1_se);
  vector_moments(law0, rep.vacation_law, rep.vacation_law_se);
  vector_moments(law1, rep.working_law, rep.working_law_se);
  vector_moments(tj, rep.level_time, rep.level_time_se);
  vector_moments(nk, rep.level_down, rep.level_down_se);
  vector_moments(wald, rep.wald.diff_mean, rep.wald.diff_se);
  vector_moments(down, rep.downcross.diff_mean, rep.downcross.diff_se);
  const Moments d0 = moments(dot0), d1 = moments(dot1);
  rep.p0_dot = d0.mean;
  rep.p0_dot_se = d0.se;
  rep.p1_dot = d1.mean;
  rep.p1_dot_se = d1.se;
  const Moments v = moments(mv), w = moments(mw), c = moments(mc), y = moments(my);
  rep.mean_vacation = v.mean;
  rep.mean_vacation_se = v.se;
  rep.mean_working = w.mean;
  rep.mean_working_se = w.se;
  rep.mean_cycle = c.mean;
  rep.mean_cycle_se = c.se;
  rep.mean_y = y.mean;
  rep.mean_y_se = y.se;
  return out;
}

Pmf empirical_conditional_law(const EmpiricalReport& report, Mode mode) {
  const std::vector<double>& law = mode == Mode::vacation ? report.vacation_law : report.working_law;
  const double mass = mode == Mode::vacation ? report.p0_dot : report.p1_dot;
  if (!(mass > 0.0) || law.empty()) {
    throw InvalidInput("empirical_conditional_law: no time was spent in the requested mode");
  }
  return Pmf::from_weights(law);
}

LevelCrossingAudit level_crossing_audit(const CycleLog& log) {
  LevelCrossingAudit audit;
  audit.cycles_checked = log.cycles;
  audit.mismatches = log.crossing_mismatches;
  audit.max_time_sum_error = log.max_time_sum_error;
  audit.max_subbusy_sum_error = log.max_subbusy_sum_error;
  std::uint64_t stored_mismatch = 0;
  for (const CycleRecord& r : log.records) {
    double t_total = 0.0, c_total = 0.0;
    for (double v : r.time_in_state) t_total += v;
    for (double v : r.subbusy) c_total += v;
    const double d = r.working_duration;
    audit.max_time_sum_error = std::max(audit.max_time_sum_error, std::abs(t_total - d) / d);
    audit.max_subbusy_sum_error = std::max(audit.max_subbusy_sum_error, std::abs(c_total - d) / d);
    if (r.upcrossings != r.downcrossings || r.subbusy.size() != r.y) ++stored_mismatch;
  }
  // Stored records were already counted inline; a disagreement means the log
  // was altered after the run.
  if (stored_mismatch > audit.mismatches) audit.mismatches = stored_mismatch;
  return audit;
}

VacationSample simulate_vacations(const VacationModelSpec& vac, std::uint64_t n_vacations,
                                  std::uint64_t seed) {
  validate(vac);
  if (n_vacations < 1) throw InvalidInput("simulate_vacations: n_vacations must be >= 1");
  VacationRunner runner(vac, false);
  Rng rng = Rng::for_stream(seed, 0);
  VacationSample out;
  std::vector<double> occ;
  double total = 0.0;
  for (std::uint64_t i = 0; i < n_vacations; ++i) {
    double d = 0.0;
    const std::size_t y = runner.run(rng, occ, d, 10'000'000);
    bump<std::uint64_t>(out.y_counts, y, 1);
    total += d;
  }
  out.vacations = n_vacations;
  out.mean_duration = total / static_cast<double>(n_vacations);
  std::vector<double> w(out.y_counts.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    w[k] = static_cast<double>(out.y_counts[k]) / static_cast<double>(n_vacations);
  }
  out.transfer = Pmf::from_weights(std::move(w));
  for (double& v : occ) v /= total;
  out.occupancy = std::move(occ);
  return out;
}

Pmf simulate_standalone(const DisasterCoupled& d, std::uint64_t n_clearings, std::uint64_t seed) {
  const VacationModelSpec spec = d;
  validate(spec);
  if (n_clearings < 1) throw InvalidInput("simulate_standalone: n_clearings must be >= 1");
  VacationRunner runner(spec, true);
  Rng rng = Rng::for_stream(seed, 0);
  std::vector<double> occ;
  double total = 0.0;
  runner.run(rng, occ, total, std::numeric_limits<std::uint64_t>::max(), n_clearings);
  for (double& v : occ) v /= total;
  return Pmf::from_weights(std::move(occ));
}

}  // namespace mxvac
