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

#include "mxvac/ctmc.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <boost/math/distributions/binomial.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "mxvac/errors.hpp"

namespace mxvac {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr StateIndex vac(std::size_t j) { return {0, j}; }
constexpr StateIndex work(std::size_t j) { return {1, j}; }

const Pmf& finite_batch(const BatchLaw& b, const char* what) {
  if (b.is_geometric() || b.pmf() == nullptr) {
    throw InvalidInput(std::string(what) + ": the CTMC oracle needs a finite batch support");
  }
  return *b.pmf();
}

double exponential_rate(const ServiceLaw& s, const char* what) {
  const auto* e = std::get_if<ServiceLaw::Exponential>(&s.kind());
  if (e == nullptr) {
    throw InvalidInput(std::string(what) + ": the CTMC oracle needs exponential durations, got " +
                       s.name());
  }
  return e->rate;
}

void add_batches(GeneratorMatrix& g, StateIndex from, double rate, const Pmf& batch) {
  for (std::size_t i = 1; i <= batch.max_support(); ++i) {
    const double b = batch.at(i);
    if (b > 0.0) g.add(from, {from.mode, from.count + i}, rate * b);
  }
}

void add_vacation_mode(GeneratorMatrix& g, const VacationModelSpec& v) {
  const std::size_t n = g.truncation();
  std::visit(
      overloaded{
          [&](const MultipleVacations& m) {
            const Pmf& bv = finite_batch(m.batch_v, "multiple vacations");
            const double gamma = exponential_rate(m.vacation, "multiple vacations");
            for (std::size_t j = 0; j <= n; ++j) {
              add_batches(g, vac(j), m.lambda_v, bv);
              if (j >= 1) g.add(vac(j), work(j), gamma);
            }
          },
          [&](const MarkovianBalking& m) {
            const Pmf& bv = finite_batch(m.batch, "markovian vacation");
            for (std::size_t j = 0; j <= n; ++j) {
              // A batch is admitted or refused as a whole.
              add_batches(g, vac(j), m.lambda_v * m.admit(j), bv);
              if (j >= 1) {
                g.add(vac(j), vac(0), m.disaster(j));
                g.add(vac(j), work(j), m.exit(j));
              }
            }
          },
          [&](const HypergeometricRatio&) -> void {
            throw InvalidInput("hypergeometric ratio: no vacation dynamics to build a generator from");
          },
          [&](const BinomialReneging& m) {
            for (std::size_t j = 0; j <= n; ++j) {
              g.add(vac(j), vac(j + 1), m.lambda_v);
              if (j == 0) continue;
              g.add(vac(j), work(j), m.gamma);
              const boost::math::binomial_distribution<double> thin(static_cast<double>(j), m.p);
              for (std::size_t k = 1; k <= j; ++k) {
                g.add(vac(j), vac(j - k), m.xi * boost::math::pdf(thin, static_cast<double>(k)));
              }
            }
          },
          [&](const DisasterCoupled& d) {
            std::visit(
                overloaded{
                    [&](const MM1Inner& m) {
                      for (std::size_t j = 0; j <= n; ++j) {
                        g.add(vac(j), vac(j + 1), m.lambda_v);
                        if (j == 0) continue;
                        g.add(vac(j), vac(j - 1), m.mu_v);
                        g.add(vac(j), work(j), m.gamma);
                      }
                    },
                    [&](const ChainBDPInner& c) {
                      for (std::size_t j = 0; j <= n; ++j) {
                        const ChainRates r = chain_bdp_rates(c.a, j);
                        g.add(vac(j), vac(j + 1), r.birth);
                        if (j == 0) continue;
                        g.add(vac(j), vac(j - 1), r.death);
                        g.add(vac(j), work(j), c.gamma);
                      }
                    },
                    [&](const MXG1DisasterInner& m) {
                      const Pmf& bv = finite_batch(m.batch_v, "mxg1 vacation");
                      const double mu = exponential_rate(m.service_v, "mxg1 vacation");
                      for (std::size_t j = 0; j <= n; ++j) {
                        add_batches(g, vac(j), m.lambda_v, bv);
                        if (j == 0) continue;
                        g.add(vac(j), vac(j - 1), mu);
                        g.add(vac(j), vac(0), m.xi);
                        g.add(vac(j), work(j), m.gamma);
                      }
                    },
                },
                d.inner);
          },
      },
      v);
}

}  // namespace

GeneratorMatrix::GeneratorMatrix(std::size_t truncation)
    : n_(truncation), dropped_(2 * truncation + 1, 0.0) {
  if (truncation == 0) throw InvalidInput("generator: truncation must be >= 1");
}

std::size_t GeneratorMatrix::index(StateIndex s) const {
  if (s.mode == 0 && s.count <= n_) return s.count;
  if (s.mode == 1 && s.count >= 1 && s.count <= n_) return n_ + s.count;
  std::ostringstream os;
  os << "generator: state (" << s.mode << "," << s.count << ") is outside the truncation";
  throw InvalidInput(os.str());
}

StateIndex GeneratorMatrix::state(std::size_t i) const {
  if (i <= n_) return {0, i};
  if (i < dimension()) return {1, i - n_};
  throw InvalidInput("generator: index out of range");
}

void GeneratorMatrix::add(StateIndex from, StateIndex to, double rate) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) throw InvalidInput("generator: invalid rate");
  if (rate == 0.0 || from == to) return;
  const std::size_t f = index(from);
  if (to.count > n_) {
    dropped_[f] += rate;
    return;
  }
  t_.push_back({f, index(to), rate});
}

std::vector<double> GeneratorMatrix::diagonal() const {
  std::vector<double> d(dimension(), 0.0);
  for (const Transition& t : t_) d[t.from] -= t.rate;
  return d;
}

double GeneratorMatrix::max_row_sum() const {
  std::vector<double> s = diagonal();
  for (const Transition& t : t_) s[t.from] += t.rate;
  double m = 0.0;
  for (double v : s) m = std::max(m, std::abs(v));
  return m;
}

double GeneratorMatrix::min_off_diagonal() const {
  double m = std::numeric_limits<double>::infinity();
  for (const Transition& t : t_) m = std::min(m, t.rate);
  return m;
}

GeneratorMatrix build_generator(const WorkingModeSpec& spec, const VacationModelSpec& vac_spec,
                                std::size_t truncation) {
  spec.validate();
  validate(vac_spec);
  const double mu = exponential_rate(spec.service, "working mode");
  const Pmf& batch = finite_batch(spec.batch, "working mode");
  GeneratorMatrix g(truncation);
  for (std::size_t j = 1; j <= truncation; ++j) {
    add_batches(g, work(j), spec.lambda, batch);
    g.add(work(j), j == 1 ? vac(0) : work(j - 1), mu);
  }
  add_vacation_mode(g, vac_spec);
  return g;
}

StationaryVector steady_state(const GeneratorMatrix& g) {
  const auto dim = static_cast<Eigen::Index>(g.dimension());
  const std::vector<double> diag = g.diagonal();
  // A = Q^T with row 0 (balance of state (0,0)) replaced by normalization.
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(g.transitions().size() + 2 * g.dimension());
  for (const Transition& t : g.transitions()) {
    if (t.to != 0) trip.emplace_back(t.to, t.from, t.rate);
  }
  for (Eigen::Index i = 1; i < dim; ++i) trip.emplace_back(i, i, diag[i]);
  for (Eigen::Index i = 0; i < dim; ++i) trip.emplace_back(0, i, 1.0);
  Eigen::SparseMatrix<double> a(dim, dim);
  a.setFromTriplets(trip.begin(), trip.end());
  a.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success) {
    throw DiagnosticFailure("steady_state: generator is singular beyond normalization (" +
                            lu.lastErrorMessage() + ")");
  }
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
  b(0) = 1.0;
  Eigen::VectorXd x = lu.solve(b);
  if (lu.info() != Eigen::Success || !x.allFinite()) {
    throw DiagnosticFailure("steady_state: sparse solve failed");
  }

  StationaryVector out;
  out.pi.assign(x.data(), x.data() + dim);
  std::vector<double> r(g.dimension(), 0.0);
  for (const Transition& t : g.transitions()) r[t.to] += out.pi[t.from] * t.rate;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += out.pi[i] * diag[i];
  for (double v : r) out.residual = std::max(out.residual, std::abs(v));
  if (out.residual > 1e-10) {
    std::ostringstream os;
    os << "steady_state: residual " << out.residual << " exceeds 1e-10";
    throw DiagnosticFailure(os.str());
  }
  for (double v : out.pi) {
    if (v < -1e-12) throw DiagnosticFailure("steady_state: negative probability");
  }
  return out;
}

SteadyStateReport oracle_report(const WorkingModeSpec& spec, const VacationModelSpec& vac_spec,
                                std::size_t truncation) {
  const GeneratorMatrix g = build_generator(spec, vac_spec, truncation);
  const StationaryVector sv = steady_state(g);
  const std::size_t n = truncation;

  SteadyStateReport rep;
  rep.truncation = n;
  rep.residual = sv.residual;
  rep.p0.assign(n + 1, 0.0);
  rep.p1.assign(n + 1, 0.0);
  for (std::size_t j = 0; j <= n; ++j) rep.p0[j] = std::max(0.0, sv.pi[j]);
  for (std::size_t j = 1; j <= n; ++j) rep.p1[j] = std::max(0.0, sv.pi[n + j]);
  for (double v : rep.p0) rep.p0_dot += v;
  for (double v : rep.p1) rep.p1_dot += v;

  auto conditional = [](const std::vector<double>& p, double mass) {
    std::vector<double> w(p.size(), 0.0);
    if (mass > 0.0) {
      for (std::size_t j = 0; j < p.size(); ++j) w[j] = p[j] / mass;
    }
    return Pmf::from_weights(std::move(w));
  };
  rep.vacation_law = conditional(rep.p0, rep.p0_dot);
  rep.working_law = conditional(rep.p1, rep.p1_dot);

  std::vector<double> flux(n + 1, 0.0);
  double total = 0.0;
  for (const Transition& t : g.transitions()) {
    const StateIndex from = g.state(t.from);
    const StateIndex to = g.state(t.to);
    if (from.mode == 0 && to.mode == 1) {
      flux[from.count] += sv.pi[t.from] * t.rate;
      total += sv.pi[t.from] * t.rate;
    }
  }
  rep.cycle_rate = total;
  if (total > 0.0) {
    for (std::size_t j = 0; j <= n; ++j) {
      flux[j] /= total;
      rep.e_y += static_cast<double>(j) * flux[j];
    }
    rep.e_b0 = rep.p0_dot / total;
    rep.e_b1 = rep.p1_dot / total;
  }
  rep.transfer_law = Pmf::from_weights(std::move(flux));
  rep.boundary_mass = rep.p0[n] + rep.p1[n];
  rep.boundary_flag = rep.boundary_mass > 1e-9;
  return rep;
}

}  // namespace mxvac
