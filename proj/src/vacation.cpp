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

#include "mxvac/vacation.hpp"

#include <algorithm>
#include <array>
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

double horner(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidInput(std::string(what) + " must be positive and finite");
  }
}

}  // namespace

// ---- RateSequence ----------------------------------------------------------

RateSequence RateSequence::constant(double c) { return RateSequence({c}, {1.0}); }

RateSequence RateSequence::rational(std::vector<double> numerator,
                                    std::vector<double> denominator) {
  if (numerator.empty() || denominator.empty()) {
    throw InvalidInput("rate sequence: empty polynomial");
  }
  return RateSequence(std::move(numerator), std::move(denominator));
}

double RateSequence::operator()(std::size_t j) const {
  const double x = static_cast<double>(j);
  const double d = horner(den_, x);
  if (d == 0.0) {
    std::ostringstream os;
    os << "rate sequence: denominator vanishes at j = " << j;
    throw InvalidInput(os.str());
  }
  return horner(num_, x) / d;
}

// ---- multiple vacations ----------------------------------------------------

TransferLaw multiple_vacation_psi(const MultipleVacations& m) {
  require_positive(m.lambda_v, "multiple vacations: lambda_v");
  const double f0 = m.vacation.lst(m.lambda_v).real();
  if (!(1.0 - f0 > 0.0)) {
    throw InvalidInput("multiple vacations: no arrival can occur during a vacation");
  }
  const double mean = m.lambda_v * m.batch_v.mean() * m.vacation.mean() / (1.0 - f0);
  PgfHandle psi(
      [m, f0](cplx z) {
        const cplx s = m.lambda_v * (1.0 - m.batch_v.pgf()(z));
        return (m.vacation.lst(s) - f0) / (1.0 - f0);
      },
      mean);
  return TransferLaw(psi, mean);
}

double multiple_vacation_e_b0(const MultipleVacations& m) {
  const double f0 = m.vacation.lst(m.lambda_v).real();
  if (!(1.0 - f0 > 0.0)) {
    throw InvalidInput("multiple vacations: no arrival can occur during a vacation");
  }
  return m.vacation.mean() / (1.0 - f0);
}

// ---- Markovian balking -----------------------------------------------------

namespace {

void require_unit_batches(const MarkovianBalking& m) {
  if (m.batch.is_geometric() || m.batch.max_size() != 1u) {
    throw InvalidInput(
        "markovian vacation: the product form requires unit batches (g_1 = 1); use the "
        "CTMC oracle or the simulator for larger batches");
  }
}

double exit_rate(const MarkovianBalking& m, std::size_t j) { return j == 0 ? 0.0 : m.exit(j); }
double disaster_rate(const MarkovianBalking& m, std::size_t j) {
  return j == 0 ? 0.0 : m.disaster(j);
}

double leave_rate(const MarkovianBalking& m, std::size_t j) {
  const double r = m.lambda_v * m.admit(j) + exit_rate(m, j) + disaster_rate(m, j);
  if (!(r > 0.0)) {
    std::ostringstream os;
    os << "markovian vacation: zero outflow rate in state " << j;
    throw InvalidInput(os.str());
  }
  return r;
}

}  // namespace

VacationSteadyState markovian_steady_state(const MarkovianBalking& m, std::size_t k_max,
                                           std::size_t k_min) {
  require_unit_batches(m);
  require_positive(m.lambda_v, "markovian vacation: lambda_v");
  VacationSteadyState ss;
  ss.p0.push_back(1.0);
  double sum = 1.0, exit_mass = 0.0, term = 1.0, ratio = 0.0;
  std::size_t k = 1;
  for (; k <= k_max; ++k) {
    ratio = m.lambda_v * m.admit(k - 1) / leave_rate(m, k);
    term *= ratio;
    ss.p0.push_back(term);
    sum += term;
    exit_mass += exit_rate(m, k) * term;
    if (term == 0.0) break;
    if (k < k_min) continue;
    if (ratio < 1.0 && term < 1e-16 * sum && exit_rate(m, k) * term <= 1e-16 * exit_mass) break;
  }
  if (k > k_max) {
    throw DiagnosticFailure("markovian vacation: occupancy series did not converge by k_max");
  }
  ss.p00 = 1.0;
  ss.exit_mass = exit_mass;
  ss.normalizer = sum;
  ss.tail_bound = ratio < 1.0 ? term * ratio / (1.0 - ratio) : 0.0;
  return ss;
}

TransferLaw markovian_psi(const VacationSteadyState& ss, const RateSequence& exit) {
  std::vector<double> w(ss.p0.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 1; i < ss.p0.size(); ++i) {
    w[i] = exit(i) * ss.p0[i];
    total += w[i];
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw InvalidInput("markovian vacation: zero exit mass");
  }
  for (double& v : w) v /= total;
  while (w.size() > 2 && w.back() == 0.0) w.pop_back();
  Pmf pmf;
  pmf.weights = std::move(w);
  return TransferLaw::from_pmf(std::move(pmf));
}

double expected_vacation_duration(const MarkovianBalking& m, std::size_t k_max) {
  require_unit_batches(m);
  require_positive(m.lambda_v, "markovian vacation: lambda_v");
  const double a0 = m.lambda_v * m.admit(0);
  if (!(a0 > 0.0)) throw InvalidInput("markovian vacation: state 0 must admit arrivals");
  double numerator = 1.0 / a0;
  double disaster_prob = 0.0;
  double reach = 1.0;  // probability of reaching state i from state 1
  std::size_t i = 1;
  for (; i <= k_max; ++i) {
    const double r = leave_rate(m, i);
    numerator += reach / r;
    disaster_prob += reach * disaster_rate(m, i) / r;
    reach *= m.lambda_v * m.admit(i) / r;
    if (reach == 0.0 || (reach < 1e-17 && reach / r < 1e-17 * numerator)) break;
  }
  if (i > k_max) {
    throw DiagnosticFailure("markovian vacation: E[B0] series did not converge by k_max");
  }
  const double denom = 1.0 - disaster_prob;
  if (!(denom > 0.0)) {
    throw DiagnosticFailure("markovian vacation: vacation never ends (disaster probability 1)");
  }
  return numerator / denom;
}

VacationSteadyState calibrate_p00(const VacationSteadyState& ss, double e_b0, double e_b1) {
  if (!(e_b0 > 0.0) || !(e_b1 > 0.0)) {
    throw InvalidInput("calibrate_p00: cycle expectations must be positive");
  }
  if (!(ss.p0.size() >= 1) || !(ss.p0[0] > 0.0)) {
    throw InvalidInput("calibrate_p00: empty occupancy vector");
  }
  double sum = 0.0;
  for (double v : ss.p0) sum += v;
  const double normalizer = sum / ss.p0[0];
  if (!std::isfinite(normalizer)) throw DiagnosticFailure("calibrate_p00: divergent normalizer");
  const double p0_dot = e_b0 / (e_b0 + e_b1);
  VacationSteadyState out = ss;
  out.p00 = p0_dot / normalizer;
  const double scale = out.p00 / ss.p0[0];
  for (double& v : out.p0) v *= scale;
  out.exit_mass *= scale;
  out.tail_bound *= scale;
  out.normalizer = normalizer;
  out.e_b0 = e_b0;
  return out;
}

// ---- hypergeometric --------------------------------------------------------

TransferLaw hypergeometric_psi(const HypergeometricRatio& h) {
  auto ratio = [&](std::size_t j) {
    const double x = static_cast<double>(j);
    cplx r(h.argument, 0.0);
    for (const cplx& a : h.numerator_roots) r *= x + a;
    for (const cplx& b : h.denominator_roots) {
      const cplx d = x + b;
      if (d == cplx(0.0, 0.0)) throw InvalidInput("hypergeometric: denominator vanishes");
      r /= d;
    }
    if (std::abs(r.imag()) > 1e-12 * std::max(1.0, std::abs(r.real()))) {
      std::ostringstream os;
      os << "hypergeometric: ratio is not real at j = " << j << " (" << r << ")";
      throw InvalidInput(os.str());
    }
    return r.real();
  };
  std::vector<double> w{0.0, 1.0};
  double sum = 1.0, term = 1.0;
  constexpr std::size_t kCap = 1'000'000;
  std::size_t j = 1;
  for (; j < kCap; ++j) {
    const double r = ratio(j);
    if (r < 0.0) throw InvalidInput("hypergeometric: negative ratio");
    term *= r;
    if (term == 0.0) break;
    if (!std::isfinite(term) || term > 1e300) {
      throw InvalidInput("hypergeometric: series is not summable");
    }
    w.push_back(term);
    sum += term;
    if (r < 1.0 && term < 1e-16 * sum) break;
  }
  if (j >= kCap) throw InvalidInput("hypergeometric: series is not summable within the cap");
  for (double& v : w) v /= sum;
  Pmf pmf;
  pmf.weights = std::move(w);
  return TransferLaw::from_pmf(std::move(pmf));
}

cplx hypergeometric_pfq(std::span<const cplx> a, std::span<const cplx> b, cplx z) {
  if (std::abs(z) > 1.0 + 1e-15) throw InvalidInput("hypergeometric_pfq: |z| must be <= 1");
  cplx sum(1.0, 0.0), term(1.0, 0.0);
  for (std::size_t i = 0; i < 1'000'000; ++i) {
    const double x = static_cast<double>(i);
    cplx r = z / (x + 1.0);
    for (const cplx& ak : a) r *= ak + x;
    for (const cplx& bk : b) {
      const cplx d = bk + x;
      if (d == cplx(0.0, 0.0)) throw InvalidInput("hypergeometric_pfq: pole in lower parameter");
      r /= d;
    }
    term *= r;
    sum += term;
    if (std::abs(r) < 1.0 && std::abs(term) < 1e-17 * std::abs(sum)) return sum;
    if (term == cplx(0.0, 0.0)) return sum;
  }
  throw DiagnosticFailure("hypergeometric_pfq: series did not converge");
}

// ---- binomial reneging -----------------------------------------------------

namespace {

void validate_reneging(const BinomialReneging& m) {
  require_positive(m.lambda_v, "binomial reneging: lambda_v");
  require_positive(m.xi, "binomial reneging: xi");
  require_positive(m.gamma, "binomial reneging: gamma");
  if (!(m.p >= 0.0 && m.p <= 1.0)) throw InvalidInput("binomial reneging: p must lie in [0, 1]");
}

}  // namespace

cplx binomial_reneging_g0(const BinomialReneging& m, cplx z, double tol) {
  validate_reneging(m);
  const double q = 1.0 - m.p;
  cplx sum(0.0), term(1.0);
  double qk = 1.0;  // q^k with 0^0 = 1
  for (std::size_t k = 0; k < 10'000'000; ++k) {
    term *= m.xi / (m.gamma + m.xi + m.lambda_v * qk * (1.0 - z));
    sum += term;
    if (std::abs(term) <= tol * std::abs(sum)) return sum;
    qk *= q;
  }
  throw DiagnosticFailure("binomial_reneging_g0: series did not converge");
}

double binomial_reneging_g0_slope(const BinomialReneging& m, double tol) {
  validate_reneging(m);
  // d/dz of prod_{k<=j} f_k at z = 1 is r^{j+1} sum_{k<=j} lambda q^k / (gamma + xi).
  const double q = 1.0 - m.p;
  const double r = m.xi / (m.gamma + m.xi);
  double sum = 0.0, rp = 1.0, qsum = 0.0, qk = 1.0;
  for (std::size_t j = 0; j < 10'000'000; ++j) {
    rp *= r;
    qsum += qk;
    qk *= q;
    const double term = rp * m.lambda_v * qsum / (m.gamma + m.xi);
    sum += term;
    if (term <= tol * sum) return sum;
  }
  throw DiagnosticFailure("binomial_reneging_g0_slope: series did not converge");
}

TransferLaw psi_from_g0(std::function<cplx(cplx)> g0, double p00_value, double p0dot_value,
                        std::optional<double> mean) {
  const double span = p0dot_value - p00_value;
  if (!(span > 0.0) || !std::isfinite(span)) {
    throw InvalidInput("psi_from_g0: G0(1) must exceed G0(0)");
  }
  auto eval = [g0 = std::move(g0), p00_value, span](cplx z) { return (g0(z) - p00_value) / span; };
  if (!mean) mean = mean_by_extraction(PgfHandle(eval, std::nullopt));
  return TransferLaw(PgfHandle(eval, *mean), *mean);
}

TransferLaw binomial_reneging_psi(const BinomialReneging& m) {
  validate_reneging(m);
  const double g00 = binomial_reneging_g0(m, 0.0).real();
  const double g01 = binomial_reneging_g0(m, 1.0).real();
  const double mean = binomial_reneging_g0_slope(m) / (g01 - g00);
  return psi_from_g0([m](cplx z) { return binomial_reneging_g0(m, z); }, g00, g01, mean);
}

double binomial_reneging_e_b0(const BinomialReneging& m) {
  const double g00 = binomial_reneging_g0(m, 0.0).real();
  const double g01 = binomial_reneging_g0(m, 1.0).real();
  // Vacations end at rate gamma from nonempty states: cycles per unit vacation
  // time equal gamma (1 - P(empty | vacation)).
  return g01 / (m.gamma * (g01 - g00));
}

// ---- systems with clearing -------------------------------------------------

double mm1_disaster_rho(const MM1Inner& m) {
  require_positive(m.lambda_v, "mm1 vacation: lambda_v");
  require_positive(m.mu_v, "mm1 vacation: mu_v");
  require_positive(m.gamma, "mm1 vacation: gamma");
  const double s = m.gamma + m.lambda_v + m.mu_v;
  const double disc = s * s - 4.0 * m.lambda_v * m.mu_v;
  // Smaller root of mu x^2 - s x + lambda, written without cancellation.
  return 2.0 * m.lambda_v / (s + std::sqrt(disc));
}

namespace {

void validate_chain(double a) {
  if (!(a > 0.0) || a > 0.25) throw InvalidInput("chain BDP: a must lie in (0, 0.25]");
}

}  // namespace

ChainRates chain_bdp_rates(double a, std::size_t n) {
  validate_chain(a);
  if (n == 0) return {1.0, 0.0};
  const double alpha = 2.0 * std::sqrt(a);
  const double x = 1.0 / alpha;
  // ratio[k] = U_k(x) / U_{k-1}(x) from U_{k+1} = 2x U_k - U_{k-1}; the ratio
  // form avoids overflow of U_k for x > 1.
  double prev = 2.0 * x;  // U_1 / U_0
  double ratio_n = prev;
  for (std::size_t k = 1; k <= n; ++k) {
    ratio_n = prev;           // U_k / U_{k-1}
    prev = 2.0 * x - 1.0 / prev;  // U_{k+1} / U_k
  }
  // birth = alpha U_{n+1} / (2 U_n), death = alpha U_{n-1} / (2 U_n)
  return {alpha * prev / 2.0, alpha / (2.0 * ratio_n)};
}

Pmf chain_bdp_disaster_pmf(double a, double gamma, std::size_t n_max) {
  validate_chain(a);
  require_positive(gamma, "chain BDP: gamma");
  const double sa = std::sqrt(a);
  const double x = 1.0 / (2.0 * sa);
  const double g1 = gamma + 1.0;
  const double r = 2.0 * sa / (g1 + std::sqrt(g1 * g1 - 4.0 * a));
  const double c = gamma / sa;
  // v_n = U_n(x) r^{n+1}, v_{n+1} = 2 x r v_n - r^2 v_{n-1}
  std::vector<double> w;
  double vm1 = 0.0, v = r;  // v_{-1} = U_{-1} r^0 = 0
  double sum = 0.0;
  for (std::size_t n = 0; n <= n_max; ++n) {
    const double pi = c * v;
    w.push_back(pi);
    sum += pi;
    if (std::abs(1.0 - sum) < 1e-8 && pi < 1e-17) break;
    const double next = 2.0 * x * r * v - r * r * vm1;
    vm1 = v;
    v = next;
  }
  if (std::abs(1.0 - sum) > 1e-6) {
    std::ostringstream os;
    os << "chain BDP: probabilities sum to " << sum << " at the ceiling";
    throw DiagnosticFailure(os.str());
  }
  Pmf pmf;
  pmf.weights = std::move(w);
  pmf.truncation_mass = std::max(0.0, 1.0 - sum);
  return pmf;
}

namespace {

void validate_mxg1(const MXG1DisasterInner& m) {
  require_positive(m.lambda_v, "mxg1 vacation: lambda_v");
  require_positive(m.gamma, "mxg1 vacation: gamma");
  if (!(m.xi >= 0.0)) throw InvalidInput("mxg1 vacation: xi must be >= 0");
}

}  // namespace

double mxg1_disaster_root(const MXG1DisasterInner& m) {
  validate_mxg1(m);
  const double delta = m.xi + m.gamma;
  auto phi = [&](double z) {
    return m.service_v.lst(delta + m.lambda_v * (1.0 - m.batch_v.pgf()(z))).real();
  };
  // phi is increasing with phi(0) > 0 and phi(1) < 1, so phi(z) - z changes
  // sign exactly once on (0, 1); fixed-point steps from 0 increase
  // monotonically toward the root and bisection takes over if they stall.
  double lo = 0.0, hi = 1.0, z = 0.0;
  bool converged = false;
  for (int it = 0; it < 500; ++it) {
    const double next = phi(z);
    if (next - z > 0.0) lo = std::max(lo, z); else hi = std::min(hi, z);
    if (std::abs(next - z) <= 1e-16) {
      z = next;
      converged = true;
      break;
    }
    z = (next > lo && next < hi) ? next : 0.5 * (lo + hi);
  }
  if (!converged) {
    for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (phi(mid) - mid > 0.0) lo = mid; else hi = mid;
    }
    z = 0.5 * (lo + hi);
  }
  if (!(z > 0.0 && z < 1.0) || std::abs(z - phi(z)) > 1e-13) {
    throw DiagnosticFailure("mxg1 vacation: no root of the busy-period equation in (0, 1)");
  }
  return z;
}

double mxg1_disaster_empty_prob(const MXG1DisasterInner& m) {
  const double zs = mxg1_disaster_root(m);
  const double delta = m.xi + m.gamma;
  // Idle periods are Exp(lambda); a busy period is cut short by clearing at
  // rate delta, so its mean is (1 - E[exp(-delta BP)]) / delta = (1 - B(z*)) / delta.
  const double busy = (1.0 - m.batch_v.pgf()(zs)) / delta;
  const double idle = 1.0 / m.lambda_v;
  return idle / (idle + busy);
}

TransferLaw mxg1_disaster_psi(const MXG1DisasterInner& m) {
  const double zs = mxg1_disaster_root(m);
  const double delta = m.xi + m.gamma;
  const double bzs = m.batch_v.pgf()(zs);
  auto direct = [m, zs, delta, bzs](cplx z) {
    const cplx w = delta + m.lambda_v * (1.0 - m.batch_v.pgf()(z));
    const cplx f = m.service_v.lst(w);
    return delta / (1.0 - bzs) * z * (bzs - m.batch_v.pgf()(z)) / (f - z) *
           m.service_v.survival_transform(w);
  };
  auto eval = [direct, zs](cplx z) {
    // z* is a removable singularity; inside a small disk use cubic Lagrange
    // interpolation through nodes at z* +- h, z* +- 2h.
    constexpr double h = 1e-3;
    const cplx d = z - zs;
    if (std::abs(d) >= h) return direct(z);
    const std::array<double, 4> nodes{-2 * h, -h, h, 2 * h};
    cplx acc(0.0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      cplx li(1.0);
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        if (k != i) li *= (d - nodes[k]) / (nodes[i] - nodes[k]);
      }
      acc += li * direct(cplx(zs + nodes[i], 0.0));
    }
    return acc;
  };
  const double mean = mean_by_extraction(PgfHandle(eval, std::nullopt));
  return TransferLaw(PgfHandle(eval, mean), mean);
}

PgfHandle disaster_stationary_pgf(const DisasterCoupled& d) {
  return std::visit(
      overloaded{
          [](const MM1Inner& m) {
            const double rho = mm1_disaster_rho(m);
            return PgfHandle([rho](cplx z) { return (1.0 - rho) / (1.0 - rho * z); },
                             rho / (1.0 - rho), 2.0 * rho * rho / ((1.0 - rho) * (1.0 - rho)));
          },
          [](const ChainBDPInner& c) { return pgf_from_pmf(chain_bdp_disaster_pmf(c.a, c.gamma)); },
          [](const MXG1DisasterInner& m) {
            const double pi0 = mxg1_disaster_empty_prob(m);
            TransferLaw psi = mxg1_disaster_psi(m);
            return PgfHandle([pi0, psi](cplx z) { return pi0 + (1.0 - pi0) * psi.psi()(z); },
                             (1.0 - pi0) * psi.mean_y());
          },
      },
      d.inner);
}

TransferLaw disaster_coupled_psi(const DisasterCoupled& d) {
  return std::visit(
      overloaded{
          [](const MM1Inner& m) {
            const double rho = mm1_disaster_rho(m);
            const double mean = 1.0 / (1.0 - rho);
            return TransferLaw(
                PgfHandle([rho](cplx z) { return (1.0 - rho) * z / (1.0 - rho * z); }, mean,
                          2.0 * rho / ((1.0 - rho) * (1.0 - rho))),
                mean);
          },
          [](const ChainBDPInner& c) {
            Pmf pi = chain_bdp_disaster_pmf(c.a, c.gamma);
            const double pi0 = pi.weights[0];
            if (!(pi0 < 1.0)) throw InvalidInput("disaster coupling: pi_0 = 1");
            Pmf y;
            y.weights.assign(pi.weights.size(), 0.0);
            double total = 0.0;
            for (std::size_t n = 1; n < pi.weights.size(); ++n) total += pi.weights[n];
            for (std::size_t n = 1; n < pi.weights.size(); ++n) y.weights[n] = pi.weights[n] / total;
            return TransferLaw::from_pmf(std::move(y));
          },
          [](const MXG1DisasterInner& m) { return mxg1_disaster_psi(m); },
      },
      d.inner);
}

double disaster_coupled_e_b0(const DisasterCoupled& d) {
  // Exits happen at rate gamma from nonempty states of the standalone system.
  return std::visit(
      overloaded{
          [](const MM1Inner& m) { return 1.0 / (m.gamma * mm1_disaster_rho(m)); },
          [](const ChainBDPInner& c) {
            const double pi0 = chain_bdp_disaster_pmf(c.a, c.gamma).weights[0];
            return 1.0 / (c.gamma * (1.0 - pi0));
          },
          [](const MXG1DisasterInner& m) {
            return 1.0 / (m.gamma * (1.0 - mxg1_disaster_empty_prob(m)));
          },
      },
      d.inner);
}

// ---- dispatch ----------------------------------------------------------------

std::string model_name(const VacationModelSpec& v) {
  return std::visit(overloaded{
                        [](const MultipleVacations&) { return std::string("multiple_vacations"); },
                        [](const MarkovianBalking&) { return std::string("markovian_balking"); },
                        [](const HypergeometricRatio&) { return std::string("hypergeometric_ratio"); },
                        [](const BinomialReneging&) { return std::string("binomial_reneging"); },
                        [](const DisasterCoupled& d) {
                          return std::visit(
                              overloaded{
                                  [](const MM1Inner&) { return std::string("disaster_mm1"); },
                                  [](const ChainBDPInner&) { return std::string("disaster_chain_bdp"); },
                                  [](const MXG1DisasterInner&) { return std::string("disaster_mxg1"); },
                              },
                              d.inner);
                        },
                    },
                    v);
}

void validate(const VacationModelSpec& v) {
  std::visit(overloaded{
                 [](const MultipleVacations& m) {
                   require_positive(m.lambda_v, "multiple vacations: lambda_v");
                 },
                 [](const MarkovianBalking& m) {
                   require_positive(m.lambda_v, "markovian vacation: lambda_v");
                   for (std::size_t j = 0; j < 64; ++j) {
                     const double p = m.admit(j);
                     if (!(p >= 0.0 && p <= 1.0)) {
                       throw InvalidInput("markovian vacation: admit probabilities must lie in [0, 1]");
                     }
                     if (!(m.exit(j) >= 0.0) || !(m.disaster(j) >= 0.0)) {
                       throw InvalidInput("markovian vacation: rates must be nonnegative");
                     }
                   }
                 },
                 [](const HypergeometricRatio& h) {
                   if (!(h.argument > 0.0) || !std::isfinite(h.argument)) {
                     throw InvalidInput("hypergeometric: argument must be positive");
                   }
                 },
                 [](const BinomialReneging& m) { validate_reneging(m); },
                 [](const DisasterCoupled& d) {
                   std::visit(overloaded{
                                  [](const MM1Inner& m) { mm1_disaster_rho(m); },
                                  [](const ChainBDPInner& c) {
                                    validate_chain(c.a);
                                    require_positive(c.gamma, "chain BDP: gamma");
                                  },
                                  [](const MXG1DisasterInner& m) { validate_mxg1(m); },
                              },
                              d.inner);
                 },
             },
             v);
}

TransferLaw transfer_law(const VacationModelSpec& v) {
  validate(v);
  return std::visit(overloaded{
                        [](const MultipleVacations& m) { return multiple_vacation_psi(m); },
                        [](const MarkovianBalking& m) {
                          return markovian_psi(markovian_steady_state(m), m.exit);
                        },
                        [](const HypergeometricRatio& h) { return hypergeometric_psi(h); },
                        [](const BinomialReneging& m) { return binomial_reneging_psi(m); },
                        [](const DisasterCoupled& d) { return disaster_coupled_psi(d); },
                    },
                    v);
}

std::optional<double> vacation_e_b0(const VacationModelSpec& v) {
  return std::visit(overloaded{
                        [](const MultipleVacations& m) -> std::optional<double> {
                          return multiple_vacation_e_b0(m);
                        },
                        [](const MarkovianBalking& m) -> std::optional<double> {
                          return expected_vacation_duration(m);
                        },
                        [](const HypergeometricRatio&) -> std::optional<double> { return std::nullopt; },
                        [](const BinomialReneging& m) -> std::optional<double> {
                          return binomial_reneging_e_b0(m);
                        },
                        [](const DisasterCoupled& d) -> std::optional<double> {
                          return disaster_coupled_e_b0(d);
                        },
                    },
                    v);
}

std::optional<std::vector<double>> vacation_mode_probs(const VacationModelSpec& v,
                                                       const CycleQuantities& cycles,
                                                       std::size_t k_max) {
  auto from_pgf = [&](const PgfHandle& conditional) {
    Pmf law = extract_coefficients(conditional, k_max);
    std::vector<double> out(k_max + 1);
    for (std::size_t k = 0; k <= k_max; ++k) out[k] = cycles.p0_dot * law.weights[k];
    return out;
  };
  return std::visit(
      overloaded{
          [](const MultipleVacations&) -> std::optional<std::vector<double>> { return std::nullopt; },
          [&](const MarkovianBalking& m) -> std::optional<std::vector<double>> {
            VacationSteadyState ss =
                calibrate_p00(markovian_steady_state(m), cycles.e_b0, cycles.e_b1);
            std::vector<double> out(k_max + 1, 0.0);
            for (std::size_t k = 0; k <= k_max && k < ss.p0.size(); ++k) out[k] = ss.p0[k];
            return out;
          },
          [](const HypergeometricRatio&) -> std::optional<std::vector<double>> { return std::nullopt; },
          [&](const BinomialReneging& m) -> std::optional<std::vector<double>> {
            const double g01 = binomial_reneging_g0(m, 1.0).real();
            return from_pgf(PgfHandle(
                [m, g01](cplx z) { return binomial_reneging_g0(m, z) / g01; }, std::nullopt));
          },
          [&](const DisasterCoupled& d) -> std::optional<std::vector<double>> {
            return from_pgf(disaster_stationary_pgf(d));
          },
      },
      v);
}

}  // namespace mxvac
