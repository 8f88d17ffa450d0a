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

#include "mxvac/mxg1.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mxvac/errors.hpp"

namespace mxvac {

void WorkingModeSpec::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidInput("working mode: lambda must be positive");
  }
  if (batch.mean() < 1.0) throw InvalidInput("working mode: E[B] must be >= 1");
  const double rho = load();
  if (!(rho < 1.0)) {
    std::ostringstream os;
    os << "working mode: unstable, rho = " << rho << " >= 1";
    throw InvalidInput(os.str());
  }
}

cplx alpha_of_z(const WorkingModeSpec& spec, cplx z) {
  const cplx s = spec.lambda * (1.0 - spec.batch.pgf()(z));
  return spec.service.survival_transform(s);
}

namespace {

// 1 - lambda alpha(z) (1 - B(z)) / (1 - z), written with B^e to stay finite
// at z = 1.
cplx busy_denominator(const WorkingModeSpec& spec, const PgfHandle& be, cplx z) {
  return 1.0 - spec.lambda * alpha_of_z(spec, z) * spec.batch.mean() * be(z);
}

}  // namespace

PgfHandle regular_mxg1_pgf(const WorkingModeSpec& spec) {
  spec.validate();
  const double rho = spec.load();
  PgfHandle be = equilibrium_pgf(spec.batch.pgf());
  return PgfHandle(
      [spec, be, rho](cplx z) {
        // 1 - lambda alpha (1 - B) equals the service LST at lambda (1 - B).
        const cplx lst = spec.service.lst(spec.lambda * (1.0 - spec.batch.pgf()(z)));
        return (1.0 - rho) * lst / busy_denominator(spec, be, z);
      },
      std::nullopt);
}

PgfHandle conditional_busy_pgf(const WorkingModeSpec& spec) {
  spec.validate();
  const double rho = spec.load();
  const double es = spec.service.mean();
  PgfHandle be = equilibrium_pgf(spec.batch.pgf());
  return PgfHandle(
      [spec, be, rho, es](cplx z) {
        const cplx alpha = alpha_of_z(spec, z);
        return (1.0 - rho) / (spec.lambda * es) * spec.lambda * z * alpha * be(z) /
               busy_denominator(spec, be, z);
      },
      std::nullopt);
}

PgfHandle single_start_pgf(const WorkingModeSpec& spec) {
  spec.validate();
  const double rho = spec.load();
  const double es = spec.service.mean();
  PgfHandle be = equilibrium_pgf(spec.batch.pgf());
  return PgfHandle(
      [spec, be, rho, es](cplx z) {
        const cplx alpha = alpha_of_z(spec, z);
        return (1.0 - rho) / (spec.lambda * es) * spec.lambda * alpha * z /
               busy_denominator(spec, be, z);
      },
      std::nullopt);
}

PgfHandle decomposition_pgf(const WorkingModeSpec& spec, const TransferLaw& transfer) {
  PgfHandle busy = conditional_busy_pgf(spec);
  PgfHandle be = equilibrium_pgf(spec.batch.pgf());
  PgfHandle ye = equilibrium_pgf(transfer.psi());
  for (int i = 0; i < 64; ++i) {
    const double x = i / 64.0;
    if (!(be(x) > 1e-12)) {
      throw DiagnosticFailure("decomposition: B^e vanishes on [0, 1)");
    }
  }
  PgfHandle single = single_start_pgf(spec);
  return PgfHandle(
      [busy, be, ye, single](cplx z) {
        const cplx b = be(z);
        if (std::abs(b) <= 1e-12) {
          // B^e can vanish off the real segment (e.g. B = 2 at z = -1); the
          // quotient is removable there and equals the single-start form.
          if (std::abs(z.imag()) < 1e-15 && z.real() >= 0.0 && z.real() <= 1.0) {
            throw DiagnosticFailure("decomposition: |B^e(z)| <= 1e-12 at an evaluation point");
          }
          return single(z) * ye(z);
        }
        return busy(z) / b * ye(z);
      },
      std::nullopt);
}

std::vector<double> a_coefficients_extracted(const WorkingModeSpec& spec, std::size_t j_max) {
  PgfHandle alpha([spec](cplx z) { return alpha_of_z(spec, z); }, std::nullopt);
  return extract_raw(alpha, j_max).coefficients;
}

std::vector<double> a_coefficients_quadrature(const WorkingModeSpec& spec, std::size_t j_max) {
  // conv[n][j] = P(B_1 + ... + B_n = j); batches are >= 1 so n <= j.
  std::vector<std::vector<double>> conv(j_max + 1, std::vector<double>(j_max + 1, 0.0));
  conv[0][0] = 1.0;
  for (std::size_t n = 1; n <= j_max; ++n) {
    for (std::size_t j = n; j <= j_max; ++j) {
      double s = 0.0;
      for (std::size_t i = 1; i <= j - (n - 1); ++i) s += spec.batch.prob(i) * conv[n - 1][j - i];
      conv[n][j] = s;
    }
  }

  double upper = spec.service.support_upper();
  if (!std::isfinite(upper)) {
    upper = std::max(spec.service.mean(), 1e-3);
    while (spec.service.survival(upper) * std::max(1.0, upper) > 1e-18) upper *= 1.5;
  }
  const double lambda = spec.lambda;
  const int panels = 16;
  const double width = upper / panels;

  std::vector<double> a(j_max + 1, 0.0);
  for (std::size_t j = 0; j <= j_max; ++j) {
    auto integrand = [&](double t) {
      const double x = lambda * t;
      double r = 0.0;
      for (std::size_t n = 0; n <= j; ++n) {
        if (conv[n][j] == 0.0) continue;
        double pois;
        if (n == 0) {
          pois = std::exp(-x);
        } else if (x == 0.0) {
          pois = 0.0;
        } else {
          pois = std::exp(-x + n * std::log(x) - std::lgamma(n + 1.0));
        }
        r += pois * conv[n][j];
      }
      return r * spec.service.survival(t);
    };
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
      total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          integrand, p * width, (p + 1) * width, 6, 1e-11);
    }
    a[j] = total;
  }
  return a;
}

std::vector<double> a_coefficients(const WorkingModeSpec& spec, std::size_t j_max,
                                   double tolerance) {
  std::vector<double> fast = a_coefficients_extracted(spec, j_max);
  std::vector<double> slow = a_coefficients_quadrature(spec, j_max);
  for (std::size_t j = 0; j <= j_max; ++j) {
    if (std::abs(fast[j] - slow[j]) > tolerance) {
      std::ostringstream os;
      os << "a_coefficients: extraction and quadrature disagree at j = " << j << " ("
         << fast[j] << " vs " << slow[j] << ")";
      throw DiagnosticFailure(os.str());
    }
  }
  return fast;
}

CycleQuantities cycle_quantities(const WorkingModeSpec& spec, const TransferLaw& transfer,
                                 double e_b0) {
  if (!(e_b0 > 0.0) || !std::isfinite(e_b0)) {
    throw InvalidInput("cycle_quantities: E[B0] must be positive and finite");
  }
  spec.validate();
  CycleQuantities c;
  c.e_b0 = e_b0;
  c.e_b1 = spec.service.mean() * transfer.mean_y() /
           (1.0 - spec.lambda * spec.batch.mean() * spec.service.mean());
  c.e_t = c.e_b0 + c.e_b1;
  c.p1_dot = c.e_b1 / c.e_t;
  c.p0_dot = c.e_b0 / c.e_t;
  return c;
}

WorkingStateProbs recursive_working_probs(const WorkingModeSpec& spec,
                                          const TransferLaw& transfer,
                                          const CycleQuantities& cycles,
                                          std::size_t j_max,
                                          const std::vector<double>& a) {
  if (a.size() < j_max) throw InvalidInput("recursive_working_probs: too few a_j");
  if (!(cycles.e_t > 0.0)) throw InvalidInput("recursive_working_probs: E[T] must be positive");
  const double et = cycles.e_t;
  const double lambda = spec.lambda;
  const std::vector<double> psi = transfer.probabilities(j_max);
  const std::vector<double> ytail = transfer.tails(j_max);
  std::vector<double> btail(j_max + 1);
  for (std::size_t i = 0; i <= j_max; ++i) btail[i] = spec.batch.tail(i);

  std::vector<double> p(j_max + 1, 0.0);     // p[j] = p_(1,j)
  std::vector<double> rate(j_max + 1, 0.0);  // rate[k] = E[N_k] / E[T]
  const double implicit = 1.0 - lambda * a[0];
  for (std::size_t j = 1; j <= j_max; ++j) {
    double s = 0.0;
    for (std::size_t q = 1; q <= j; ++q) s += psi[q] * a[j - q];
    s /= et;
    for (std::size_t k = 1; k < j; ++k) s += a[j - k] * rate[k];
    double partial = ytail[j] / et;
    for (std::size_t i = 1; i < j; ++i) partial += lambda * p[i] * btail[j - i];
    s += a[0] * partial;
    p[j] = s / implicit;
    rate[j] = partial + lambda * p[j] * btail[0];
    if (p[j] < -1e-10) {
      std::ostringstream os;
      os << "recursive_working_probs: negative p_(1," << j << ") = " << p[j];
      throw DiagnosticFailure(os.str());
    }
  }
  WorkingStateProbs out;
  out.probs.assign(p.begin() + 1, p.end());
  // Rounding leaves tiny negatives where the mass is effectively zero.
  for (double& v : out.probs) v = std::max(v, 0.0);
  double sum = 0.0;
  for (double v : out.probs) sum += v;
  out.truncation_mass = std::max(0.0, cycles.p1_dot - sum);
  return out;
}

WorkingStateProbs recursive_working_probs(const WorkingModeSpec& spec,
                                          const TransferLaw& transfer,
                                          const CycleQuantities& cycles,
                                          std::size_t j_max) {
  return recursive_working_probs(spec, transfer, cycles, j_max,
                                 a_coefficients_extracted(spec, j_max));
}

LevelExpectations level_expectations(const WorkingModeSpec& spec,
                                     const std::vector<double>& psi,
                                     const std::vector<double>& a, std::size_t j_max) {
  if (a.size() < j_max) throw InvalidInput("level_expectations: too few a_j");
  auto psi_at = [&](std::size_t s) { return s < psi.size() ? psi[s] : 0.0; };
  double cum = 0.0;
  std::vector<double> ytail(j_max + 1);
  for (std::size_t k = 0; k <= j_max; ++k) {
    cum += psi_at(k);
    ytail[k] = std::max(0.0, 1.0 - cum);
  }
  LevelExpectations out;
  out.expected_time.assign(j_max + 1, 0.0);
  out.expected_downcrossings.assign(j_max + 1, 0.0);
  auto& t = out.expected_time;
  auto& n = out.expected_downcrossings;
  const double lambda = spec.lambda;
  for (std::size_t j = 1; j <= j_max; ++j) {
    // E[T_j] = sum_s psi_s a_{j-s} + sum_{k<=j} E[N_k] a_{j-k}, where E[N_j]
    // itself contains lambda E[T_j].
    double s = 0.0;
    for (std::size_t q = 1; q <= j; ++q) s += psi_at(q) * a[j - q];
    for (std::size_t k = 1; k < j; ++k) s += n[k] * a[j - k];
    double partial = ytail[j];
    for (std::size_t i = 1; i < j; ++i) partial += lambda * t[i] * spec.batch.tail(j - i);
    t[j] = (s + a[0] * partial) / (1.0 - lambda * a[0]);
    n[j] = partial + lambda * t[j];
  }
  return out;
}

}  // namespace mxvac
