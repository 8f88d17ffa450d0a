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

#include "mxvac/pgf.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>

#include "mxvac/errors.hpp"

namespace mxvac {

Pmf Pmf::point(std::size_t k) { return Pmf{k, {1.0}, 0.0}; }

Pmf Pmf::from_weights(std::vector<double> w, std::size_t offset) {
  Pmf p{offset, std::move(w), 0.0};
  p.validate();
  return p;
}

double Pmf::at(std::size_t k) const {
  if (k < offset || k - offset >= weights.size()) return 0.0;
  return weights[k - offset];
}

double Pmf::tail(std::size_t k) const {
  double s = truncation_mass;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (offset + i > k) s += weights[i];
  }
  return s;
}

double Pmf::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    m += static_cast<double>(offset + i) * weights[i];
  }
  return m;
}

double Pmf::second_factorial_moment() const {
  double m = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double k = static_cast<double>(offset + i);
    m += k * (k - 1.0) * weights[i];
  }
  return m;
}

double Pmf::total() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

std::size_t Pmf::max_support() const {
  return weights.empty() ? offset : offset + weights.size() - 1;
}

std::vector<double> Pmf::dense() const {
  std::vector<double> out(max_support() + 1, 0.0);
  for (std::size_t i = 0; i < weights.size(); ++i) out[offset + i] = weights[i];
  return out;
}

void Pmf::validate(double tol) const {
  if (weights.empty()) throw InvalidInput("pmf: no weights");
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidInput("pmf: weights must be finite and nonnegative");
    }
  }
  if (truncation_mass < 0.0) throw InvalidInput("pmf: negative truncation mass");
  const double s = total() + truncation_mass;
  if (std::abs(s - 1.0) > tol) {
    std::ostringstream os;
    os << "pmf: weights sum to " << s << ", expected 1";
    throw InvalidInput(os.str());
  }
}

PgfHandle::PgfHandle(EvalFn eval, std::optional<double> mean,
                     std::optional<double> second_factorial)
    : eval_(std::make_shared<const EvalFn>(std::move(eval))),
      mean_(mean),
      m2_(second_factorial) {}

PgfHandle pgf_from_pmf(const Pmf& pmf) {
  auto shared = std::make_shared<const Pmf>(pmf);
  PgfHandle h(
      [p = shared](cplx z) {
        cplx acc(0.0, 0.0);
        for (auto it = p->weights.rbegin(); it != p->weights.rend(); ++it) {
          acc = acc * z + *it;
        }
        if (p->offset > 0) acc *= std::pow(z, static_cast<int>(p->offset));
        return acc;
      },
      pmf.mean(), pmf.second_factorial_moment());
  h.pmf_ = shared;
  return h;
}

PgfHandle equilibrium_pgf(const PgfHandle& u) {
  const auto& m = u.analytic_mean();
  if (!m) throw InvalidInput("equilibrium_pgf: mean of U must be attached");
  const double mean = *m;
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    throw InvalidInput("equilibrium_pgf: E[U] must be finite and nonzero");
  }
  std::optional<double> eq_mean;
  if (u.second_factorial()) eq_mean = *u.second_factorial() / (2.0 * mean);
  return PgfHandle(
      [u, mean, eq_mean](cplx z) {
        const cplx d = 1.0 - z;
        if (std::abs(d) < 1e-6) {
          return cplx(1.0, 0.0) - eq_mean.value_or(0.0) * d;
        }
        return (1.0 - u(z)) / (mean * d);
      },
      eq_mean);
}

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

Extraction extract_raw(const PgfHandle& g, std::size_t n_max,
                       const ExtractionOptions& opts) {
  const std::size_t grid = opts.grid ? opts.grid : std::max<std::size_t>(4096, next_pow2(4 * (n_max + 1)));
  if (grid < 2 * n_max) {
    throw InvalidInput("extract_coefficients: grid must be >= 2 n_max");
  }
  if (!(opts.radius > 0.0) || opts.radius > 1.0) {
    throw InvalidInput("extract_coefficients: radius must lie in (0, 1]");
  }
  std::vector<std::complex<double>> in(grid), out(grid);
  const double two_pi = 2.0 * std::acos(-1.0);
  for (std::size_t m = 0; m < grid; ++m) {
    const double theta = two_pi * static_cast<double>(m) / static_cast<double>(grid);
    in[m] = g(opts.radius * cplx(std::cos(theta), std::sin(theta)));
  }
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(grid),
                            reinterpret_cast<fftw_complex*>(in.data()),
                            reinterpret_cast<fftw_complex*>(out.data()),
                            FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }

  Extraction ex;
  ex.coefficients.resize(n_max + 1);
  ex.min_coefficient = std::numeric_limits<double>::infinity();
  double scale = 1.0 / static_cast<double>(grid);
  for (std::size_t k = 0; k <= n_max; ++k) {
    const cplx c = out[k] * scale;
    ex.coefficients[k] = c.real();
    ex.max_imag_residue = std::max(ex.max_imag_residue, std::abs(c.imag()));
    ex.min_coefficient = std::min(ex.min_coefficient, c.real());
    scale /= opts.radius;
  }
  if (ex.max_imag_residue > opts.max_imag_residue) {
    std::ostringstream os;
    os << "extract_coefficients: imaginary residue " << ex.max_imag_residue;
    throw DiagnosticFailure(os.str());
  }
  if (ex.min_coefficient < opts.min_coefficient) {
    std::ostringstream os;
    os << "extract_coefficients: negative coefficient " << ex.min_coefficient;
    throw DiagnosticFailure(os.str());
  }
  return ex;
}

Pmf extract_coefficients(const PgfHandle& g, std::size_t n_max,
                         const ExtractionOptions& opts) {
  Extraction ex = extract_raw(g, n_max, opts);
  Pmf p;
  p.offset = 0;
  p.weights = std::move(ex.coefficients);
  p.truncation_mass = std::max(0.0, 1.0 - p.total());
  return p;
}

MeanEstimate pgf_mean(const PgfHandle& g) {
  if (g.analytic_mean()) return {*g.analytic_mean(), true, true};
  auto slope = [&](double h) { return (1.0 - g(1.0 - h)) / h; };
  const double d1 = slope(1e-4);
  const double d2 = slope(5e-5);
  const double d3 = slope(2.5e-5);
  const double r1 = 2.0 * d2 - d1;
  const double r2 = 2.0 * d3 - d2;
  MeanEstimate est{r2, true, false};
  const double rel = std::abs(r2 - r1) / std::max(1.0, std::abs(r2));
  est.converged = std::isfinite(r2) && rel <= 1e-6;
  return est;
}

double mean_by_extraction(const PgfHandle& g, std::size_t n_start, std::size_t n_ceiling) {
  for (std::size_t n = n_start; n <= n_ceiling; n *= 2) {
    Extraction ex = extract_raw(g, n);
    const auto& c = ex.coefficients;
    if (std::abs(c.back()) < 1e-14 && std::abs(c[c.size() - 2]) < 1e-14) {
      double m = 0.0;
      for (std::size_t k = 0; k < c.size(); ++k) m += static_cast<double>(k) * c[k];
      return m;
    }
  }
  throw DiagnosticFailure("mean_by_extraction: coefficients do not decay by the ceiling");
}

}  // namespace mxvac
