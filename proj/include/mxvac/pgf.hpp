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
#include <memory>
#include <optional>
#include <vector>

namespace mxvac {

using cplx = std::complex<double>;

/// Probability mass function on {offset, offset+1, ...}.
///
/// `truncation_mass` records the probability that lies beyond the stored
/// weights when the law was cut off (series truncation or coefficient
/// extraction). For exact finite laws it is zero.
struct Pmf {
  std::size_t offset = 0;
  std::vector<double> weights;
  double truncation_mass = 0.0;

  static Pmf point(std::size_t k);
  static Pmf from_weights(std::vector<double> w, std::size_t offset = 0);

  /// P(X = k), zero outside the stored range.
  double at(std::size_t k) const;
  /// P(X > k) computed from the stored weights plus truncation mass.
  double tail(std::size_t k) const;
  double mean() const;
  double second_factorial_moment() const;
  double total() const;
  /// Largest k with stored weight (offset + weights.size() - 1).
  std::size_t max_support() const;
  /// Dense vector indexed by k = 0..max_support().
  std::vector<double> dense() const;

  /// Throws InvalidInput unless weights are nonnegative and sum, together with
  /// truncation_mass, to 1 within `tol`.
  void validate(double tol = 1e-12) const;
};

/// An evaluable probability generating function on the closed unit disk.
///
/// Handles are immutable values; copies share the underlying closure.
class PgfHandle {
 public:
  using EvalFn = std::function<cplx(cplx)>;

  PgfHandle() = default;
  PgfHandle(EvalFn eval, std::optional<double> mean,
            std::optional<double> second_factorial = std::nullopt);

  cplx operator()(cplx z) const { return (*eval_)(z); }
  double operator()(double z) const { return (*eval_)(cplx(z, 0.0)).real(); }

  /// Attached analytic mean, if any (+inf allowed).
  const std::optional<double>& analytic_mean() const { return mean_; }
  /// Attached E[U(U-1)], if known.
  const std::optional<double>& second_factorial() const { return m2_; }
  /// Finite law the handle was built from, if any.
  const Pmf* source_pmf() const { return pmf_.get(); }

  bool valid() const { return static_cast<bool>(eval_); }

 private:
  friend PgfHandle pgf_from_pmf(const Pmf& pmf);

  std::shared_ptr<const EvalFn> eval_;
  std::optional<double> mean_;
  std::optional<double> m2_;
  std::shared_ptr<const Pmf> pmf_;
};

PgfHandle pgf_from_pmf(const Pmf& pmf);

/// PGF of the equilibrium law P(U^e = i) = P(U > i) / E[U].
///
/// Within 1e-6 of z = 1 the removable singularity is replaced by its series
/// limit 1 + E[U^e](z - 1), with E[U^e] = E[U(U-1)] / (2 E[U]) when the
/// second factorial moment is attached to `u`.
PgfHandle equilibrium_pgf(const PgfHandle& u);

struct ExtractionOptions {
  /// Number of sample points on the circle; 0 picks the next power of two
  /// >= 4 (n_max + 1), and at least 4096 to keep aliasing from the tail small.
  std::size_t grid = 0;
  double radius = 1.0;
  double max_imag_residue = 1e-8;
  double min_coefficient = -1e-8;
};

struct Extraction {
  std::vector<double> coefficients;  // c_0 .. c_{n_max}
  double max_imag_residue = 0.0;
  double min_coefficient = 0.0;
};

/// Taylor coefficients c_0..c_{n_max} by inverse DFT on a circle of radius
/// `opts.radius`. Throws DiagnosticFailure when the diagnostics exceed the
/// configured thresholds.
Extraction extract_raw(const PgfHandle& g, std::size_t n_max,
                       const ExtractionOptions& opts = {});

/// Coefficients packed as a Pmf; truncation_mass = 1 - sum(c).
Pmf extract_coefficients(const PgfHandle& g, std::size_t n_max,
                         const ExtractionOptions& opts = {});

struct MeanEstimate {
  double value = 0.0;
  bool converged = true;
  bool analytic = false;
};

/// E[U] = G'(1-). Uses the attached mean when present, otherwise a
/// Richardson-extrapolated one-sided difference with steps 1e-4 and 5e-5
/// (and 2.5e-5 for the convergence check).
MeanEstimate pgf_mean(const PgfHandle& g);

/// Sum_k k c_k over extracted coefficients, doubling n_max until the last
/// coefficients drop below 1e-14. For laws with geometric tails this is far
/// more accurate than finite differences.
double mean_by_extraction(const PgfHandle& g, std::size_t n_start = 256,
                          std::size_t n_ceiling = 1 << 16);

}  // namespace mxvac
