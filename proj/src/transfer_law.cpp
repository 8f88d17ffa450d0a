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

#include "mxvac/transfer_law.hpp"

#include <algorithm>
#include <cmath>

#include "mxvac/errors.hpp"

namespace mxvac {

TransferLaw::TransferLaw(PgfHandle psi, double mean_y)
    : psi_(std::move(psi)), mean_y_(mean_y) {
  if (!psi_.analytic_mean()) {
    psi_ = PgfHandle([inner = psi_](cplx z) { return inner(z); }, mean_y_,
                     psi_.second_factorial());
  }
  if (!(mean_y_ >= 1.0) || !std::isfinite(mean_y_)) {
    throw InvalidInput("transfer law: E[Y] must be finite and >= 1");
  }
  if (std::abs(psi_(1.0) - 1.0) > 1e-10) {
    throw DiagnosticFailure("transfer law: Psi(1) != 1");
  }
  if (std::abs(psi_(0.0)) > 1e-12) {
    throw DiagnosticFailure("transfer law: Psi(0) != 0 (vacation must end with a customer)");
  }
}

TransferLaw TransferLaw::from_pmf(Pmf pmf) {
  pmf.validate(1e-10);
  if (pmf.at(0) != 0.0) throw InvalidInput("transfer law: psi_0 must be zero");
  PgfHandle h = pgf_from_pmf(pmf);
  const double m = pmf.mean();
  TransferLaw t;
  t.psi_ = h;
  t.mean_y_ = m;
  t.pmf_ = std::move(pmf);
  return t;
}

std::vector<double> TransferLaw::probabilities(std::size_t n_max) const {
  std::vector<double> out(n_max + 1, 0.0);
  if (pmf_) {
    for (std::size_t k = 0; k <= n_max; ++k) out[k] = pmf_->at(k);
    return out;
  }
  Pmf ex = extract_coefficients(psi_, n_max);
  for (std::size_t k = 0; k <= n_max; ++k) out[k] = ex.weights[k];
  return out;
}

std::vector<double> TransferLaw::tails(std::size_t n_max) const {
  std::vector<double> p = probabilities(n_max);
  std::vector<double> out(n_max + 1);
  double cum = 0.0;
  for (std::size_t k = 0; k <= n_max; ++k) {
    cum += p[k];
    out[k] = std::max(0.0, 1.0 - cum);
  }
  return out;
}

}  // namespace mxvac
