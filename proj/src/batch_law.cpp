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

#include "mxvac/batch_law.hpp"

#include <cmath>
#include <sstream>

#include "mxvac/errors.hpp"

namespace mxvac {

BatchLaw BatchLaw::from_pmf(Pmf pmf) {
  pmf.validate();
  if (pmf.at(0) > 0.0) throw InvalidInput("batch law: P(B = 0) must be zero");
  if (pmf.truncation_mass != 0.0) throw InvalidInput("batch law: must be an exact finite law");
  BatchLaw b;
  b.pgf_ = pgf_from_pmf(pmf);
  b.pmf_ = std::move(pmf);
  return b;
}

BatchLaw BatchLaw::geometric(double p) {
  if (!(p > 0.0) || p > 1.0) throw InvalidInput("geometric batch: p must lie in (0, 1]");
  if (p == 1.0) return point(1);
  BatchLaw b;
  b.geometric_p_ = p;
  const double q = 1.0 - p;
  b.pgf_ = PgfHandle([p, q](cplx z) { return p * z / (1.0 - q * z); }, 1.0 / p,
                     2.0 * q / (p * p));
  return b;
}

double BatchLaw::prob(std::size_t i) const {
  if (pmf_) return pmf_->at(i);
  if (i == 0) return 0.0;
  const double p = *geometric_p_;
  return p * std::pow(1.0 - p, static_cast<double>(i - 1));
}

double BatchLaw::tail(std::size_t i) const {
  if (pmf_) return pmf_->tail(i);
  return std::pow(1.0 - *geometric_p_, static_cast<double>(i));
}

double BatchLaw::mean() const { return *pgf_.analytic_mean(); }

double BatchLaw::second_factorial_moment() const { return *pgf_.second_factorial(); }

std::optional<std::size_t> BatchLaw::max_size() const {
  if (pmf_) return pmf_->max_support();
  return std::nullopt;
}

std::size_t BatchLaw::sample(Rng& rng) const {
  const double u = rng.uniform();
  if (geometric_p_) {
    const double v = 1.0 - u;  // (0, 1]
    return 1 + static_cast<std::size_t>(std::floor(std::log(v) / std::log1p(-*geometric_p_)));
  }
  double c = 0.0;
  for (std::size_t i = 0; i < pmf_->weights.size(); ++i) {
    c += pmf_->weights[i];
    if (u < c) return pmf_->offset + i;
  }
  return pmf_->max_support();
}

std::string BatchLaw::describe() const {
  std::ostringstream os;
  if (geometric_p_) {
    os << "geometric(" << *geometric_p_ << ")";
  } else {
    os << "pmf{";
    for (std::size_t i = 0; i < pmf_->weights.size(); ++i) {
      if (pmf_->weights[i] == 0.0) continue;
      os << (pmf_->offset + i) << ":" << pmf_->weights[i] << " ";
    }
    os << "}";
  }
  return os.str();
}

}  // namespace mxvac
