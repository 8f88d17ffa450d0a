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

#include <optional>

#include "mxvac/pgf.hpp"

namespace mxvac {

/// Law of Y, the number of customers moved from the vacation mode into the
/// working mode when a vacation ends. Y >= 1 always.
class TransferLaw {
 public:
  TransferLaw() = default;
  /// Closed-form Psi with its mean; the PMF is extracted on demand.
  TransferLaw(PgfHandle psi, double mean_y);
  /// Finite (possibly truncated) PMF; psi_0 must vanish.
  static TransferLaw from_pmf(Pmf pmf);

  const PgfHandle& psi() const { return psi_; }
  double mean_y() const { return mean_y_; }
  const std::optional<Pmf>& pmf() const { return pmf_; }

  /// psi_0..psi_{n_max}; exact when a PMF is attached, else by extraction.
  std::vector<double> probabilities(std::size_t n_max) const;
  /// P(Y > k) for k = 0..n_max.
  std::vector<double> tails(std::size_t n_max) const;

 private:
  PgfHandle psi_;
  double mean_y_ = 0.0;
  std::optional<Pmf> pmf_;
};

}  // namespace mxvac
