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

#include <cstddef>
#include <optional>
#include <string>

#include "mxvac/pgf.hpp"
#include "mxvac/random.hpp"

namespace mxvac {

/// Law of a batch size on {1, 2, ...}: either a finite PMF or the geometric
/// law P(B = i) = p (1-p)^(i-1) carried in closed form.
class BatchLaw {
 public:
  static BatchLaw from_pmf(Pmf pmf);
  static BatchLaw point(std::size_t k) { return from_pmf(Pmf::point(k)); }
  static BatchLaw geometric(double p);

  double prob(std::size_t i) const;
  /// P(B > i).
  double tail(std::size_t i) const;
  double mean() const;
  double second_factorial_moment() const;
  const PgfHandle& pgf() const { return pgf_; }
  /// Largest possible batch, empty for the geometric law.
  std::optional<std::size_t> max_size() const;
  bool is_geometric() const { return geometric_p_.has_value(); }
  std::optional<double> geometric_p() const { return geometric_p_; }
  const Pmf* pmf() const { return pmf_ ? &*pmf_ : nullptr; }
  std::size_t sample(Rng& rng) const;
  std::string describe() const;

 private:
  BatchLaw() = default;
  std::optional<Pmf> pmf_;
  std::optional<double> geometric_p_;
  PgfHandle pgf_;
};

}  // namespace mxvac
