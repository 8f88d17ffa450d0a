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
#include <string>
#include <variant>
#include <vector>

#include "mxvac/random.hpp"

namespace mxvac {

/// Law of a nonnegative service (or vacation) time.
///
/// Erlang(k, rate) is the sum of k exponential phases each with the given
/// rate, so its mean is k / rate.
class ServiceLaw {
 public:
  struct Exponential { double rate; };
  struct Erlang { int phases; double rate; };
  struct Deterministic { double value; };
  struct HyperExponential { std::vector<double> weights, rates; };
  using Kind = std::variant<Exponential, Erlang, Deterministic, HyperExponential>;

  static ServiceLaw exponential(double rate);
  static ServiceLaw erlang(int phases, double rate);
  static ServiceLaw deterministic(double value);
  static ServiceLaw hyperexponential(std::vector<double> weights,
                                     std::vector<double> rates);

  const Kind& kind() const { return kind_; }
  std::string name() const;
  bool is_exponential() const;

  double mean() const;
  double second_moment() const;

  /// Laplace-Stieltjes transform E[exp(-s S)] for Re s >= 0.
  std::complex<double> lst(std::complex<double> s) const;
  /// (1 - lst(s)) / s, the transform of the survival function; equals E[S]
  /// at s = 0 and is evaluated without cancellation near the origin.
  std::complex<double> survival_transform(std::complex<double> s) const;

  double cdf(double t) const;
  double survival(double t) const { return 1.0 - cdf(t); }
  /// Right end of the support (+inf unless deterministic).
  double support_upper() const;

  double sample(Rng& rng) const;

 private:
  explicit ServiceLaw(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

}  // namespace mxvac
