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

#include "mxvac/service_law.hpp"

#include <cmath>
#include <limits>
#include <numeric>
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

void require_rate(double r, const char* what) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw InvalidInput(std::string(what) + ": rate must be positive and finite");
  }
}

}  // namespace

ServiceLaw ServiceLaw::exponential(double rate) {
  require_rate(rate, "exponential");
  return ServiceLaw(Exponential{rate});
}

ServiceLaw ServiceLaw::erlang(int phases, double rate) {
  require_rate(rate, "erlang");
  if (phases < 1) throw InvalidInput("erlang: phases must be >= 1");
  return ServiceLaw(Erlang{phases, rate});
}

ServiceLaw ServiceLaw::deterministic(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InvalidInput("deterministic: value must be positive and finite");
  }
  return ServiceLaw(Deterministic{value});
}

ServiceLaw ServiceLaw::hyperexponential(std::vector<double> weights,
                                        std::vector<double> rates) {
  if (weights.empty() || weights.size() != rates.size()) {
    throw InvalidInput("hyperexponential: weights and rates must match");
  }
  for (double r : rates) require_rate(r, "hyperexponential");
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidInput("hyperexponential: negative weight");
  }
  const double s = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(s - 1.0) > 1e-12) {
    throw InvalidInput("hyperexponential: weights must sum to 1");
  }
  return ServiceLaw(HyperExponential{std::move(weights), std::move(rates)});
}

std::string ServiceLaw::name() const {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const Exponential& e) { os << "exponential(" << e.rate << ")"; },
                 [&](const Erlang& e) { os << "erlang(" << e.phases << "," << e.rate << ")"; },
                 [&](const Deterministic& d) { os << "deterministic(" << d.value << ")"; },
                 [&](const HyperExponential& h) { os << "hyperexponential(" << h.rates.size() << ")"; },
             },
             kind_);
  return os.str();
}

bool ServiceLaw::is_exponential() const {
  return std::holds_alternative<Exponential>(kind_);
}

double ServiceLaw::mean() const {
  return std::visit(overloaded{
                        [](const Exponential& e) { return 1.0 / e.rate; },
                        [](const Erlang& e) { return e.phases / e.rate; },
                        [](const Deterministic& d) { return d.value; },
                        [](const HyperExponential& h) {
                          double m = 0.0;
                          for (std::size_t i = 0; i < h.rates.size(); ++i) m += h.weights[i] / h.rates[i];
                          return m;
                        },
                    },
                    kind_);
}

double ServiceLaw::second_moment() const {
  return std::visit(overloaded{
                        [](const Exponential& e) { return 2.0 / (e.rate * e.rate); },
                        [](const Erlang& e) { return e.phases * (e.phases + 1.0) / (e.rate * e.rate); },
                        [](const Deterministic& d) { return d.value * d.value; },
                        [](const HyperExponential& h) {
                          double m = 0.0;
                          for (std::size_t i = 0; i < h.rates.size(); ++i) {
                            m += 2.0 * h.weights[i] / (h.rates[i] * h.rates[i]);
                          }
                          return m;
                        },
                    },
                    kind_);
}

std::complex<double> ServiceLaw::lst(std::complex<double> s) const {
  using C = std::complex<double>;
  return std::visit(overloaded{
                        [&](const Exponential& e) { return C(e.rate) / (e.rate + s); },
                        [&](const Erlang& e) { return std::pow(C(e.rate) / (e.rate + s), e.phases); },
                        [&](const Deterministic& d) { return std::exp(-s * d.value); },
                        [&](const HyperExponential& h) {
                          C acc(0.0);
                          for (std::size_t i = 0; i < h.rates.size(); ++i) {
                            acc += h.weights[i] * h.rates[i] / (h.rates[i] + s);
                          }
                          return acc;
                        },
                    },
                    kind_);
}

std::complex<double> ServiceLaw::survival_transform(std::complex<double> s) const {
  using C = std::complex<double>;
  return std::visit(
      overloaded{
          [&](const Exponential& e) { return C(1.0) / (e.rate + s); },
          [&](const Erlang& e) {
            const C x = C(e.rate) / (e.rate + s);
            C acc(0.0), p(1.0);
            for (int i = 0; i < e.phases; ++i) {
              acc += p;
              p *= x;
            }
            return acc / (e.rate + s);
          },
          [&](const Deterministic& d) {
            const C x = s * d.value;
            if (std::abs(x) < 1e-3) {
              // d * sum_n (-x)^n / (n+1)!
              C acc(0.0), term(1.0);
              for (int n = 0; n < 8; ++n) {
                acc += term;
                term *= -x / static_cast<double>(n + 2);
              }
              return d.value * acc;
            }
            return (1.0 - std::exp(-x)) / s;
          },
          [&](const HyperExponential& h) {
            C acc(0.0);
            for (std::size_t i = 0; i < h.rates.size(); ++i) acc += h.weights[i] / (h.rates[i] + s);
            return acc;
          },
      },
      kind_);
}

double ServiceLaw::cdf(double t) const {
  if (t <= 0.0) return 0.0;
  return std::visit(overloaded{
                        [&](const Exponential& e) { return -std::expm1(-e.rate * t); },
                        [&](const Erlang& e) {
                          const double x = e.rate * t;
                          double term = std::exp(-x), surv = 0.0;
                          for (int i = 0; i < e.phases; ++i) {
                            surv += term;
                            term *= x / (i + 1.0);
                          }
                          return 1.0 - surv;
                        },
                        [&](const Deterministic& d) { return t >= d.value ? 1.0 : 0.0; },
                        [&](const HyperExponential& h) {
                          double c = 0.0;
                          for (std::size_t i = 0; i < h.rates.size(); ++i) {
                            c += h.weights[i] * -std::expm1(-h.rates[i] * t);
                          }
                          return c;
                        },
                    },
                    kind_);
}

double ServiceLaw::support_upper() const {
  if (const auto* d = std::get_if<Deterministic>(&kind_)) return d->value;
  return std::numeric_limits<double>::infinity();
}

double ServiceLaw::sample(Rng& rng) const {
  return std::visit(overloaded{
                        [&](const Exponential& e) { return rng.exponential(e.rate); },
                        [&](const Erlang& e) {
                          double t = 0.0;
                          for (int i = 0; i < e.phases; ++i) t += rng.exponential(e.rate);
                          return t;
                        },
                        [&](const Deterministic& d) { return d.value; },
                        [&](const HyperExponential& h) {
                          const double u = rng.uniform();
                          double c = 0.0;
                          std::size_t i = 0;
                          for (; i + 1 < h.weights.size(); ++i) {
                            c += h.weights[i];
                            if (u < c) break;
                          }
                          return rng.exponential(h.rates[i]);
                        },
                    },
                    kind_);
}

}  // namespace mxvac
