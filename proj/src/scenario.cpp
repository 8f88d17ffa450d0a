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

#include "mxvac/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mxvac/errors.hpp"

namespace mxvac {

namespace {

using json = nlohmann::ordered_json;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw InvalidInput(path + ": " + what);
}

// Object view that records which keys were read so the rest can be rejected.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_ + "." + key; }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& req(const std::string& key) {
    if (!j_.contains(key)) fail(at(key), "missing required key");
    used_.insert(key);
    return j_.at(key);
  }

  const json* opt(const std::string& key) {
    if (!j_.contains(key)) return nullptr;
    used_.insert(key);
    return &j_.at(key);
  }

  double number(const std::string& key) { return as_number(req(key), at(key)); }

  double positive(const std::string& key) {
    const double v = number(key);
    if (!(v > 0.0)) fail(at(key), "must be positive");
    return v;
  }

  double nonnegative(const std::string& key) {
    const double v = number(key);
    if (!(v >= 0.0)) fail(at(key), "must be nonnegative");
    return v;
  }

  std::uint64_t count(const std::string& key, std::uint64_t min) {
    const json& v = req(key);
    if (!v.is_number_integer() || (v.is_number_integer() && v.get<std::int64_t>() < 0)) {
      fail(at(key), "expected a nonnegative integer");
    }
    const auto n = v.get<std::uint64_t>();
    if (n < min) fail(at(key), "must be >= " + std::to_string(min));
    return n;
  }

  std::string text(const std::string& key) {
    const json& v = req(key);
    if (!v.is_string()) fail(at(key), "expected a string");
    return v.get<std::string>();
  }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!used_.count(key)) fail(at(key), "unknown key");
    }
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(path, "must be finite");
    return d;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

std::vector<double> number_list(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected a nonempty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(Obj::as_number(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

// ---- service laws ----------------------------------------------------------

ServiceLaw parse_service(const json& j, const std::string& path) {
  Obj o(j, path);
  const std::string kind = o.text("kind");
  ServiceLaw out = [&] {
    try {
      if (kind == "exponential") return ServiceLaw::exponential(o.positive("rate"));
      if (kind == "erlang") {
        const auto k = o.count("phases", 1);
        return ServiceLaw::erlang(static_cast<int>(k), o.positive("rate"));
      }
      if (kind == "deterministic") return ServiceLaw::deterministic(o.positive("value"));
      if (kind == "hyperexponential") {
        return ServiceLaw::hyperexponential(number_list(o.req("weights"), o.at("weights")),
                                            number_list(o.req("rates"), o.at("rates")));
      }
    } catch (const InvalidInput& e) {
      if (std::string(e.what()).rfind("$", 0) == 0) throw;
      fail(path, e.what());
    }
    fail(o.at("kind"), "unknown service kind '" + kind +
                           "' (expected exponential, erlang, deterministic, hyperexponential)");
  }();
  o.finish();
  return out;
}

json service_json(const ServiceLaw& s) {
  return std::visit(overloaded{
                        [](const ServiceLaw::Exponential& e) {
                          return json{{"kind", "exponential"}, {"rate", e.rate}};
                        },
                        [](const ServiceLaw::Erlang& e) {
                          return json{{"kind", "erlang"}, {"phases", e.phases}, {"rate", e.rate}};
                        },
                        [](const ServiceLaw::Deterministic& d) {
                          return json{{"kind", "deterministic"}, {"value", d.value}};
                        },
                        [](const ServiceLaw::HyperExponential& h) {
                          return json{{"kind", "hyperexponential"},
                                      {"weights", h.weights},
                                      {"rates", h.rates}};
                        },
                    },
                    s.kind());
}

// ---- batch laws ------------------------------------------------------------

BatchLaw parse_batch(const json& j, const std::string& path) {
  Obj o(j, path);
  const int forms = o.has("pmf") + o.has("point") + o.has("geometric");
  if (forms != 1) fail(path, "give exactly one of pmf, point, geometric");
  BatchLaw out = BatchLaw::point(1);
  try {
    if (const json* v = o.opt("pmf")) {
      out = BatchLaw::from_pmf(Pmf::from_weights(number_list(*v, o.at("pmf"))));
    } else if (o.has("point")) {
      out = BatchLaw::point(o.count("point", 1));
    } else {
      out = BatchLaw::geometric(o.number("geometric"));
    }
  } catch (const InvalidInput& e) {
    if (std::string(e.what()).rfind("$", 0) == 0) throw;
    fail(path, e.what());
  }
  o.finish();
  return out;
}

json batch_json(const BatchLaw& b) {
  if (b.is_geometric()) return json{{"geometric", *b.geometric_p()}};
  const Pmf& p = *b.pmf();
  if (b.max_size() && p.at(*b.max_size()) == 1.0) return json{{"point", *b.max_size()}};
  return json{{"pmf", p.dense()}};
}

// ---- rate sequences and roots -----------------------------------------------

RateSequence parse_rate(const json& j, const std::string& path) {
  if (j.is_number()) return RateSequence::constant(Obj::as_number(j, path));
  Obj o(j, path);
  std::vector<double> den{1.0};
  const std::vector<double> num = number_list(o.req("numerator"), o.at("numerator"));
  if (const json* d = o.opt("denominator")) den = number_list(*d, o.at("denominator"));
  o.finish();
  return RateSequence::rational(num, den);
}

json rate_json(const RateSequence& r) {
  if (r.numerator().size() == 1 && r.denominator() == std::vector<double>{1.0}) {
    return r.numerator()[0];
  }
  return json{{"numerator", r.numerator()}, {"denominator", r.denominator()}};
}

std::vector<cplx> parse_roots(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of roots");
  std::vector<cplx> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (v[i].is_number()) {
      out.emplace_back(Obj::as_number(v[i], p), 0.0);
    } else if (v[i].is_array() && v[i].size() == 2) {
      out.emplace_back(Obj::as_number(v[i][0], p + "[0]"), Obj::as_number(v[i][1], p + "[1]"));
    } else {
      fail(p, "expected a number or a [re, im] pair");
    }
  }
  return out;
}

json roots_json(const std::vector<cplx>& roots) {
  json out = json::array();
  for (const cplx& r : roots) {
    if (r.imag() == 0.0) {
      out.push_back(r.real());
    } else {
      out.push_back(json::array({r.real(), r.imag()}));
    }
  }
  return out;
}

// ---- blocks ----------------------------------------------------------------

WorkingModeSpec parse_working(const json& j) {
  Obj o(j, "$.working");
  WorkingModeSpec w{o.positive("lambda"), parse_batch(o.req("batch"), o.at("batch")),
                    parse_service(o.req("service"), o.at("service"))};
  o.finish();
  if (!(w.load() < 1.0)) {
    std::ostringstream os;
    os << "$.working: load rho = " << w.load() << " >= 1; the working mode is unstable";
    throw StabilityError(os.str());
  }
  return w;
}

VacationModelSpec parse_vacation(const json& j) {
  Obj o(j, "$.vacation");
  const std::string model = o.text("model");
  VacationModelSpec out = [&]() -> VacationModelSpec {
    if (model == "multiple_vacations") {
      return MultipleVacations{o.positive("lambda_v"),
                               o.has("batch") ? parse_batch(o.req("batch"), o.at("batch"))
                                              : BatchLaw::point(1),
                               parse_service(o.req("vacation"), o.at("vacation"))};
    }
    if (model == "markovian_balking") {
      MarkovianBalking m{o.positive("lambda_v"), parse_rate(o.req("admit"), o.at("admit")),
                         parse_rate(o.req("exit"), o.at("exit")), RateSequence::constant(0.0)};
      if (const json* d = o.opt("disaster")) m.disaster = parse_rate(*d, o.at("disaster"));
      if (const json* b = o.opt("batch")) m.batch = parse_batch(*b, o.at("batch"));
      return m;
    }
    if (model == "hypergeometric_ratio") {
      HypergeometricRatio h{parse_roots(o.req("numerator_roots"), o.at("numerator_roots")),
                            parse_roots(o.req("denominator_roots"), o.at("denominator_roots"))};
      if (o.opt("argument")) h.argument = o.positive("argument");
      return h;
    }
    if (model == "binomial_reneging") {
      const double lv = o.positive("lambda_v"), xi = o.positive("xi"), g = o.positive("gamma");
      const double p = o.number("p");
      if (!(p >= 0.0 && p <= 1.0)) fail(o.at("p"), "must lie in [0, 1]");
      return BinomialReneging{lv, xi, g, p};
    }
    if (model == "disaster_mm1") {
      const double lv = o.positive("lambda_v"), mu = o.positive("mu_v");
      return DisasterCoupled{MM1Inner{lv, mu, o.positive("gamma")}};
    }
    if (model == "disaster_chain_bdp") {
      const double a = o.positive("a");
      if (a > 0.25) fail(o.at("a"), "must lie in (0, 0.25]");
      return DisasterCoupled{ChainBDPInner{a, o.positive("gamma")}};
    }
    if (model == "disaster_mxg1") {
      const double lv = o.positive("lambda_v");
      BatchLaw b = o.has("batch") ? parse_batch(o.req("batch"), o.at("batch")) : BatchLaw::point(1);
      ServiceLaw s = parse_service(o.req("service"), o.at("service"));
      const double xi = o.nonnegative("xi");
      return DisasterCoupled{MXG1DisasterInner{lv, b, s, xi, o.positive("gamma")}};
    }
    fail(o.at("model"),
         "unknown vacation model '" + model +
             "' (expected multiple_vacations, markovian_balking, hypergeometric_ratio, "
             "binomial_reneging, disaster_mm1, disaster_chain_bdp, disaster_mxg1)");
  }();
  o.finish();
  try {
    validate(out);
  } catch (const InvalidInput& e) {
    fail("$.vacation", e.what());
  }
  return out;
}

json vacation_json(const VacationModelSpec& v) {
  return std::visit(
      overloaded{
          [](const MultipleVacations& m) {
            return json{{"model", "multiple_vacations"},
                        {"lambda_v", m.lambda_v},
                        {"batch", batch_json(m.batch_v)},
                        {"vacation", service_json(m.vacation)}};
          },
          [](const MarkovianBalking& m) {
            return json{{"model", "markovian_balking"}, {"lambda_v", m.lambda_v},
                        {"admit", rate_json(m.admit)},  {"exit", rate_json(m.exit)},
                        {"disaster", rate_json(m.disaster)}, {"batch", batch_json(m.batch)}};
          },
          [](const HypergeometricRatio& h) {
            return json{{"model", "hypergeometric_ratio"},
                        {"numerator_roots", roots_json(h.numerator_roots)},
                        {"denominator_roots", roots_json(h.denominator_roots)},
                        {"argument", h.argument}};
          },
          [](const BinomialReneging& m) {
            return json{{"model", "binomial_reneging"}, {"lambda_v", m.lambda_v},
                        {"xi", m.xi}, {"gamma", m.gamma}, {"p", m.p}};
          },
          [](const DisasterCoupled& d) {
            return std::visit(
                overloaded{
                    [](const MM1Inner& m) {
                      return json{{"model", "disaster_mm1"}, {"lambda_v", m.lambda_v},
                                  {"mu_v", m.mu_v}, {"gamma", m.gamma}};
                    },
                    [](const ChainBDPInner& c) {
                      return json{{"model", "disaster_chain_bdp"}, {"a", c.a}, {"gamma", c.gamma}};
                    },
                    [](const MXG1DisasterInner& m) {
                      return json{{"model", "disaster_mxg1"},
                                  {"lambda_v", m.lambda_v},
                                  {"batch", batch_json(m.batch_v)},
                                  {"service", service_json(m.service_v)},
                                  {"xi", m.xi},
                                  {"gamma", m.gamma}};
                    },
                },
                d.inner);
          },
      },
      v);
}

RunBlock parse_run(const json* j) {
  RunBlock r;
  if (j == nullptr) return r;
  Obj o(*j, "$.run");
  if (o.has("j_max")) r.j_max = o.count("j_max", 1);
  if (o.has("n_cycles")) r.n_cycles = o.count("n_cycles", 1);
  if (o.has("seed")) r.seed = o.count("seed", 0);
  if (o.has("replications")) r.replications = static_cast<unsigned>(o.count("replications", 1));
  if (o.has("truncation")) r.truncation = o.count("truncation", 1);
  if (o.has("e_b0")) r.e_b0 = o.positive("e_b0");
  if (const json* t = o.opt("tolerances")) {
    Obj ot(*t, o.at("tolerances"));
    if (ot.has("sup")) r.tolerances.sup = ot.positive("sup");
    if (ot.has("tv")) r.tolerances.tv = ot.positive("tv");
    ot.finish();
  }
  o.finish();
  return r;
}

json run_json(const RunBlock& r) {
  json j{{"j_max", r.j_max},
         {"n_cycles", r.n_cycles},
         {"seed", r.seed},
         {"replications", r.replications},
         {"truncation", r.truncation},
         {"tolerances", {{"sup", r.tolerances.sup}, {"tv", r.tolerances.tv}}}};
  if (r.e_b0) j["e_b0"] = *r.e_b0;
  return j;
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("$: malformed JSON: ") + e.what());
  }
  Obj o(doc, "$");
  const json& version = o.req("schema_version");
  if (!version.is_number_integer() || version.get<int>() != kSchemaVersion) {
    fail("$.schema_version", "unsupported schema version (expected " +
                                 std::to_string(kSchemaVersion) + ")");
  }
  Scenario s{parse_working(o.req("working")), parse_vacation(o.req("vacation")),
             parse_run(o.opt("run"))};
  o.finish();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string scenario_to_json(const Scenario& s) {
  json j{{"schema_version", kSchemaVersion},
         {"working",
          {{"lambda", s.working.lambda},
           {"batch", batch_json(s.working.batch)},
           {"service", service_json(s.working.service)}}},
         {"vacation", vacation_json(s.vacation)},
         {"run", run_json(s.run)}};
  return j.dump(2);
}

}  // namespace mxvac
