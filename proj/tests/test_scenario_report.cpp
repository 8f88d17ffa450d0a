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

#include <cmath>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "mxvac/errors.hpp"
#include "mxvac/report.hpp"
#include "mxvac/scenario.hpp"
#include "oracles.hpp"

using namespace mxvac;
using nlohmann::json;

namespace {

const char* kMM1 = R"({
  "schema_version": 1,
  "working": {"lambda": 1.0, "batch": {"point": 1}, "service": {"kind": "exponential", "rate": 2.0}},
  "vacation": {"model": "multiple_vacations", "lambda_v": 1.0,
               "vacation": {"kind": "exponential", "rate": 0.8}},
  "run": {"j_max": 40, "n_cycles": 2000, "seed": 3, "replications": 4, "truncation": 300}
})";

std::string with_vacation(const std::string& vac) {
  return R"({"schema_version": 1,
    "working": {"lambda": 0.5, "batch": {"pmf": [0, 0.5, 0.5]}, "service": {"kind": "erlang", "phases": 2, "rate": 6}},
    "vacation": )" + vac + "}";
}

std::string error_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("every vacation model parses and round-trips") {
  const char* vacations[] = {
      R"({"model": "multiple_vacations", "lambda_v": 1, "batch": {"geometric": 0.5}, "vacation": {"kind": "deterministic", "value": 1.2}})",
      R"({"model": "markovian_balking", "lambda_v": 1, "admit": {"numerator": [1], "denominator": [1, 1]}, "exit": {"numerator": [1, 1]}, "disaster": 0.2})",
      R"({"model": "hypergeometric_ratio", "numerator_roots": [2, 2], "denominator_roots": [1, 1, [2, -1], [2, 1]]})",
      R"({"model": "binomial_reneging", "lambda_v": 1, "xi": 1, "gamma": 1, "p": 0.5})",
      R"({"model": "disaster_mm1", "lambda_v": 1, "mu_v": 2, "gamma": 1})",
      R"({"model": "disaster_chain_bdp", "a": 0.2, "gamma": 1})",
      R"({"model": "disaster_mxg1", "lambda_v": 1, "service": {"kind": "hyperexponential", "weights": [0.5, 0.5], "rates": [1, 3]}, "xi": 0.5, "gamma": 0.5})",
  };
  for (const char* v : vacations) {
    CAPTURE(v);
    const Scenario s = parse_scenario(with_vacation(v));
    const std::string canon = scenario_to_json(s);
    const Scenario again = parse_scenario(canon);
    CHECK(scenario_to_json(again) == canon);
    const TransferLaw a = transfer_law(s.vacation), b = transfer_law(again.vacation);
    for (double z : {0.0, 0.3, 0.9}) CHECK(a.psi()(z) == b.psi()(z));
  }
}

TEST_CASE("schema errors carry their path") {
  CHECK(error_of(with_vacation(R"({"model": "disaster_mm1", "lambda_v": 1, "gamma": 1})"))
            .find("$.vacation.mu_v") != std::string::npos);
  CHECK(error_of(with_vacation(R"({"model": "disaster_mm1", "lambda_v": 1, "mu_v": 2, "gamma": 1, "typo": 3})"))
            .find("$.vacation.typo: unknown key") != std::string::npos);
  CHECK(error_of(with_vacation(R"({"model": "nope"})")).find("unknown vacation model") != std::string::npos);
  CHECK(error_of(with_vacation(R"({"model": "disaster_chain_bdp", "a": 0.3, "gamma": 1})"))
            .find("$.vacation.a") != std::string::npos);
  CHECK(error_of(with_vacation(R"({"model": "binomial_reneging", "lambda_v": 1, "xi": 1, "gamma": 1, "p": 2})"))
            .find("$.vacation.p") != std::string::npos);
  CHECK(error_of("{").find("malformed JSON") != std::string::npos);

  json doc = json::parse(kMM1);
  doc["working"]["service"]["rate"] = -2.0;
  CHECK(error_of(doc.dump()).find("$.working.service.rate") != std::string::npos);
  doc = json::parse(kMM1);
  doc["schema_version"] = 2;
  CHECK(error_of(doc.dump()).find("$.schema_version") != std::string::npos);
  doc = json::parse(kMM1);
  doc.erase("working");
  CHECK(error_of(doc.dump()).find("$.working: missing required key") != std::string::npos);
  doc = json::parse(kMM1);
  doc["run"]["jmax"] = 3;
  CHECK(error_of(doc.dump()).find("$.run.jmax") != std::string::npos);

  doc = json::parse(kMM1);
  doc["working"]["lambda"] = 2.0;
  CHECK_THROWS_AS(parse_scenario(doc.dump()), StabilityError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), InvalidInput);
}

TEST_CASE("run block defaults and overrides") {
  json doc = json::parse(kMM1);
  doc.erase("run");
  const Scenario d = parse_scenario(doc.dump());
  CHECK(d.run.j_max == 50);
  CHECK(d.run.replications == 16);
  CHECK(d.run.tolerances.sup == 1e-7);
  CHECK_FALSE(d.run.e_b0.has_value());
  doc["run"] = {{"tolerances", {{"tv", 0.05}}}, {"e_b0", 2.5}};
  const Scenario o = parse_scenario(doc.dump());
  CHECK(o.run.tolerances.tv == 0.05);
  CHECK(*o.run.e_b0 == 2.5);
}

TEST_CASE("csv tables round-trip exactly") {
  Table t{"simulated", {0.0, 0.1, 1.0 / 3.0, 2e-17}, {0.0, 1e-3, 2e-3, 3e-3}};
  const std::string csv = t.to_csv();
  CHECK(csv.rfind("j,value,source,stderr\n", 0) == 0);
  const Table back = Table::from_csv(csv);
  CHECK(back.source == "simulated");
  CHECK(back.value == t.value);
  CHECK(back.stderr_ == t.stderr_);
  const Table plain = Table::from_csv(Table{"analytic", {0.5, 0.5}, {}}.to_csv());
  CHECK(plain.stderr_.empty());
  CHECK_THROWS_AS(Table::from_csv("a,b\n1,2\n"), InvalidInput);
}

TEST_CASE("analysis, oracle and simulation agree") {
  const Scenario s = parse_scenario(kMM1);
  const Analysis a = run_analysis(s);
  CHECK(a.load == doctest::Approx(0.5));
  REQUIRE(a.cycles.has_value());
  REQUIRE(a.recursion.has_value());
  CHECK(a.working_law.value.size() == 41);
  for (std::size_t j = 1; j <= 40; ++j) {
    CHECK(a.recursion->value[j] / a.cycles->p1_dot == doctest::Approx(a.working_law.value[j]).epsilon(1e-9));
  }
  const SteadyStateReport r = run_oracle(s);
  const SimulationResult m = run_simulation(s);
  const ComparisonReport c =
      compare_tables({a.working_law, oracle_working_table(r, 40), simulated_working_table(m.report, 40)},
                     s.run.tolerances);
  CHECK(c.pairs.size() == 3);
  CHECK(c.pass);
  for (const PairMetrics& p : c.pairs) {
    CHECK(p.sup >= 0.0);
    CHECK(p.tv >= 0.0);
    CHECK(p.pass == (p.gate == "sup" ? p.sup <= p.threshold : p.tv <= p.threshold));
  }
  CHECK(c.pairs[0].gate == "sup");
  CHECK(c.pairs[1].gate == "tv");
  CHECK(c.pairs[1].max_abs_z.has_value());
  const json j = json::parse(c.to_json());
  CHECK(j["pass"] == true);
  CHECK(j["pairs"].size() == 3);
}

TEST_CASE("perturbed tables fail the comparison") {
  const Scenario s = parse_scenario(kMM1);
  json doc = json::parse(kMM1);
  doc["working"]["lambda"] = 1.1;
  const Analysis a = run_analysis(s);
  const Analysis b = run_analysis(parse_scenario(doc.dump()));
  Table tb = b.working_law;
  tb.source = "oracle";
  const ComparisonReport c = compare_tables({a.working_law, tb}, s.run.tolerances);
  CHECK_FALSE(c.pass);
  CHECK_FALSE(c.pairs[0].pass);
}

TEST_CASE("special case tables: transfer law equal to the batch law") {
  const Scenario s = parse_scenario(R"({"schema_version": 1,
    "working": {"lambda": 0.5, "batch": {"pmf": [0, 0.5, 0.5]}, "service": {"kind": "exponential", "rate": 3}},
    "vacation": {"model": "hypergeometric_ratio", "numerator_roots": [-2], "denominator_roots": [-3], "argument": 2},
    "run": {"j_max": 30, "e_b0": 2.0}})");
  const Analysis a = run_analysis(s);
  CHECK(a.transfer_pmf.value[1] == doctest::Approx(0.5));
  CHECK(a.transfer_pmf.value[2] == doctest::Approx(0.5));
  CHECK(oracle::sup_diff(a.working_law.value, a.busy_law.value) < 1e-12);
}

TEST_CASE("reports embed the scenario and reload to the same evaluation") {
  const Scenario s = parse_scenario(kMM1);
  const Analysis a = run_analysis(s);
  const json j = json::parse(analysis_json(s, a));
  const Scenario back = parse_scenario(j.at("scenario").dump());
  const Analysis b = run_analysis(back);
  CHECK(b.working_law.value == a.working_law.value);
  CHECK(json::parse(analysis_json(back, b)) == j);

  const json o = json::parse(oracle_json(s, run_oracle(s)));
  CHECK(o.contains("scenario"));
  const json m = json::parse(simulation_json(s, run_simulation(s)));
  CHECK(m.contains("scenario"));
}

TEST_CASE("analysis without a vacation length") {
  const Scenario s = parse_scenario(with_vacation(
      R"({"model": "hypergeometric_ratio", "numerator_roots": [], "denominator_roots": [], "argument": 0.3})"));
  const Analysis a = run_analysis(s);
  CHECK_FALSE(a.cycles.has_value());
  CHECK_FALSE(a.recursion.has_value());
  CHECK_THROWS_AS(run_oracle(s), InvalidInput);
  CHECK_THROWS_AS(run_simulation(s), InvalidInput);
}
