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

#include "mxvac/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "mxvac/errors.hpp"

namespace mxvac {

namespace {

using json = nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> head(const std::vector<double>& v, std::size_t n) {
  std::vector<double> out(n + 1, 0.0);
  std::copy_n(v.begin(), std::min(v.size(), n + 1), out.begin());
  return out;
}

json pmf_head(const Pmf& p, std::size_t n) {
  std::vector<double> out(n + 1);
  for (std::size_t j = 0; j <= n; ++j) out[j] = p.at(j);
  return out;
}

json cycles_json(const CycleQuantities& c) {
  return json{{"e_b0", c.e_b0}, {"e_b1", c.e_b1}, {"e_t", c.e_t},
              {"p0_dot", c.p0_dot}, {"p1_dot", c.p1_dot}};
}

double at(const std::vector<double>& v, std::size_t j) { return j < v.size() ? v[j] : 0.0; }

}  // namespace

std::string Table::to_csv() const {
  std::string out = "j,value,source,stderr\n";
  for (std::size_t j = 0; j < value.size(); ++j) {
    out += std::to_string(j) + "," + fmt(value[j]) + "," + source + ",";
    if (!stderr_.empty()) out += fmt(at(stderr_, j));
    out += "\n";
  }
  return out;
}

Table Table::from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "j,value,source,stderr") {
    throw InvalidInput("table: expected the header 'j,value,source,stderr'");
  }
  Table t;
  bool any_se = false;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (cells.size() != 4) throw InvalidInput("table: row " + std::to_string(row + 1) + " needs 4 cells");
    try {
      if (std::stoul(cells[0]) != row) throw InvalidInput("table: rows must be j = 0, 1, ...");
      t.value.push_back(std::stod(cells[1]));
      t.stderr_.push_back(cells[3].empty() ? 0.0 : std::stod(cells[3]));
    } catch (const std::logic_error&) {
      throw InvalidInput("table: unreadable number in row " + std::to_string(row + 1));
    }
    any_se = any_se || !cells[3].empty();
    if (row == 0) {
      t.source = cells[2];
    } else if (cells[2] != t.source) {
      throw InvalidInput("table: mixed sources in one file");
    }
    ++row;
  }
  if (!any_se) t.stderr_.clear();
  return t;
}

Analysis run_analysis(const Scenario& s) {
  const std::size_t n = s.run.j_max;
  Analysis a;
  a.load = s.working.load();
  const TransferLaw tl = transfer_law(s.vacation);
  a.mean_y = tl.mean_y();
  a.working_pmf = extract_coefficients(decomposition_pgf(s.working, tl), n);
  a.working_law = {"analytic", pmf_head(a.working_pmf, n).get<std::vector<double>>(), {}};
  const Pmf busy = extract_coefficients(conditional_busy_pgf(s.working), n);
  a.busy_law = {"analytic", pmf_head(busy, n).get<std::vector<double>>(), {}};
  a.transfer_pmf = {"analytic", tl.probabilities(n), {}};
  std::optional<double> e_b0 = s.run.e_b0 ? s.run.e_b0 : vacation_e_b0(s.vacation);
  if (e_b0) {
    a.cycles = cycle_quantities(s.working, tl, *e_b0);
    const WorkingStateProbs rec = recursive_working_probs(s.working, tl, *a.cycles, n);
    Table t{"recursion", std::vector<double>(n + 1, 0.0), {}};
    for (std::size_t j = 1; j <= n; ++j) t.value[j] = rec.at(j);
    a.recursion = std::move(t);
  }
  return a;
}

SteadyStateReport run_oracle(const Scenario& s) {
  return oracle_report(s.working, s.vacation, s.run.truncation);
}

SimulationResult run_simulation(const Scenario& s) {
  SimConfig cfg{s.working, s.vacation};
  cfg.n_cycles = s.run.n_cycles;
  cfg.seed = s.run.seed;
  cfg.replications = s.run.replications;
  return simulate(cfg);
}

std::string analysis_json(const Scenario& s, const Analysis& a) {
  json j{{"command", "analyze"},
         {"scenario", json::parse(scenario_to_json(s))},
         {"load", a.load},
         {"mean_y", a.mean_y},
         {"cycles", a.cycles ? cycles_json(*a.cycles) : json(nullptr)},
         {"truncation_mass", a.working_pmf.truncation_mass},
         {"working_law", a.working_law.value},
         {"busy_law", a.busy_law.value},
         {"transfer_pmf", a.transfer_pmf.value},
         {"recursion", a.recursion ? json(a.recursion->value) : json(nullptr)}};
  return j.dump(2) + "\n";
}

Table oracle_working_table(const SteadyStateReport& r, std::size_t j_max) {
  return {"oracle", pmf_head(r.working_law, j_max).get<std::vector<double>>(), {}};
}

Table simulated_working_table(const EmpiricalReport& r, std::size_t j_max) {
  return {"simulated", head(r.working_law, j_max), head(r.working_law_se, j_max)};
}

std::string oracle_json(const Scenario& s, const SteadyStateReport& r) {
  const std::size_t n = s.run.j_max;
  json j{{"command", "oracle"},
         {"scenario", json::parse(scenario_to_json(s))},
         {"truncation", r.truncation},
         {"residual", r.residual},
         {"boundary_mass", r.boundary_mass},
         {"boundary_flag", r.boundary_flag},
         {"p0_dot", r.p0_dot},
         {"p1_dot", r.p1_dot},
         {"mean_y", r.e_y},
         {"cycles", {{"e_b0", r.e_b0}, {"e_b1", r.e_b1}, {"rate", r.cycle_rate}}},
         {"working_law", pmf_head(r.working_law, n)},
         {"vacation_law", pmf_head(r.vacation_law, n)},
         {"transfer_pmf", pmf_head(r.transfer_law, n)}};
  return j.dump(2) + "\n";
}

std::string simulation_json(const Scenario& s, const SimulationResult& res) {
  const std::size_t n = s.run.j_max;
  const EmpiricalReport& r = res.report;
  const LevelCrossingAudit audit = level_crossing_audit(res.log);
  auto est = [](double v, double se) { return json{{"value", v}, {"stderr", se}}; };
  json j{{"command", "simulate"},
         {"scenario", json::parse(scenario_to_json(s))},
         {"replications", r.replications},
         {"cycles_per_replication", r.cycles_per_replication},
         {"events", r.events},
         {"p0_dot", est(r.p0_dot, r.p0_dot_se)},
         {"p1_dot", est(r.p1_dot, r.p1_dot_se)},
         {"mean_vacation", est(r.mean_vacation, r.mean_vacation_se)},
         {"mean_working", est(r.mean_working, r.mean_working_se)},
         {"mean_cycle", est(r.mean_cycle, r.mean_cycle_se)},
         {"mean_y", est(r.mean_y, r.mean_y_se)},
         {"y_counts", r.y_counts},
         {"audit",
          {{"cycles_checked", audit.cycles_checked},
           {"crossing_mismatches", audit.mismatches},
           {"max_time_sum_error", audit.max_time_sum_error},
           {"max_subbusy_sum_error", audit.max_subbusy_sum_error},
           {"wald_max_abs_z", r.wald.max_abs_z()},
           {"downcrossing_max_abs_z", r.downcross.max_abs_z()}}},
         {"working_law", head(r.working_law, n)},
         {"working_law_stderr", head(r.working_law_se, n)},
         {"vacation_law", head(r.vacation_law, n)}};
  return j.dump(2) + "\n";
}

std::string ComparisonReport::to_json() const {
  json pj = json::array();
  for (const PairMetrics& p : pairs) {
    pj.push_back({{"a", p.a},
                  {"b", p.b},
                  {"sup", p.sup},
                  {"tv", p.tv},
                  {"max_abs_z", p.max_abs_z ? json(*p.max_abs_z) : json(nullptr)},
                  {"gate", p.gate},
                  {"threshold", p.threshold},
                  {"pass", p.pass}});
  }
  json j{{"command", "compare"}, {"sources", sources}, {"pairs", pj}, {"pass", pass}};
  return j.dump(2) + "\n";
}

ComparisonReport compare_tables(const std::vector<Table>& tables, const Tolerances& tol) {
  if (tables.size() < 2) throw InvalidInput("compare: need at least two sources");
  ComparisonReport rep;
  for (const Table& t : tables) rep.sources.push_back(t.source);
  for (std::size_t i = 0; i < tables.size(); ++i) {
    for (std::size_t k = i + 1; k < tables.size(); ++k) {
      const Table& a = tables[i];
      const Table& b = tables[k];
      PairMetrics m;
      m.a = a.source;
      m.b = b.source;
      const std::size_t len = std::max(a.value.size(), b.value.size());
      const bool has_se = !a.stderr_.empty() || !b.stderr_.empty();
      double zmax = 0.0;
      for (std::size_t j = 0; j < len; ++j) {
        const double d = at(a.value, j) - at(b.value, j);
        m.sup = std::max(m.sup, std::abs(d));
        m.tv += 0.5 * std::abs(d);
        const double se = std::hypot(at(a.stderr_, j), at(b.stderr_, j));
        if (se > 0.0) zmax = std::max(zmax, std::abs(d) / se);
      }
      if (has_se) m.max_abs_z = zmax;
      m.gate = has_se ? "tv" : "sup";
      m.threshold = has_se ? tol.tv : tol.sup;
      m.pass = (has_se ? m.tv : m.sup) <= m.threshold;
      rep.pass = rep.pass && m.pass;
      rep.pairs.push_back(std::move(m));
    }
  }
  return rep;
}

}  // namespace mxvac
