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

// Command-line front end: analyze, simulate, oracle, compare.
//
// Exit codes: 0 success, 1 comparison failed, 2 invalid scenario or usage,
// 3 instability, 4 missing source artifacts, 5 numerical diagnostic failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mxvac/errors.hpp"
#include "mxvac/report.hpp"
#include "mxvac/scenario.hpp"

namespace fs = std::filesystem;
using namespace mxvac;

namespace {

enum Exit { kOk = 0, kCompareFail = 1, kInvalid = 2, kUnstable = 3, kMissing = 4, kDiagnostic = 5 };

struct MissingSource : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string scenario;
  std::string out;
  std::string format = "csv";
  std::optional<std::uint64_t> seed, cycles;
  std::optional<std::size_t> jmax, truncation;
  std::optional<unsigned> replications;
  std::vector<std::string> sources;
};

fs::path out_dir(const Options& o) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv("MXVAC_OUT_DIR"); env && *env) return env;
  return ".";
}

void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path().empty() ? fs::path(".") : p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
  if (!text.empty() && text.back() != '\n') f << '\n';
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Scenario load(const Options& o) {
  Scenario s = load_scenario(o.scenario);
  if (o.seed) s.run.seed = *o.seed;
  if (o.cycles) s.run.n_cycles = *o.cycles;
  if (o.jmax) s.run.j_max = *o.jmax;
  if (o.truncation) s.run.truncation = *o.truncation;
  if (o.replications) s.run.replications = *o.replications;
  if (s.run.n_cycles < 1) throw InvalidInput("--cycles: must be >= 1");
  if (s.run.replications < 1) throw InvalidInput("--replications: must be >= 1");
  return s;
}

int cmd_analyze(const Options& o) {
  const Scenario s = load(o);
  const Analysis a = run_analysis(s);
  const fs::path dir = out_dir(o);
  if (o.format == "csv") {
    write_file(dir / "working_analytic.csv", a.working_law.to_csv());
    Table busy = a.busy_law;
    busy.source = "busy";
    write_file(dir / "busy_analytic.csv", busy.to_csv());
    Table psi = a.transfer_pmf;
    psi.source = "transfer";
    write_file(dir / "transfer_analytic.csv", psi.to_csv());
    if (a.recursion) write_file(dir / "recursion_analytic.csv", a.recursion->to_csv());
  }
  write_file(dir / "analyze.json", analysis_json(s, a));
  return kOk;
}

int cmd_oracle(const Options& o) {
  const Scenario s = load(o);
  const SteadyStateReport r = run_oracle(s);
  const fs::path dir = out_dir(o);
  if (o.format == "csv") write_file(dir / "working_oracle.csv", oracle_working_table(r, s.run.j_max).to_csv());
  write_file(dir / "oracle.json", oracle_json(s, r));
  if (r.boundary_flag) {
    std::cerr << "warning: boundary mass " << r.boundary_mass
              << " exceeds 1e-9; increase --truncation\n";
  }
  return kOk;
}

int cmd_simulate(const Options& o) {
  const Scenario s = load(o);
  const SimulationResult r = run_simulation(s);
  const fs::path dir = out_dir(o);
  if (o.format == "csv") {
    write_file(dir / "working_simulated.csv", simulated_working_table(r.report, s.run.j_max).to_csv());
  }
  write_file(dir / "simulate.json", simulation_json(s, r));
  return kOk;
}

Table load_source(const fs::path& dir, const std::string& src) {
  static const std::map<std::string, std::string> command{
      {"analytic", "analyze"}, {"oracle", "oracle"}, {"simulated", "simulate"}};
  const auto it = command.find(src);
  if (it == command.end()) {
    throw InvalidInput("--sources: unknown source '" + src + "' (expected analytic, oracle, simulated)");
  }
  const fs::path csv = dir / ("working_" + src + ".csv");
  if (fs::exists(csv)) return Table::from_csv(read_file(csv));
  const fs::path js = dir / (it->second + ".json");
  if (!fs::exists(js)) {
    throw MissingSource("missing artifacts for source '" + src + "': neither " + csv.string() +
                        " nor " + js.string() + " exists");
  }
  const auto doc = nlohmann::json::parse(read_file(js));
  Table t{src, doc.at("working_law").get<std::vector<double>>(), {}};
  if (doc.contains("working_law_stderr")) t.stderr_ = doc.at("working_law_stderr").get<std::vector<double>>();
  return t;
}

int cmd_compare(const Options& o) {
  Tolerances tol;
  if (!o.scenario.empty()) tol = load(o).run.tolerances;
  if (o.sources.size() < 2) throw InvalidInput("--sources: give at least two of analytic, oracle, simulated");
  const fs::path dir = out_dir(o);
  std::vector<Table> tables;
  for (const std::string& src : o.sources) tables.push_back(load_source(dir, src));
  const ComparisonReport rep = compare_tables(tables, tol);
  write_file(dir / "comparison.json", rep.to_json());
  for (const PairMetrics& p : rep.pairs) {
    std::cout << p.a << " vs " << p.b << ": sup " << p.sup << ", tv " << p.tv << " ("
              << p.gate << " <= " << p.threshold << ") " << (p.pass ? "pass" : "FAIL") << "\n";
  }
  return rep.pass ? kOk : kCompareFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mxvac: M^X/G/1 queues with general vacation modes"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sub, bool scenario_required) {
    auto* opt = sub->add_option("--scenario", o.scenario, "scenario file (JSON)")->check(CLI::ExistingFile);
    if (scenario_required) opt->required();
    sub->add_option("--out", o.out, "output directory (default: $MXVAC_OUT_DIR or .)");
    sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--jmax", o.jmax, "largest queue length reported");
  };
  auto* analyze = app.add_subcommand("analyze", "decomposition, transfer law and cycle quantities");
  common(analyze, true);
  auto* simulate = app.add_subcommand("simulate", "regenerative simulation");
  common(simulate, true);
  simulate->add_option("--seed", o.seed, "random seed");
  simulate->add_option("--cycles", o.cycles, "cycles per replication");
  simulate->add_option("--replications", o.replications, "independent replications");
  auto* oracle = app.add_subcommand("oracle", "truncated CTMC steady state");
  common(oracle, true);
  oracle->add_option("--truncation", o.truncation, "largest queue length kept in the chain");
  auto* compare = app.add_subcommand("compare", "compare stored working-mode laws");
  common(compare, false);
  compare->add_option("--sources", o.sources, "sources among analytic, oracle, simulated")
      ->delimiter(',')
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  try {
    if (*analyze) return cmd_analyze(o);
    if (*simulate) return cmd_simulate(o);
    if (*oracle) return cmd_oracle(o);
    return cmd_compare(o);
  } catch (const StabilityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUnstable;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const MissingSource& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kMissing;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDiagnostic;
  }
}
