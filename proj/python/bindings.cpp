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

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mxvac/ctmc.hpp"
#include "mxvac/errors.hpp"
#include "mxvac/mxg1.hpp"
#include "mxvac/report.hpp"
#include "mxvac/scenario.hpp"
#include "mxvac/simulator.hpp"
#include "mxvac/vacation.hpp"

namespace py = pybind11;
using namespace mxvac;

namespace {

std::vector<double> pmf_head(const Pmf& p, std::size_t n) {
  std::vector<double> out(n + 1);
  for (std::size_t j = 0; j <= n; ++j) out[j] = p.at(j);
  return out;
}

py::dict cycles_dict(const CycleQuantities& c) {
  py::dict d;
  d["e_b0"] = c.e_b0;
  d["e_b1"] = c.e_b1;
  d["e_t"] = c.e_t;
  d["p0_dot"] = c.p0_dot;
  d["p1_dot"] = c.p1_dot;
  return d;
}

// Python-facing holder; the variant alternatives are not default-constructible.
struct Vacation {
  VacationModelSpec spec;
};

RateSequence to_rate(const py::object& o) {
  if (py::isinstance<RateSequence>(o)) return o.cast<RateSequence>();
  return RateSequence::constant(o.cast<double>());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "M^X/G/1 queues with general vacation modes";

  py::register_exception<StabilityError>(m, "StabilityError", PyExc_RuntimeError);
  py::register_exception<DiagnosticFailure>(m, "DiagnosticFailure", PyExc_RuntimeError);

  py::class_<ServiceLaw>(m, "ServiceLaw")
      .def_static("exponential", &ServiceLaw::exponential, py::arg("rate"))
      .def_static("erlang", &ServiceLaw::erlang, py::arg("phases"), py::arg("rate"))
      .def_static("deterministic", &ServiceLaw::deterministic, py::arg("value"))
      .def_static("hyperexponential", &ServiceLaw::hyperexponential, py::arg("weights"),
                  py::arg("rates"))
      .def_property_readonly("name", &ServiceLaw::name)
      .def_property_readonly("mean", &ServiceLaw::mean)
      .def("lst", &ServiceLaw::lst, py::arg("s"))
      .def("__repr__", [](const ServiceLaw& s) { return "ServiceLaw(" + s.name() + ")"; });

  py::class_<BatchLaw>(m, "BatchLaw")
      .def_static(
          "from_pmf", [](std::vector<double> w) { return BatchLaw::from_pmf(Pmf::from_weights(std::move(w))); },
          py::arg("weights"), "Batch-size law from P(B = 0), P(B = 1), ...; P(B = 0) must vanish.")
      .def_static("point", &BatchLaw::point, py::arg("k"))
      .def_static("geometric", &BatchLaw::geometric, py::arg("p"))
      .def_property_readonly("mean", &BatchLaw::mean)
      .def("prob", &BatchLaw::prob)
      .def("__repr__", [](const BatchLaw& b) { return "BatchLaw(" + b.describe() + ")"; });

  py::class_<WorkingModeSpec>(m, "WorkingMode")
      .def(py::init([](double lambda, BatchLaw batch, ServiceLaw service) {
             WorkingModeSpec w{lambda, std::move(batch), std::move(service)};
             w.validate();
             return w;
           }),
           py::arg("lam"), py::arg("batch"), py::arg("service"))
      .def_readonly("lam", &WorkingModeSpec::lambda)
      .def_property_readonly("load", &WorkingModeSpec::load);

  py::class_<RateSequence>(m, "RateSequence")
      .def_static("constant", &RateSequence::constant)
      .def_static("rational", &RateSequence::rational, py::arg("numerator"),
                  py::arg("denominator") = std::vector<double>{1.0})
      .def("__call__", &RateSequence::operator());

  py::class_<Vacation>(m, "Vacation")
      .def_static(
          "multiple",
          [](double lv, ServiceLaw v, std::optional<BatchLaw> b) {
            return Vacation{MultipleVacations{lv, b ? *b : BatchLaw::point(1), std::move(v)}};
          },
          py::arg("lambda_v"), py::arg("vacation"), py::arg("batch") = py::none())
      .def_static(
          "markovian",
          [](double lv, py::object admit, py::object exit, py::object disaster) {
            return Vacation{MarkovianBalking{lv, to_rate(admit), to_rate(exit), to_rate(disaster)}};
          },
          py::arg("lambda_v"), py::arg("admit"), py::arg("exit"), py::arg("disaster") = 0.0)
      .def_static(
          "hypergeometric",
          [](std::vector<cplx> a, std::vector<cplx> b, double x) {
            return Vacation{HypergeometricRatio{std::move(a), std::move(b), x}};
          },
          py::arg("numerator_roots"), py::arg("denominator_roots"), py::arg("argument") = 1.0)
      .def_static(
          "binomial_reneging",
          [](double lv, double xi, double g, double p) { return Vacation{BinomialReneging{lv, xi, g, p}}; },
          py::arg("lambda_v"), py::arg("xi"), py::arg("gamma"), py::arg("p"))
      .def_static(
          "disaster_mm1",
          [](double lv, double mu, double g) { return Vacation{DisasterCoupled{MM1Inner{lv, mu, g}}}; },
          py::arg("lambda_v"), py::arg("mu_v"), py::arg("gamma"))
      .def_static(
          "disaster_chain_bdp",
          [](double a, double g) { return Vacation{DisasterCoupled{ChainBDPInner{a, g}}}; },
          py::arg("a"), py::arg("gamma"))
      .def_static(
          "disaster_mxg1",
          [](double lv, BatchLaw b, ServiceLaw s, double xi, double g) {
            return Vacation{DisasterCoupled{MXG1DisasterInner{lv, std::move(b), std::move(s), xi, g}}};
          },
          py::arg("lambda_v"), py::arg("batch"), py::arg("service"), py::arg("xi"), py::arg("gamma"))
      .def_property_readonly("name", [](const Vacation& v) { return model_name(v.spec); })
      .def("__repr__", [](const Vacation& v) { return "Vacation(" + model_name(v.spec) + ")"; });

  py::class_<TransferLaw>(m, "TransferLaw")
      .def_property_readonly("mean", &TransferLaw::mean_y)
      .def("probabilities", &TransferLaw::probabilities, py::arg("n_max"))
      .def("pgf", [](const TransferLaw& t, cplx z) { return t.psi()(z); }, py::arg("z"));

  m.def("transfer_law", [](const Vacation& v) { return transfer_law(v.spec); }, py::arg("vacation"));
  m.def("vacation_e_b0", [](const Vacation& v) { return vacation_e_b0(v.spec); }, py::arg("vacation"));

  m.def(
      "decomposition",
      [](const WorkingModeSpec& w, const Vacation& vac, std::size_t j_max) {
        return pmf_head(extract_coefficients(decomposition_pgf(w, transfer_law(vac.spec)), j_max), j_max);
      },
      py::arg("working"), py::arg("vacation"), py::arg("j_max"),
      "Conditional working-mode law P(L = j | working), j = 0..j_max.");
  m.def(
      "conditional_busy_law",
      [](const WorkingModeSpec& w, std::size_t j_max) {
        return pmf_head(extract_coefficients(conditional_busy_pgf(w), j_max), j_max);
      },
      py::arg("working"), py::arg("j_max"));
  m.def(
      "cycle_quantities",
      [](const WorkingModeSpec& w, const Vacation& vac, std::optional<double> e_b0) {
        const std::optional<double> e = e_b0 ? e_b0 : vacation_e_b0(vac.spec);
        if (!e) throw InvalidInput("cycle_quantities: the model does not determine E[B0]; pass e_b0");
        return cycles_dict(cycle_quantities(w, transfer_law(vac.spec), *e));
      },
      py::arg("working"), py::arg("vacation"), py::arg("e_b0") = py::none());
  m.def(
      "recursive_working_probs",
      [](const WorkingModeSpec& w, const Vacation& vac, std::size_t j_max) {
        const auto e = vacation_e_b0(vac.spec);
        if (!e) throw InvalidInput("recursive_working_probs: the model does not determine E[B0]");
        const TransferLaw tl = transfer_law(vac.spec);
        const WorkingStateProbs p = recursive_working_probs(w, tl, cycle_quantities(w, tl, *e), j_max);
        std::vector<double> out(j_max + 1, 0.0);
        for (std::size_t j = 1; j <= j_max; ++j) out[j] = p.at(j);
        return out;
      },
      py::arg("working"), py::arg("vacation"), py::arg("j_max"),
      "p_(1,j), j = 0..j_max (entry 0 is zero).");
  m.def("a_coefficients", &a_coefficients, py::arg("working"), py::arg("j_max"),
        py::arg("tolerance") = 1e-7);

  m.def(
      "oracle",
      [](const WorkingModeSpec& w, const Vacation& vac, std::size_t truncation) {
        const SteadyStateReport r = oracle_report(w, vac.spec, truncation);
        py::dict d;
        d["p0"] = r.p0;
        d["p1"] = r.p1;
        d["p0_dot"] = r.p0_dot;
        d["p1_dot"] = r.p1_dot;
        d["working_law"] = r.working_law.dense();
        d["vacation_law"] = r.vacation_law.dense();
        d["transfer_pmf"] = r.transfer_law.dense();
        d["mean_y"] = r.e_y;
        d["e_b0"] = r.e_b0;
        d["boundary_mass"] = r.boundary_mass;
        d["residual"] = r.residual;
        return d;
      },
      py::arg("working"), py::arg("vacation"), py::arg("truncation") = 400);

  m.def(
      "simulate",
      [](const WorkingModeSpec& w, const Vacation& vac, std::uint64_t n_cycles,
         std::uint64_t seed, unsigned replications) {
        SimConfig cfg{w, vac.spec};
        cfg.n_cycles = n_cycles;
        cfg.seed = seed;
        cfg.replications = replications;
        SimulationResult r;
        {
          py::gil_scoped_release release;
          r = simulate(cfg);
        }
        const LevelCrossingAudit audit = level_crossing_audit(r.log);
        py::dict d;
        d["p0_dot"] = r.report.p0_dot;
        d["p1_dot"] = r.report.p1_dot;
        d["p1_dot_stderr"] = r.report.p1_dot_se;
        d["working_law"] = r.report.working_law;
        d["working_law_stderr"] = r.report.working_law_se;
        d["vacation_law"] = r.report.vacation_law;
        d["y_counts"] = r.report.y_counts;
        d["mean_y"] = r.report.mean_y;
        d["crossing_mismatches"] = audit.mismatches;
        d["max_time_sum_error"] = audit.max_time_sum_error;
        return d;
      },
      py::arg("working"), py::arg("vacation"), py::arg("n_cycles") = 10000, py::arg("seed") = 1,
      py::arg("replications") = 16);

  m.def("hypergeometric_pfq",
        [](std::vector<cplx> a, std::vector<cplx> b, cplx z) { return hypergeometric_pfq(a, b, z); },
        py::arg("a"), py::arg("b"), py::arg("z"));
  m.def("mm1_disaster_rho", [](double lv, double mu, double g) { return mm1_disaster_rho({lv, mu, g}); },
        py::arg("lambda_v"), py::arg("mu_v"), py::arg("gamma"));
  m.def(
      "chain_bdp_rates",
      [](double a, std::size_t n) {
        const ChainRates r = chain_bdp_rates(a, n);
        return std::make_pair(r.birth, r.death);
      },
      py::arg("a"), py::arg("n"));

  m.def(
      "analyze_scenario",
      [](const std::string& text) {
        const Scenario s = parse_scenario(text);
        return analysis_json(s, run_analysis(s));
      },
      py::arg("text"), "Runs the analytic route on a scenario document; returns the JSON summary.");
  m.def(
      "normalize_scenario", [](const std::string& text) { return scenario_to_json(parse_scenario(text)); },
      py::arg("text"));
}
