// Python bindings: moment operators, gaps, depth formulas, gate-set
// diagnostics and the CLI commands.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "designgap/bounds.hpp"
#include "designgap/commands.hpp"
#include "designgap/gate_gap.hpp"
#include "designgap/moment.hpp"

namespace py = pybind11;
using namespace designgap;

namespace {

GateEnsemble make_ensemble(const std::vector<CMatrix>& unitaries, std::vector<double> probabilities) {
  if (probabilities.empty()) return GateEnsemble::uniform(unitaries);
  if (probabilities.size() != unitaries.size()) throw EnsembleError("need one probability per unitary");
  std::vector<GateMember> members;
  for (std::size_t i = 0; i < unitaries.size(); ++i) members.push_back({probabilities[i], unitaries[i]});
  return GateEnsemble(std::move(members));
}

py::dict depth_dict(const DepthBound& d) {
  py::dict out;
  out["formula"] = d.formula;
  out["depth"] = d.depth;
  out["depth_log2"] = d.depth_log2;
  for (const auto& [k, v] : d.inputs) out[k.c_str()] = v;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral gaps and design-depth bounds of random circuits";

  // Translators run newest first, so the base class goes first.
  py::register_exception<Error>(m, "EngineError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("haar_projector", [](Index q, int t) { return haar_projector(q, t).matrix(); }, py::arg("q"), py::arg("t"));
  m.def("haar_rank", [](Index q, int t) { return haar_projector(q, t).rank(); }, py::arg("q"), py::arg("t"));

  m.def(
      "moment_operator",
      [](const std::vector<CMatrix>& unitaries, std::vector<double> probabilities, int t) {
        return moment_operator(make_ensemble(unitaries, std::move(probabilities)), t).matrix;
      },
      py::arg("unitaries"), py::arg("probabilities") = std::vector<double>{}, py::arg("t") = 1);

  m.def(
      "spectral_gap",
      [](const std::vector<CMatrix>& unitaries, std::vector<double> probabilities, int t) {
        const GateEnsemble e = make_ensemble(unitaries, std::move(probabilities));
        return spectral_gap(moment_operator(e, t), cached_haar_projector(e.dim(), t)).gap;
      },
      py::arg("unitaries"), py::arg("probabilities") = std::vector<double>{}, py::arg("t") = 1);

  m.def(
      "radius_relation",
      [](const std::vector<CMatrix>& unitaries, std::vector<double> probabilities, int t) {
        const RelationEntry r = radius_relation_check(make_ensemble(unitaries, std::move(probabilities)), t);
        py::dict out;
        out["t"] = r.t;
        out["gap"] = r.gap;
        out["radius"] = r.radius;
        out["relation_residual"] = r.relation_residual;
        return out;
      },
      py::arg("unitaries"), py::arg("probabilities") = std::vector<double>{}, py::arg("t") = 1);

  m.def("phase_distance", &phase_distance, py::arg("v"), py::arg("u"));
  m.def("parse_gate", &parse_gate, py::arg("expr"), py::arg("dim") = 0);

  m.def(
      "haar_depth",
      [](double gap_h, int n, int t, int d, double eps) { return depth_dict(haar_depth(gap_h, n, t, d, eps)); },
      py::arg("gap_haar"), py::arg("n"), py::arg("t"), py::arg("d") = 2, py::arg("eps") = 0.01);
  m.def(
      "theorem1_depth",
      [](double local_gap_avg, double gap_h, int n, int t, int d, double eps) {
        return depth_dict(theorem1_depth(local_gap_avg, haar_depth(gap_h, n, t, d, eps)));
      },
      py::arg("local_gap"), py::arg("gap_haar"), py::arg("n"), py::arg("t"), py::arg("d") = 2,
      py::arg("eps") = 0.01);
  m.def(
      "patchwork_depth",
      [](int n, int t, double eps, double local_gap, double c0) {
        const PatchworkDepth p = patchwork_depth(n, t, eps, local_gap, c0);
        py::dict out;
        out["xi"] = p.xi;
        out["m_haar"] = p.m_haar;
        out["m"] = p.m;
        out["c0"] = p.c0;
        return out;
      },
      py::arg("n"), py::arg("t"), py::arg("eps"), py::arg("local_gap") = 1.0, py::arg("c0") = 1.0);
  m.def("h_exponent", &h_exponent, py::arg("n"));

  m.def(
      "run",
      [](const std::string& command, const std::string& config_json, const std::string& format) {
        const CommandResult r = run_command(command, parse_config(config_json));
        py::dict out;
        out["report"] = format == "json" ? to_json(r.report) : to_csv(r.report);
        out["checks_failed"] = r.checks_failed;
        out["truncated"] = r.truncated;
        out["exit_status"] = exit_status(r, false);
        return out;
      },
      py::arg("command"), py::arg("config_json"), py::arg("format") = "json");
}
