// Python bindings. Structured values cross the boundary as JSON text, which the
// package wrapper turns into dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rcsbench/estimators.h"
#include "rcsbench/io.h"
#include "rcsbench/spinmodel.h"
#include "rcsbench/statevec.h"

namespace py = pybind11;
using namespace rcsbench;

namespace {

IdealDistribution ideal_of(const std::vector<double>& p) {
  int n = 0;
  while ((size_t{1} << n) < p.size()) ++n;
  if ((size_t{1} << n) != p.size()) throw std::invalid_argument("ideal distribution length must be a power of two");
  return IdealDistribution::from_probs(n, p);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Random circuit sampling benchmark core";
  m.attr("__version__") = io::kToolVersion;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def(
      "run_benchmark",
      [](const std::string& config_json) {
        const BenchmarkConfig c = io::config_from_json(io::Json::parse(config_json));
        BenchmarkReport r;
        {
          py::gil_scoped_release release;
          r = rcs_benchmark(c);
        }
        return io::to_json(r).dump();
      },
      py::arg("config_json"), "Run an RCS benchmark from a JSON config; returns the report as JSON text.");

  m.def(
      "config_hash", [](const std::string& config_json) { return io::config_hash(io::Json::parse(config_json)); },
      py::arg("config_json"));

  m.def(
      "sample_circuit",
      [](int n, int d, const std::string& gate_set, const std::string& boundary, uint64_t seed) {
        return io::to_json(sample_rqc(n, d, parse_gate_set(gate_set), parse_boundary(boundary), seed)).dump();
      },
      py::arg("n"), py::arg("d"), py::arg("gate_set") = "haar2q", py::arg("boundary") = "ring", py::arg("seed") = 0,
      "Sample a random circuit; returns its JSON text.");

  m.def(
      "ideal_probabilities",
      [](const std::string& circuit_json) {
        return probabilities(run_circuit(io::circuit_from_json(io::Json::parse(circuit_json))));
      },
      py::arg("circuit_json"));

  m.def(
      "uxeb_full", [](const std::vector<double>& q, const std::vector<double>& p) { return uxeb_full(q, ideal_of(p)).value; },
      py::arg("q"), py::arg("p"));
  m.def(
      "xeb_full", [](const std::vector<double>& q, const std::vector<double>& p) { return xeb_full(q, ideal_of(p)).value; },
      py::arg("q"), py::arg("p"));
  m.def(
      "uxeb_samples",
      [](const std::vector<uint64_t>& s, const std::vector<double>& p) { return uxeb_samples(s, ideal_of(p)).value; },
      py::arg("samples"), py::arg("p"));

  m.def("expected_overlap_sq", &spin::expected_overlap_sq, py::arg("n"), py::arg("l"), py::arg("pauli"),
        "Exact circuit average of |<psi_l|psi>|^2 for a Pauli error after layer l.");
  m.def("decay_bound", &spin::decay_bound, py::arg("n"), py::arg("l"));
  m.def("haar_limit", &spin::haar_limit, py::arg("n"));
}
