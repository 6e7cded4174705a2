#include "rcsbench/presets.h"

namespace rcsbench {

namespace {

// Preset model names as used in preset labels, and the noise module names.
const std::vector<std::pair<std::string, std::string>> kModels{
    {"t1t2", "t1t2"}, {"pauli-x", "pauli_x"}, {"corr-xx", "corr_xx"}, {"weight-nm1", "weight_nm1"}};

const std::vector<std::pair<std::string, double>> kLambdas{{"0.05", 0.05}, {"0.1", 0.1}, {"0.15", 0.15}};

const std::vector<std::pair<std::string, double>> kAlphas{
    {"0", 0.0}, {"0.1", 0.1}, {"0.25", 0.25}, {"0.5", 0.5}, {"1", 1.0}};

std::vector<int> range(int lo, int hi) {
  std::vector<int> v;
  for (int d = lo; d <= hi; ++d) v.push_back(d);
  return v;
}

std::string model_noise_name(const std::string& label) {
  for (const auto& [l, m] : kModels)
    if (l == label) return m;
  throw ConfigError("unknown model label '" + label + "'");
}

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

}  // namespace

std::vector<PresetInfo> list_presets() {
  std::vector<PresetInfo> out;
  for (const auto& [label, _] : kModels)
    out.push_back({"table1-" + label, "benchmark", "MCWF RCS benchmark, n=20, lambda_true=0.05, depths 20-50"});
  for (const auto& [label, _] : kModels)
    for (const auto& [ls, __] : kLambdas)
      for (const char* gs : {"", "-cnot"})
        out.push_back({"table4-" + label + "-l" + ls + gs, "benchmark",
                       std::string("RCS benchmark, n=10, lambda_true=") + ls +
                           (*gs ? ", CNOT + single-qubit Haar" : ", two-qubit Haar")});
  out.push_back({"noiseless", "benchmark", "zero-noise sanity run, n=6, density"});
  out.push_back({"fig6-weight-nm1", "rb", "simultaneous RB vs uXEB under weight-(n-1) X noise, n=10"});
  out.push_back({"fig6-pauli-x", "rb", "simultaneous RB vs uXEB under local X noise, n=10"});
  for (const auto& [as, _] : kAlphas)
    out.push_back({"fig7-alpha" + as, "virtual-exp", "correlated ZZ extraction, n=10, gamma3=0.02*alpha"});
  out.push_back({"fig11-haar2q", "variance", "Var(sum A_l), n=8, two-qubit Haar"});
  out.push_back({"fig11-cnot", "variance", "Var(sum A_l), n=8, CNOT + single-qubit Haar"});
  out.push_back({"fig11", "variance", "Var(sum A_l), n=8, both gate sets"});
  out.push_back({"fig9", "spinmodel", "first-order fidelity terms, n=20, eps=0.001"});
  out.push_back({"fig10", "spinmodel", "second moment of a 1-local Pauli vs depth, n=20"});
  return out;
}

BenchmarkConfig benchmark_preset(const std::string& name, std::optional<int> n_override) {
  BenchmarkConfig c;
  c.name = name;
  c.gate_set = GateSet::haar2q;
  c.boundary = Boundary::ring;
  c.master_seed = 20210101;
  if (name == "noiseless") {
    c.n = n_override.value_or(6);
    c.depths = range(1, 10);
    c.L = 20;
    c.backend = c.n <= kMaxDensityQubits ? Backend::density : Backend::mcwf;
    c.trajectories = 1;
    c.estimators = {EstimatorKind::F, EstimatorKind::uXEB, EstimatorKind::XEB};
    return c;
  }
  if (starts_with(name, "table1-")) {
    const std::string label = name.substr(7);
    c.n = n_override.value_or(20);
    c.noise = preset_model(model_noise_name(label), c.n, 0.05, c.boundary);
    c.depths = range(c.n, (5 * c.n + 1) / 2);
    c.fit_min = c.n;
    c.fit_max = c.depths.back();
    c.L = 100;
    c.backend = Backend::mcwf;
    c.trajectories = 400;
    c.estimators = {EstimatorKind::F, EstimatorKind::uXEB, EstimatorKind::XEB, EstimatorKind::logXEB,
                    EstimatorKind::HOG};
    return c;
  }
  if (starts_with(name, "table4-")) {
    std::string rest = name.substr(7);
    bool cnot = false;
    if (rest.size() > 5 && rest.substr(rest.size() - 5) == "-cnot") {
      cnot = true;
      rest.resize(rest.size() - 5);
    }
    const auto pos = rest.rfind("-l");
    if (pos == std::string::npos) throw ConfigError("unknown preset '" + name + "'");
    const std::string label = rest.substr(0, pos), ls = rest.substr(pos + 2);
    double lambda = -1;
    for (const auto& [s, v] : kLambdas)
      if (s == ls) lambda = v;
    if (lambda < 0) throw ConfigError("unknown preset '" + name + "'");
    c.n = n_override.value_or(10);
    c.gate_set = cnot ? GateSet::cnot_haar1q : GateSet::haar2q;
    c.noise = preset_model(model_noise_name(label), c.n, lambda, c.boundary);
    if (cnot)
      c.depths = range(20, 34);
    else
      c.depths = range(c.n, (5 * c.n + 1) / 2);
    c.fit_min = c.depths.front();
    c.fit_max = c.depths.back();
    c.L = 100;
    c.backend = c.n <= kMaxDensityQubits ? Backend::density : Backend::mcwf;
    c.trajectories = 400;
    return c;
  }
  throw ConfigError("unknown benchmark preset '" + name + "'");
}

RbConfig rb_preset(const std::string& name, std::optional<int> n) {
  RbConfig r;
  r.n = n.value_or(10);
  r.seed = 20210106;
  r.lengths = {1, 2, 3, 4, 6, 8, 12, 16, 24, 32};
  r.sequences = 20;
  r.backend = r.n <= kMaxDensityQubits ? Backend::density : Backend::mcwf;
  if (name == "fig6-weight-nm1")
    r.noise = preset_model("weight_nm1", r.n, 0.05);
  else if (name == "fig6-pauli-x")
    r.noise = preset_model("pauli_x", r.n, 0.05);
  else
    throw ConfigError("unknown rb preset '" + name + "'");
  return r;
}

BenchmarkConfig rb_comparison_preset(const RbConfig& rb) {
  BenchmarkConfig c;
  c.name = "rb-comparison";
  c.n = rb.n;
  c.boundary = rb.boundary;
  c.noise = rb.noise;
  c.depths = range(rb.n, (5 * rb.n + 1) / 2);
  c.L = 50;
  c.backend = rb.n <= kMaxDensityQubits ? Backend::density : Backend::mcwf;
  c.trajectories = 200;
  c.circuit_mode = CircuitMode::prefix;
  c.master_seed = rb.seed + 1;
  c.threads = rb.threads;
  return c;
}

VirtualConfig virtual_preset(const std::string& name, std::optional<int> n) {
  if (!starts_with(name, "fig7-alpha")) throw ConfigError("unknown virtual-exp preset '" + name + "'");
  const std::string as = name.substr(10);
  double alpha = -1;
  for (const auto& [s, v] : kAlphas)
    if (s == as) alpha = v;
  if (alpha < 0) throw ConfigError("unknown virtual-exp preset '" + name + "'");
  VirtualConfig v;
  v.n = n.value_or(10);
  v.gamma1 = 0.01;
  v.gamma2 = 0.02;
  v.gamma3 = 0.02 * alpha;
  v.seed = 20210107;
  v.t_max = 20;
  v.backend = v.n <= kMaxDensityQubits ? Backend::density : Backend::mcwf;
  v.rcs.name = name;
  v.rcs.n = v.n;
  v.rcs.depths = alpha >= 1.0 ? range(12, 22) : range(12, 40);
  v.rcs.fit_min = v.rcs.depths.front();
  v.rcs.fit_max = v.rcs.depths.back();
  v.rcs.L = 50;
  v.rcs.backend = v.backend;
  v.rcs.trajectories = 200;
  v.rcs.circuit_mode = CircuitMode::prefix;
  v.rcs.estimators = {EstimatorKind::F, EstimatorKind::uXEB};
  v.rcs.master_seed = v.seed;
  return v;
}

VarianceConfig variance_preset(const std::string& name, std::optional<int> n) {
  VarianceConfig v;
  v.n = n.value_or(8);
  v.depths = range(1, 30);
  v.L = 400;
  v.seed = 20210111;
  if (name == "fig11-haar2q")
    v.gate_sets = {GateSet::haar2q};
  else if (name == "fig11-cnot")
    v.gate_sets = {GateSet::cnot_haar1q};
  else if (name != "fig11")
    throw ConfigError("unknown variance preset '" + name + "'");
  return v;
}

SpinConfig spin_preset(const std::string& name, std::optional<int> n) {
  SpinConfig s;
  s.n = n.value_or(20);
  if (name == "fig9") {
    s.l_max = 30;
    s.d_max = 30;
    s.eps = 0.001;
  } else if (name == "fig10") {
    s.l_max = 40;
    s.d_max = 40;
  } else {
    throw ConfigError("unknown spinmodel preset '" + name + "'");
  }
  return s;
}

}  // namespace rcsbench
