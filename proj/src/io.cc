#include "rcsbench/io.h"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace rcsbench::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw ConfigError(what); }

template <class T>
T get(const Json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    bad(where + ": field '" + key + "': " + e.what());
  }
}

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) bad(where + ": expected a JSON object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) bad(where + ": unknown key '" + k + "'");
}

Json matrix_to_json(const CMatrix& m) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) a.push_back({m(r, c).real(), m(r, c).imag()});
  return a;
}

CMatrix matrix_from_json(const Json& a, size_t dim) {
  if (!a.is_array() || a.size() != dim * dim) bad("circuit: gate matrix must hold dim*dim [re, im] pairs");
  CMatrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (size_t i = 0; i < dim * dim; ++i) {
    const auto& e = a[i];
    if (!e.is_array() || e.size() != 2) bad("circuit: matrix entries must be [re, im]");
    m(static_cast<Eigen::Index>(i / dim), static_cast<Eigen::Index>(i % dim)) =
        Complex(e[0].get<double>(), e[1].get<double>());
  }
  return m;
}

Json optional_double(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json to_json(const Circuit& c) {
  Json layers = Json::array();
  Json injected = Json::array();
  for (size_t i = 0; i < c.layers.size(); ++i) {
    Json gates = Json::array();
    for (const auto& g : c.layers[i].gates) gates.push_back({{"targets", g.targets}, {"matrix", matrix_to_json(g.matrix)}});
    layers.push_back(std::move(gates));
    if (c.layers[i].injected) injected.push_back(i);
  }
  return {{"n", c.n},
          {"depth", c.depth()},
          {"boundary", to_string(c.boundary)},
          {"gate_set", to_string(c.gate_set)},
          {"seed", c.seed},
          {"layers", std::move(layers)},
          {"injected_layers", std::move(injected)}};
}

Circuit circuit_from_json(const Json& j) {
  check_keys(j, {"n", "depth", "boundary", "gate_set", "seed", "layers", "injected_layers"}, "circuit");
  Circuit c;
  c.n = get<int>(j, "n", "circuit");
  try {
    c.boundary = parse_boundary(get<std::string>(j, "boundary", "circuit"));
    c.gate_set = parse_gate_set(get<std::string>(j, "gate_set", "circuit"));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    bad(std::string("circuit: ") + e.what());
  }
  c.seed = get<uint64_t>(j, "seed", "circuit");
  std::set<size_t> inj;
  if (j.contains("injected_layers"))
    for (const auto& v : j["injected_layers"]) inj.insert(v.get<size_t>());
  const auto& layers = j.at("layers");
  for (size_t i = 0; i < layers.size(); ++i) {
    Layer layer;
    layer.injected = inj.count(i) > 0;
    for (const auto& g : layers[i]) {
      check_keys(g, {"targets", "matrix"}, "circuit gate");
      Gate gate;
      gate.targets = g.at("targets").get<std::vector<int>>();
      gate.matrix = matrix_from_json(g.at("matrix"), size_t{1} << gate.targets.size());
      layer.gates.push_back(std::move(gate));
    }
    c.layers.push_back(std::move(layer));
  }
  if (j.contains("depth") && j["depth"].get<int>() != c.depth()) bad("circuit: depth does not match layers");
  try {
    validate_circuit(c);
  } catch (const std::exception& e) {
    bad(std::string("circuit: ") + e.what());
  }
  return c;
}

Json to_json(const NoiseModel& m) {
  Json terms = Json::array();
  for (const auto& t : m.terms) {
    Json o = {{"kind", to_string(t.kind)}, {"support", t.support}, {"gamma", t.gamma}};
    if (t.kind == TermKind::pauli_string) o["pauli"] = t.pauli;
    terms.push_back(std::move(o));
  }
  Json j = {{"n", m.n}, {"terms", std::move(terms)}};
  if (!m.name.empty()) j["name"] = m.name;
  return j;
}

NoiseModel noise_model_from_json(const Json& j) {
  check_keys(j, {"n", "terms", "name"}, "noise model");
  const int n = get<int>(j, "n", "noise model");
  std::vector<CollapseTerm> terms;
  for (const auto& t : j.at("terms")) {
    check_keys(t, {"kind", "support", "gamma", "pauli"}, "noise term");
    CollapseTerm term;
    try {
      term.kind = parse_term_kind(get<std::string>(t, "kind", "noise term"));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      bad(std::string("noise term: ") + e.what());
    }
    term.support = get<std::vector<int>>(t, "support", "noise term");
    term.gamma = get<double>(t, "gamma", "noise term");
    if (t.contains("pauli")) term.pauli = t["pauli"].get<std::string>();
    terms.push_back(std::move(term));
  }
  try {
    return make_model(n, std::move(terms), j.value("name", std::string{}));
  } catch (const std::invalid_argument& e) {
    bad(e.what());
  }
}

std::optional<NoiseModel> noise_from_spec(const Json& spec, int n, Boundary boundary) {
  auto preset = [&](const std::string& name, double lambda) {
    try {
      return preset_model(name, n, lambda, boundary);
    } catch (const std::invalid_argument& e) {
      bad(std::string("noise: ") + e.what());
    }
  };
  if (spec.is_null()) return std::nullopt;
  if (spec.is_string()) return preset(spec.get<std::string>(), 0.05);
  if (spec.is_object() && spec.contains("preset")) {
    check_keys(spec, {"preset", "lambda"}, "noise preset");
    return preset(get<std::string>(spec, "preset", "noise preset"), spec.value("lambda", 0.05));
  }
  NoiseModel m = noise_model_from_json(spec);
  if (m.n != n) bad("noise: model n differs from config n");
  return m;
}

std::vector<int> parse_depths(const std::string& s) {
  std::vector<int> out;
  try {
    if (s.find(':') != std::string::npos) {
      std::vector<int> parts;
      std::stringstream ss(s);
      std::string item;
      while (std::getline(ss, item, ':')) parts.push_back(std::stoi(item));
      if (parts.size() < 2 || parts.size() > 3) bad("depths: expected from:to or from:to:step");
      const int step = parts.size() == 3 ? parts[2] : 1;
      if (step < 1) bad("depths: step must be >= 1");
      for (int d = parts[0]; d <= parts[1]; d += step) out.push_back(d);
    } else {
      std::stringstream ss(s);
      std::string item;
      while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    bad("depths: cannot parse '" + s + "'");
  }
  if (out.empty()) bad("depths: empty list");
  return out;
}

std::pair<int, int> parse_range(const std::string& s) {
  const auto pos = s.find_first_of(":,-");
  if (pos == std::string::npos) bad("fit range: expected lo:hi");
  try {
    return {std::stoi(s.substr(0, pos)), std::stoi(s.substr(pos + 1))};
  } catch (const std::exception&) {
    bad("fit range: cannot parse '" + s + "'");
  }
}

Json to_json(const BenchmarkConfig& c) {
  Json est = Json::array();
  for (auto k : c.estimators) est.push_back(to_string(k));
  Json j = {{"name", c.name},
            {"n", c.n},
            {"depths", c.depths},
            {"circuits", c.L},
            {"backend", to_string(c.backend)},
            {"trajectories", c.trajectories},
            {"samples", c.samples},
            {"gate_set", to_string(c.gate_set)},
            {"boundary", to_string(c.boundary)},
            {"noise", c.noise ? to_json(*c.noise) : Json("none")},
            {"estimators", std::move(est)},
            {"seed", c.master_seed},
            {"circuit_mode", to_string(c.circuit_mode)},
            {"dfe_paulis", c.dfe_paulis}};
  if (c.fit_min || c.fit_max) {
    const auto [lo, hi] = default_fit_range(c);
    j["fit_range"] = {lo, hi};
  }
  j["integrator"] = c.integrator == LindbladIntegrator::rk4     ? "rk4"
                    : c.integrator == LindbladIntegrator::exact ? "exact"
                                                                : "automatic";
  return j;
}

BenchmarkConfig config_from_json(const Json& j) {
  const std::string w = "config";
  check_keys(j,
             {"name", "n", "depths", "circuits", "backend", "trajectories", "samples", "gate_set", "boundary", "noise",
              "estimators", "seed", "fit_range", "circuit_mode", "dfe_paulis", "threads", "integrator"},
             w);
  BenchmarkConfig c;
  c.name = j.value("name", std::string{});
  c.n = get<int>(j, "n", w);
  if (!j.contains("depths")) bad("config: missing 'depths'");
  const auto& d = j["depths"];
  if (d.is_string())
    c.depths = parse_depths(d.get<std::string>());
  else if (d.is_object()) {
    check_keys(d, {"from", "to", "step"}, "config depths");
    const int step = d.value("step", 1);
    if (step < 1) bad("config depths: step must be >= 1");
    for (int x = get<int>(d, "from", w); x <= get<int>(d, "to", w); x += step) c.depths.push_back(x);
  } else {
    c.depths = get<std::vector<int>>(j, "depths", w);
  }
  if (j.contains("circuits")) c.L = get<int>(j, "circuits", w);
  try {
    if (j.contains("backend")) c.backend = parse_backend(get<std::string>(j, "backend", w));
    if (j.contains("gate_set")) c.gate_set = parse_gate_set(get<std::string>(j, "gate_set", w));
    if (j.contains("boundary")) c.boundary = parse_boundary(get<std::string>(j, "boundary", w));
    if (j.contains("circuit_mode")) c.circuit_mode = parse_circuit_mode(get<std::string>(j, "circuit_mode", w));
    if (j.contains("estimators")) {
      c.estimators.clear();
      for (const auto& e : j["estimators"]) c.estimators.push_back(parse_estimator_kind(e.get<std::string>()));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    bad(std::string("config: ") + e.what());
  }
  if (j.contains("trajectories")) c.trajectories = get<int>(j, "trajectories", w);
  if (j.contains("samples")) c.samples = get<int>(j, "samples", w);
  if (j.contains("seed")) c.master_seed = get<uint64_t>(j, "seed", w);
  if (j.contains("dfe_paulis")) c.dfe_paulis = get<int>(j, "dfe_paulis", w);
  if (j.contains("threads")) c.threads = get<int>(j, "threads", w);
  if (j.contains("fit_range")) {
    const auto r = get<std::vector<int>>(j, "fit_range", w);
    if (r.size() != 2) bad("config: fit_range must be [lo, hi]");
    c.fit_min = r[0];
    c.fit_max = r[1];
  }
  if (j.contains("integrator")) {
    const auto s = get<std::string>(j, "integrator", w);
    if (s == "rk4")
      c.integrator = LindbladIntegrator::rk4;
    else if (s == "exact")
      c.integrator = LindbladIntegrator::exact;
    else if (s == "automatic")
      c.integrator = LindbladIntegrator::automatic;
    else
      bad("config: integrator must be automatic, exact or rk4");
  }
  if (j.contains("noise")) {
    const auto& spec = j["noise"];
    c.noise = noise_from_spec(spec.is_string() && spec.get<std::string>() == "none" ? Json(nullptr) : spec, c.n,
                              c.boundary);
  }
  validate_config(c);
  return c;
}

namespace {

std::vector<int> depth_list(const Json& d, const std::string& where) {
  if (d.is_string()) return parse_depths(d.get<std::string>());
  if (d.is_object()) {
    check_keys(d, {"from", "to", "step"}, where);
    const int step = d.value("step", 1);
    if (step < 1) bad(where + ": step must be >= 1");
    std::vector<int> out;
    for (int x = get<int>(d, "from", where); x <= get<int>(d, "to", where); x += step) out.push_back(x);
    return out;
  }
  try {
    return d.get<std::vector<int>>();
  } catch (const Json::exception& e) {
    bad(where + ": " + e.what());
  }
}

template <class F>
auto wrap(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    bad(where + ": " + e.what());
  }
}

}  // namespace

Json to_json(const RbConfig& c) {
  return {{"n", c.n},
          {"noise", c.noise ? to_json(*c.noise) : Json("none")},
          {"lengths", c.lengths},
          {"sequences", c.sequences},
          {"backend", to_string(c.backend)},
          {"trajectories", c.trajectories},
          {"boundary", to_string(c.boundary)},
          {"seed", c.seed},
          {"conversion", c.conversion}};
}

RbConfig rb_config_from_json(const Json& j) {
  const std::string w = "rb config";
  check_keys(j, {"n", "noise", "lengths", "sequences", "backend", "trajectories", "boundary", "seed", "threads",
                 "conversion"},
             w);
  RbConfig c;
  c.n = get<int>(j, "n", w);
  wrap(w, [&] {
    if (j.contains("backend")) c.backend = parse_backend(j["backend"].get<std::string>());
    if (j.contains("boundary")) c.boundary = parse_boundary(j["boundary"].get<std::string>());
    return 0;
  });
  if (j.contains("lengths")) c.lengths = depth_list(j["lengths"], w);
  if (j.contains("sequences")) c.sequences = get<int>(j, "sequences", w);
  if (j.contains("trajectories")) c.trajectories = get<int>(j, "trajectories", w);
  if (j.contains("seed")) c.seed = get<uint64_t>(j, "seed", w);
  if (j.contains("threads")) c.threads = get<int>(j, "threads", w);
  if (j.contains("conversion")) c.conversion = get<double>(j, "conversion", w);
  if (j.contains("noise")) {
    const auto& spec = j["noise"];
    c.noise = noise_from_spec(spec.is_string() && spec.get<std::string>() == "none" ? Json(nullptr) : spec, c.n,
                              c.boundary);
  }
  return c;
}

namespace {

// The rates define the rcs noise, so it is not written back.
Json rcs_section(const BenchmarkConfig& rcs) {
  Json j = to_json(rcs);
  j.erase("noise");
  return j;
}

}  // namespace

Json to_json(const VirtualConfig& c) {
  return {{"n", c.n},
          {"gamma1", c.gamma1},
          {"gamma2", c.gamma2},
          {"gamma3", c.gamma3},
          {"backend", to_string(c.backend)},
          {"trajectories", c.trajectories},
          {"t_max", c.t_max},
          {"rcs", rcs_section(c.rcs)},
          {"seed", c.seed}};
}

VirtualConfig virtual_config_from_json(const Json& j) {
  const std::string w = "virtual-exp config";
  check_keys(j, {"n", "gamma1", "gamma2", "gamma3", "alpha", "backend", "trajectories", "t_max", "rcs", "seed",
                 "threads"},
             w);
  VirtualConfig c;
  if (j.contains("n")) c.n = get<int>(j, "n", w);
  if (j.contains("gamma1")) c.gamma1 = get<double>(j, "gamma1", w);
  if (j.contains("gamma2")) c.gamma2 = get<double>(j, "gamma2", w);
  if (j.contains("gamma3")) c.gamma3 = get<double>(j, "gamma3", w);
  if (j.contains("alpha")) {
    if (j.contains("gamma3")) bad(w + ": give gamma3 or alpha, not both");
    c.gamma3 = 0.02 * get<double>(j, "alpha", w);
  }
  if (j.contains("backend")) c.backend = wrap(w, [&] { return parse_backend(j["backend"].get<std::string>()); });
  if (j.contains("trajectories")) c.trajectories = get<int>(j, "trajectories", w);
  if (j.contains("t_max")) c.t_max = get<int>(j, "t_max", w);
  if (j.contains("seed")) c.seed = get<uint64_t>(j, "seed", w);
  if (j.contains("threads")) c.threads = get<int>(j, "threads", w);
  if (!j.contains("rcs")) bad(w + ": missing 'rcs' benchmark section");
  Json rcs = j["rcs"];
  if (!rcs.is_object()) bad(w + ": 'rcs' must be an object");
  if (rcs.contains("noise")) bad(w + ": the rcs noise model is set by the rates");
  rcs["n"] = c.n;
  rcs["boundary"] = "ring";
  c.rcs = config_from_json(rcs);
  return c;
}

Json to_json(const VarianceConfig& c) {
  Json gs = Json::array();
  for (auto g : c.gate_sets) gs.push_back(to_string(g));
  return {{"n", c.n},         {"depths", c.depths}, {"circuits", c.L},   {"locations", c.K},
          {"eps", c.eps},     {"gate_sets", gs},    {"seed", c.seed}};
}

VarianceConfig variance_config_from_json(const Json& j) {
  const std::string w = "variance config";
  check_keys(j, {"n", "depths", "circuits", "locations", "eps", "gate_sets", "seed", "threads"}, w);
  VarianceConfig c;
  c.n = get<int>(j, "n", w);
  if (!j.contains("depths")) bad(w + ": missing 'depths'");
  c.depths = depth_list(j["depths"], w);
  if (j.contains("circuits")) c.L = get<int>(j, "circuits", w);
  if (j.contains("locations")) c.K = get<int>(j, "locations", w);
  if (j.contains("eps")) c.eps = get<double>(j, "eps", w);
  if (j.contains("seed")) c.seed = get<uint64_t>(j, "seed", w);
  if (j.contains("threads")) c.threads = get<int>(j, "threads", w);
  if (j.contains("gate_sets")) {
    c.gate_sets.clear();
    for (const auto& g : j["gate_sets"])
      c.gate_sets.push_back(wrap(w, [&] { return parse_gate_set(g.get<std::string>()); }));
  }
  return c;
}

Json to_json(const SpinConfig& c) {
  return {{"n", c.n}, {"l_max", c.l_max}, {"pauli", c.pauli}, {"eps", c.eps}, {"d_max", c.d_max}};
}

SpinConfig spin_config_from_json(const Json& j) {
  const std::string w = "spinmodel config";
  check_keys(j, {"n", "l_max", "pauli", "eps", "d_max"}, w);
  SpinConfig c;
  c.n = get<int>(j, "n", w);
  if (j.contains("l_max")) c.l_max = get<int>(j, "l_max", w);
  if (j.contains("pauli")) c.pauli = get<std::string>(j, "pauli", w);
  if (j.contains("eps")) c.eps = get<double>(j, "eps", w);
  if (j.contains("d_max")) c.d_max = get<int>(j, "d_max", w);
  return c;
}

Json to_json(const DecayFit& f) {
  return {{"A", f.A},
          {"lambda", f.lambda},
          {"sigma_A", f.sigma_A},
          {"sigma_lambda", f.sigma_lambda},
          {"cov_A_lambda", f.cov_A_lambda},
          {"d_min", f.d_min},
          {"d_max", f.d_max},
          {"n_points", f.n_points},
          {"residual_norm", f.residual_norm},
          {"residuals", f.residuals},
          {"weighted", f.weighted},
          {"iterations", f.iterations}};
}

Json to_json(const DepthPoint& p) {
  return {{"depth", p.depth},   {"mean", p.mean},
          {"stderr", optional_double(p.stderr_)},
          {"L", p.L},           {"M", p.M},
          {"per_circuit", p.per_circuit},
          {"within_var", p.within_var}};
}

Json to_json(const BenchmarkReport& r) {
  Json series = Json::array();
  for (const auto& s : r.series) {
    Json pts = Json::array();
    for (const auto& p : s.points) pts.push_back(to_json(p));
    Json o = {{"kind", to_string(s.kind)}, {"points", std::move(pts)}};
    o["fit"] = s.fit ? to_json(*s.fit) : Json(nullptr);
    if (!s.fit_error.empty()) o["fit_error"] = s.fit_error;
    series.push_back(std::move(o));
  }
  return {{"tool", kToolName},
          {"version", kToolVersion},
          {"config", to_json(r.config)},
          {"lambda_true", optional_double(r.lambda_true)},
          {"circuit_seeds", r.circuit_seeds},
          {"estimators", std::move(series)}};
}

Json to_json(const TrajectoryAccumulator& a) {
  return {{"circuit_seed", a.circuit_seed},   {"model", a.model},
          {"T", a.T},                         {"sum_p_weighted", a.sum_p_weighted},
          {"sum_p_sq", a.sum_p_sq},           {"fidelity_sum", a.fidelity_sum},
          {"sum_p_weighted_sq", a.sum_p_weighted_sq},
          {"fidelity_sq_sum", a.fidelity_sq_sum}};
}

Json to_json(const RbReport& r) {
  Json pairs = Json::array();
  for (const auto& p : r.pairs) {
    Json surv = Json::array();
    for (const auto& s : p.survival) surv.push_back(to_json(s));
    pairs.push_back({{"pair", {p.pair.first, p.pair.second}},
                     {"parity", p.parity},
                     {"A", p.A},
                     {"f", p.f},
                     {"B", p.B},
                     {"sigma_f", p.sigma_f},
                     {"e", p.e},
                     {"sigma_e", p.sigma_e},
                     {"survival", std::move(surv)}});
  }
  Json j = {{"tool", kToolName},
            {"version", kToolVersion},
            {"n", r.config.n},
            {"backend", to_string(r.config.backend)},
            {"lengths", r.config.lengths},
            {"sequences", r.config.sequences},
            {"seed", r.config.seed},
            {"conversion", r.config.conversion},
            {"conversion_note", "e = conversion * (1 - f), two-qubit depolarizing to Pauli error rate"},
            {"noise", r.config.noise ? to_json(*r.config.noise) : Json("none")},
            {"pairs", std::move(pairs)},
            {"lambda_srb", r.lambda_srb},
            {"lambda_true", optional_double(r.lambda_true)}};
  return j;
}

Json to_json(const VirtualResult& v) {
  auto series = [](const std::vector<DepthPoint>& s) {
    Json a = Json::array();
    for (const auto& p : s) a.push_back({{"t", p.depth}, {"mean", p.mean}, {"stderr", optional_double(p.stderr_)}});
    return a;
  };
  return {{"Gamma1", v.Gamma1},
          {"sigma_Gamma1", v.sigma_Gamma1},
          {"Gamma2", v.Gamma2},
          {"sigma_Gamma2", v.sigma_Gamma2},
          {"lambda", v.lambda},
          {"sigma_lambda", v.sigma_lambda},
          {"lambda_true", v.lambda_true},
          {"gamma3", v.gamma3},
          {"sigma_gamma3", v.sigma_gamma3},
          {"t1_fit", to_json(v.t1_fit)},
          {"ramsey_fit", to_json(v.ramsey_fit)},
          {"t1_series", series(v.t1_series)},
          {"ramsey_series", series(v.ramsey_series)},
          {"rcs", to_json(v.rcs)}};
}

Json to_json(const Theorem1Result& r) {
  return {{"n", r.n},
          {"d", r.d},
          {"L", r.L},
          {"mean_full", r.mean_full},
          {"mean_diag", r.mean_diag},
          {"mean_diff", r.mean_diff},
          {"stderr_diff", r.stderr_diff},
          {"z", r.z}};
}

Json to_json(const AlCovarianceResult& r) {
  return {{"n", r.n},
          {"d", r.d},
          {"L", r.L},
          {"mean_sum", r.mean_sum},
          {"var_sum", r.var_sum},
          {"var_fidelity", r.var_fidelity}};
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string per_depth_csv(const BenchmarkReport& r) {
  std::string out = "estimator,depth,mean,stderr,L,M\n";
  for (const auto& s : r.series)
    for (const auto& p : s.points)
      out += to_string(s.kind) + "," + std::to_string(p.depth) + "," + fmt(p.mean) + "," +
             (p.stderr_ ? fmt(*p.stderr_) : std::string{}) + "," + std::to_string(p.L) + "," + std::to_string(p.M) +
             "\n";
  return out;
}

std::string per_circuit_csv(const BenchmarkReport& r) {
  std::string out = "circuit_seed,depth,kind,value,stderr\n";
  for (const auto& s : r.series)
    for (size_t k = 0; k < s.points.size(); ++k) {
      const auto& p = s.points[k];
      for (size_t c = 0; c < p.per_circuit.size(); ++c) {
        const double w = c < p.within_var.size() ? p.within_var[c] : 0.0;
        out += std::to_string(r.circuit_seeds[k][c]) + "," + std::to_string(p.depth) + "," + to_string(s.kind) + "," +
               fmt(p.per_circuit[c]) + "," + fmt(std::sqrt(std::max(0.0, w))) + "\n";
      }
    }
  return out;
}

std::string config_hash(const Json& config) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::stringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << h;
  return ss.str();
}

namespace {

void put_u64(std::ostream& os, uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("probability table: truncated file");
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= uint64_t{b[i]} << (8 * i);
  return v;
}

}  // namespace

void write_probability_table(const std::string& path, const std::vector<double>& probs) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  put_u64(os, probs.size());
  for (double p : probs) put_u64(os, std::bit_cast<uint64_t>(p));
  if (!os) throw std::runtime_error("write failed: " + path);
}

std::vector<double> read_probability_table(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path);
  const uint64_t count = get_u64(is);
  if (count > (uint64_t{1} << 34)) throw std::runtime_error("probability table: implausible length");
  std::vector<double> out(count);
  for (auto& p : out) p = std::bit_cast<double>(get_u64(is));
  return out;
}

Json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) bad("cannot open config file " + path);
  try {
    return Json::parse(is);
  } catch (const Json::parse_error& e) {
    bad("invalid JSON in " + path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << text;
  if (!os) throw std::runtime_error("write failed: " + path);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace rcsbench::io
