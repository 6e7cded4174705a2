// rcsbench command-line driver.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rcsbench/io.h"
#include "rcsbench/presets.h"
#include "rcsbench/protocols.h"
#include "rcsbench/spinmodel.h"
#include "rcsbench/statevec.h"

namespace fs = std::filesystem;
using namespace rcsbench;
using io::Json;

namespace {

struct Common {
  std::string config;
  std::string preset;
  std::string out = "rcsbench_out";
  std::optional<int> n;
  std::optional<uint64_t> seed;
  std::optional<int> threads;
  std::string backend;
  std::optional<int> trajectories;
  std::optional<int> circuits;
  std::string depths;
  std::string fit_range;
  std::string noise;
  std::optional<double> lambda;
  std::string mode;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "JSON config file");
  sub->add_option("--preset", c.preset, "named preset (see `rcsbench presets`)");
  sub->add_option("--n", c.n, "number of qubits");
  sub->add_option("--seed", c.seed, "master seed");
  sub->add_option("--out", c.out, "output directory")->capture_default_str();
  sub->add_option("--threads", c.threads, "worker threads");
  sub->add_option("--backend", c.backend, "mcwf | density");
  sub->add_option("--trajectories", c.trajectories, "MCWF trajectories per circuit");
  sub->add_option("--circuits", c.circuits, "circuits per depth (sequences per length for rb)");
  sub->add_option("--depths", c.depths, "depth grid: from:to[:step] or a,b,c");
  sub->add_option("--fit-range", c.fit_range, "fit range lo:hi");
}

void add_noise_flags(CLI::App* sub, Common& c) {
  sub->add_option("--noise", c.noise, "none | t1t2 | pauli_x | corr_xx | weight_nm1");
  sub->add_option("--lambda", c.lambda, "target ENR for the noise preset");
  sub->add_option("--mode", c.mode, "independent | prefix circuit sampling");
}

// Collects written files so the manifest lists every output.
class Outputs {
 public:
  explicit Outputs(const std::string& dir) : dir_(dir) { fs::create_directories(dir_); }
  void write(const std::string& name, const std::string& text) {
    io::write_text_file((dir_ / name).string(), text);
    files_.push_back(name);
  }
  void write_binary(const std::string& name, const std::vector<double>& probs) {
    io::write_probability_table((dir_ / name).string(), probs);
    files_.push_back(name);
  }
  void manifest(const std::string& command, const Json& config, uint64_t seed, int threads,
                const std::string& started) {
    Json files = files_;
    files.push_back("manifest.json");
    Json m = {{"tool", io::kToolName},
              {"version", io::kToolVersion},
              {"command", command},
              {"config_hash", io::config_hash(config)},
              {"config", config},
              {"master_seed", seed},
              {"threads", threads},
              {"started", started},
              {"finished", io::utc_timestamp()},
              {"outputs", files}};
    io::write_text_file((dir_ / "manifest.json").string(), m.dump(2) + "\n");
  }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string pad_pauli(std::string p, int n) {
  if (static_cast<int>(p.size()) > n) throw ConfigError("pauli label longer than n");
  p.resize(static_cast<size_t>(n), 'I');
  return p;
}

std::optional<NoiseModel> noise_override(const Common& c, int n, Boundary b) {
  if (c.noise.empty()) return std::nullopt;
  if (c.noise == "none") return std::nullopt;
  return io::noise_from_spec(Json{{"preset", c.noise}, {"lambda", c.lambda.value_or(0.05)}}, n, b);
}

void apply_overrides(BenchmarkConfig& cfg, const Common& c) {
  if (c.seed) cfg.master_seed = *c.seed;
  if (c.threads) cfg.threads = *c.threads;
  if (!c.backend.empty()) cfg.backend = parse_backend(c.backend);
  if (c.trajectories) cfg.trajectories = *c.trajectories;
  if (c.circuits) cfg.L = *c.circuits;
  if (!c.depths.empty()) {
    cfg.depths = io::parse_depths(c.depths);
    // A preset's fit window belongs to its own grid.
    cfg.fit_min.reset();
    cfg.fit_max.reset();
  }
  if (!c.fit_range.empty()) {
    const auto [lo, hi] = io::parse_range(c.fit_range);
    cfg.fit_min = lo;
    cfg.fit_max = hi;
  }
  if (!c.mode.empty()) cfg.circuit_mode = parse_circuit_mode(c.mode);
  if (!c.noise.empty()) cfg.noise = noise_override(c, cfg.n, cfg.boundary);
  else if (c.lambda && cfg.noise) throw ConfigError("--lambda needs --noise");
}

BenchmarkConfig benchmark_config(const Common& c) {
  if (!c.preset.empty() && !c.config.empty()) throw ConfigError("give --preset or --config, not both");
  BenchmarkConfig cfg;
  if (!c.preset.empty()) {
    cfg = benchmark_preset(c.preset, c.n);
  } else if (!c.config.empty()) {
    Json j = io::read_json_file(c.config);
    if (c.n) j["n"] = *c.n;
    cfg = io::config_from_json(j);
  } else {
    if (!c.n || c.depths.empty()) throw ConfigError("benchmark needs --preset, --config, or --n with --depths");
    cfg.n = *c.n;
    cfg.name = "cli";
    cfg.backend = cfg.n <= kMaxDensityQubits ? Backend::density : Backend::mcwf;
  }
  apply_overrides(cfg, c);
  validate_config(cfg);
  return cfg;
}

std::string plot_data(const BenchmarkReport& r) {
  std::string out;
  for (const auto& s : r.series) {
    out += "# " + to_string(s.kind) + "\n# depth mean stderr fit\n";
    for (const auto& p : s.points) {
      const double fit = s.fit ? s.fit->A * std::exp(-s.fit->lambda * p.depth) : NAN;
      out += std::to_string(p.depth) + " " + num(p.mean) + " " + num(p.stderr_.value_or(0.0)) + " " + num(fit) + "\n";
    }
    out += "\n\n";
  }
  return out;
}

std::string plot_script(const BenchmarkReport& r) {
  std::string s =
      "# gnuplot script: gnuplot -p plot.gp\nset logscale y\nset xlabel 'depth'\nset ylabel 'estimator value'\n"
      "set key top right\nplot \\\n";
  for (size_t i = 0; i < r.series.size(); ++i) {
    const std::string k = to_string(r.series[i].kind), idx = std::to_string(i);
    s += "  'plot.dat' index " + idx + " using 1:2:3 with yerrorbars title '" + k + "', \\\n";
    s += "  'plot.dat' index " + idx + " using 1:4 with lines notitle";
    s += i + 1 < r.series.size() ? ", \\\n" : "\n";
  }
  return s;
}

Json fits_json(const BenchmarkReport& r) {
  Json f = Json::object();
  for (const auto& s : r.series) {
    Json o = s.fit ? io::to_json(*s.fit) : Json(nullptr);
    if (!s.fit) o = Json{{"error", s.fit_error}};
    f[to_string(s.kind)] = o;
  }
  return {{"fits", f}, {"lambda_true", r.lambda_true ? Json(*r.lambda_true) : Json(nullptr)}};
}

void emit_benchmark(Outputs& out, const BenchmarkReport& rep, const std::string& prefix = "") {
  out.write(prefix + "report.json", io::to_json(rep).dump(2) + "\n");
  out.write(prefix + "per_depth.csv", io::per_depth_csv(rep));
  out.write(prefix + "per_circuit.csv", io::per_circuit_csv(rep));
  out.write(prefix + "fit.json", fits_json(rep).dump(2) + "\n");
  out.write(prefix + "plot.dat", plot_data(rep));
  out.write(prefix + "plot.gp", plot_script(rep));
}

void print_fits(const BenchmarkReport& rep) {
  for (const auto& s : rep.series) {
    if (s.fit)
      std::printf("  %-7s lambda = %.6f +- %.6f  (A = %.4f, depths %d-%d)\n", to_string(s.kind).c_str(), s.fit->lambda,
                  s.fit->sigma_lambda, s.fit->A, s.fit->d_min, s.fit->d_max);
    else
      std::printf("  %-7s fit failed: %s\n", to_string(s.kind).c_str(), s.fit_error.c_str());
  }
  if (rep.lambda_true) std::printf("  lambda_true = %.6f\n", *rep.lambda_true);
}

int cmd_benchmark(const Common& c) {
  const BenchmarkConfig cfg = benchmark_config(c);
  const std::string started = io::utc_timestamp();
  const BenchmarkReport rep = rcs_benchmark(cfg);
  Outputs out(c.out);
  emit_benchmark(out, rep);
  out.manifest("benchmark", io::to_json(cfg), cfg.master_seed, cfg.threads, started);
  print_fits(rep);
  return 0;
}

struct SpinFlags {
  std::optional<int> l_max;
  std::string pauli;
  std::optional<double> eps;
  std::optional<int> d_max;
};

int cmd_spinmodel(const Common& c, const SpinFlags& f) {
  SpinConfig s;
  if (!c.preset.empty())
    s = spin_preset(c.preset, c.n);
  else if (!c.config.empty()) {
    Json j = io::read_json_file(c.config);
    if (c.n) j["n"] = *c.n;
    s = io::spin_config_from_json(j);
  } else {
    if (!c.n) throw ConfigError("spinmodel needs --n, --preset or --config");
    s.n = *c.n;
  }
  if (f.l_max) s.l_max = *f.l_max;
  if (!f.pauli.empty()) s.pauli = f.pauli;
  if (f.eps) s.eps = *f.eps;
  if (f.d_max) s.d_max = *f.d_max;
  try {
    spin::check_ring_size(s.n);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (s.l_max < 1 || s.d_max < 1) throw ConfigError("l_max and d_max must be >= 1");
  if (!(s.eps >= 0 && s.eps <= 1)) throw ConfigError("eps must lie in [0, 1]");
  const std::string pauli = pad_pauli(s.pauli, s.n);
  if (pauli.find_first_not_of('I') == std::string::npos) throw ConfigError("pauli must not be the identity");
  const std::string started = io::utc_timestamp();
  const spin::TransferMatrix tm(s.n);
  const auto prof = [&] {
    try {
      return tm.overlap_profile(s.l_max, pauli);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }();
  std::string csv =
      "# l: layer after which the Pauli error acts (dimensionless count); value: E_C |<psi_l|psi>|^2 "
      "(dimensionless); haar_limit: 1/(2^n+1); bound: (4/15)(4/5)^(2(l-1)) + 1/(2^n+1)\n"
      "l,value,haar_limit,bound\n";
  for (int l = 1; l <= s.l_max; ++l)
    csv += std::to_string(l) + "," + num(prof[static_cast<size_t>(l - 1)]) + "," + num(spin::haar_limit(s.n)) + "," +
           num(spin::decay_bound(s.n, l)) + "\n";
  std::string fo =
      "# d: circuit depth; F0 = (1-eps)^(nd); EF1: first-order fidelity term; i.i.d. X errors with probability eps\n"
      "d,F0,EF1,EF1_over_F0\n";
  for (int d = 1; d <= s.d_max; ++d) {
    const auto r = spin::first_order_fidelity(s.n, d, s.eps);
    fo += std::to_string(d) + "," + num(r.F0) + "," + num(r.EF1) + "," + num(r.F0 > 0 ? r.EF1 / r.F0 : NAN) + "\n";
  }
  Outputs out(c.out);
  out.write("overlap.csv", csv);
  out.write("first_order.csv", fo);
  out.write("plot.gp",
            "# gnuplot script: gnuplot -p plot.gp\nset datafile separator ','\nset logscale y\nset xlabel 'l'\n"
            "plot 'overlap.csv' using 1:2 skip 2 with linespoints title 'E|<psi_l|psi>|^2', \\\n"
            "  'overlap.csv' using 1:3 skip 2 with lines title '1/(2^n+1)', \\\n"
            "  'overlap.csv' using 1:4 skip 2 with lines title 'bound'\n");
  Json cfg = io::to_json(s);
  cfg["pauli"] = pauli;
  out.manifest("spinmodel", cfg, 0, 1, started);
  std::printf("  l=1: %.15g  l=%d: %.15g  (1/(2^n+1) = %.15g)\n", prof.front(), s.l_max, prof.back(),
              spin::haar_limit(s.n));
  return 0;
}

int cmd_virtual(const Common& c, std::optional<double> alpha) {
  VirtualConfig v;
  if (!c.preset.empty() && !c.config.empty()) throw ConfigError("give --preset or --config, not both");
  if (!c.preset.empty())
    v = virtual_preset(c.preset, c.n);
  else if (!c.config.empty()) {
    Json j = io::read_json_file(c.config);
    if (c.n) j["n"] = *c.n;
    v = io::virtual_config_from_json(j);
  } else {
    v = virtual_preset(alpha && *alpha >= 1.0 ? "fig7-alpha1" : "fig7-alpha0", c.n);
  }
  if (alpha) v.gamma3 = 0.02 * *alpha;
  if (c.seed) v.seed = v.rcs.master_seed = *c.seed;
  if (c.threads) v.threads = v.rcs.threads = *c.threads;
  if (!c.backend.empty()) v.backend = v.rcs.backend = parse_backend(c.backend);
  if (c.trajectories) v.trajectories = v.rcs.trajectories = *c.trajectories;
  Common rc = c;
  rc.seed.reset();
  rc.threads.reset();
  rc.backend.clear();
  rc.trajectories.reset();
  apply_overrides(v.rcs, rc);
  v.rcs.n = v.n;
  const std::string started = io::utc_timestamp();
  const VirtualResult r = virtual_experiment(v);
  Outputs out(c.out);
  out.write("virtual.json", io::to_json(r).dump(2) + "\n");
  auto series_csv = [](const std::vector<DepthPoint>& s, const std::string& what) {
    std::string csv = "t," + what + ",stderr\n";
    for (const auto& p : s) csv += std::to_string(p.depth) + "," + num(p.mean) + "," + num(p.stderr_.value_or(0)) + "\n";
    return csv;
  };
  out.write("t1.csv", series_csv(r.t1_series, "excited_population"));
  out.write("ramsey.csv", series_csv(r.ramsey_series, "mean_x"));
  emit_benchmark(out, r.rcs, "rcs_");
  out.manifest("virtual-exp", io::to_json(v), v.seed, v.threads, started);
  std::printf("  Gamma1 = %.6f +- %.6f\n  Gamma2 = %.6f +- %.6f\n  lambda = %.6f +- %.6f (true %.6f)\n", r.Gamma1,
              r.sigma_Gamma1, r.Gamma2, r.sigma_Gamma2, r.lambda, r.sigma_lambda, r.lambda_true);
  std::printf("  gamma3 = %.6f +- %.6f (true %.6f)\n", r.gamma3, r.sigma_gamma3, v.gamma3);
  return 0;
}

int cmd_rb(const Common& c, const std::string& lengths, bool compare) {
  RbConfig r;
  if (!c.preset.empty() && !c.config.empty()) throw ConfigError("give --preset or --config, not both");
  if (!c.preset.empty())
    r = rb_preset(c.preset, c.n);
  else if (!c.config.empty()) {
    Json j = io::read_json_file(c.config);
    if (c.n) j["n"] = *c.n;
    r = io::rb_config_from_json(j);
  } else {
    if (!c.n) throw ConfigError("rb needs --preset, --config or --n");
    r.n = *c.n;
  }
  if (!c.noise.empty()) r.noise = noise_override(c, r.n, r.boundary);
  if (c.seed) r.seed = *c.seed;
  if (c.threads) r.threads = *c.threads;
  if (!c.backend.empty()) r.backend = parse_backend(c.backend);
  if (c.trajectories) r.trajectories = *c.trajectories;
  if (c.circuits) r.sequences = *c.circuits;
  if (!lengths.empty()) r.lengths = io::parse_depths(lengths);
  std::optional<BenchmarkConfig> cmp;
  if (compare) {
    cmp = rb_comparison_preset(r);
    Common cc = c;
    cc.noise.clear();
    cc.lambda.reset();
    cc.circuits.reset();
    apply_overrides(*cmp, cc);
    cmp->noise = r.noise;
    validate_config(*cmp);
  }
  const std::string started = io::utc_timestamp();
  const RbReport rep = simultaneous_rb(r);
  Json j = io::to_json(rep);
  Outputs out(c.out);
  std::string pairs = "pair_a,pair_b,parity,f,sigma_f,e,sigma_e\n";
  std::string surv = "pair_a,pair_b,length,survival,stderr\n";
  for (const auto& p : rep.pairs) {
    pairs += std::to_string(p.pair.first) + "," + std::to_string(p.pair.second) + "," + std::to_string(p.parity) + "," +
             num(p.f) + "," + num(p.sigma_f) + "," + num(p.e) + "," + num(p.sigma_e) + "\n";
    for (const auto& s : p.survival)
      surv += std::to_string(p.pair.first) + "," + std::to_string(p.pair.second) + "," + std::to_string(s.depth) +
              "," + num(s.mean) + "," + num(s.stderr_.value_or(0)) + "\n";
  }
  out.write("rb_pairs.csv", pairs);
  out.write("rb_survival.csv", surv);
  std::printf("  lambda_sRB = %.6f\n", rep.lambda_srb);
  if (rep.lambda_true) {
    const double ratio = rep.lambda_srb / *rep.lambda_true;
    j["srb_over_true"] = ratio;
    j["srb_overestimates"] = ratio >= 2.0;
    std::printf("  lambda_true = %.6f  lambda_sRB/lambda_true = %.3f%s\n", *rep.lambda_true, ratio,
                ratio >= 2.0 ? "  (sRB overestimates by >= 2x)" : "");
  }
  Json cfgj = io::to_json(r);
  if (cmp) {
    const BenchmarkReport br = rcs_benchmark(*cmp);
    emit_benchmark(out, br, "rcs_");
    const auto& s = br.at(EstimatorKind::uXEB);
    if (s.fit) {
      j["lambda_uxeb"] = s.fit->lambda;
      j["sigma_lambda_uxeb"] = s.fit->sigma_lambda;
      if (rep.lambda_true) j["uxeb_over_true"] = s.fit->lambda / *rep.lambda_true;
      std::printf("  lambda_uXEB = %.6f +- %.6f\n", s.fit->lambda, s.fit->sigma_lambda);
    }
    cfgj["comparison"] = io::to_json(*cmp);
  }
  out.write("rb.json", j.dump(2) + "\n");
  out.manifest("rb", cfgj, r.seed, r.threads, started);
  return 0;
}

int cmd_variance(const Common& c, std::optional<int> K, std::optional<double> eps, const std::string& gate_sets) {
  VarianceConfig v;
  if (!c.preset.empty() && !c.config.empty()) throw ConfigError("give --preset or --config, not both");
  if (!c.preset.empty())
    v = variance_preset(c.preset, c.n);
  else if (!c.config.empty()) {
    Json j = io::read_json_file(c.config);
    if (c.n) j["n"] = *c.n;
    v = io::variance_config_from_json(j);
  } else {
    v = variance_preset("fig11", c.n);
  }
  if (c.seed) v.seed = *c.seed;
  if (c.threads) v.threads = *c.threads;
  if (c.circuits) v.L = *c.circuits;
  if (!c.depths.empty()) v.depths = io::parse_depths(c.depths);
  if (K) v.K = *K;
  if (eps) v.eps = *eps;
  if (!gate_sets.empty()) {
    v.gate_sets.clear();
    std::stringstream ss(gate_sets);
    std::string g;
    while (std::getline(ss, g, ',')) v.gate_sets.push_back(parse_gate_set(g));
  }
  if (v.n < 4 || v.n % 2 || v.n > 16) throw ConfigError("variance: n must be even, 4..16");
  if (v.L < 2) throw ConfigError("variance: need at least 2 circuits");
  if (v.gate_sets.empty()) throw ConfigError("variance: no gate sets");
  for (int d : v.depths)
    if (d < 1) throw ConfigError("variance: depths must be >= 1");
  const std::string started = io::utc_timestamp();
  std::string csv = "gate_set,d,mean_sum,var_sum,var_fidelity\n";
  Json res = Json::object();
  for (auto g : v.gate_sets) {
    const auto prof = al_covariance_profile(v.n, v.depths, v.eps, v.L, v.K, g, v.seed, v.threads);
    Json a = Json::array();
    for (const auto& r : prof) {
      csv += to_string(g) + "," + std::to_string(r.d) + "," + num(r.mean_sum) + "," + num(r.var_sum) + "," +
             num(r.var_fidelity) + "\n";
      a.push_back(io::to_json(r));
    }
    res[to_string(g)] = a;
    std::printf("  %-12s Var(sum A_l) at d=%d: %.6g\n", to_string(g).c_str(), prof.back().d, prof.back().var_sum);
  }
  Outputs out(c.out);
  out.write("variance.csv", csv);
  out.write("variance.json", Json{{"n", v.n}, {"eps", v.eps}, {"results", res}}.dump(2) + "\n");
  std::string gp =
      "# gnuplot script: gnuplot -p plot.gp\nset datafile separator ','\nset xlabel 'd'\n"
      "set ylabel 'Var(sum_l A_l)'\nplot \\\n";
  for (size_t i = 0; i < v.gate_sets.size(); ++i) {
    const std::string g = to_string(v.gate_sets[i]);
    gp += "  'variance.csv' using 2:(strcol(1) eq '" + g + "' ? $4 : 1/0) skip 1 with linespoints title '" + g + "'";
    gp += i + 1 < v.gate_sets.size() ? ", \\\n" : "\n";
  }
  out.write("plot.gp", gp);
  out.manifest("variance", io::to_json(v), v.seed, v.threads, started);
  return 0;
}

struct SampleFlags {
  std::string circuit;
  int samples = 1000;
  std::string gate_set = "haar2q";
  std::string boundary = "ring";
};

int cmd_sample(const Common& c, const SampleFlags& f) {
  Circuit circ;
  if (!f.circuit.empty()) {
    circ = io::circuit_from_json(io::read_json_file(f.circuit));
  } else {
    if (!c.n || c.depths.empty()) throw ConfigError("sample needs --circuit or --n with --depths");
    const auto ds = io::parse_depths(c.depths);
    if (ds.size() != 1) throw ConfigError("sample takes a single depth");
    try {
      circ = sample_rqc(*c.n, ds.front(), parse_gate_set(f.gate_set), parse_boundary(f.boundary), c.seed.value_or(1));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (circ.n > 24) throw ConfigError("sample: n must be <= 24");
  if (f.samples < 1) throw ConfigError("sample: --samples must be >= 1");
  const std::string started = io::utc_timestamp();
  const PureState psi = run_circuit(circ);
  const auto ideal = IdealDistribution::from_state(psi);
  Rng rng = Rng::stream(c.seed.value_or(1), {0x5A});
  const auto xs = sample_bitstrings(psi, static_cast<size_t>(f.samples), rng);
  std::string csv = "bitstring,probability\n";
  for (auto x : xs) csv += bitstring(x, circ.n) + "," + num(ideal.probs[x]) + "\n";
  Outputs out(c.out);
  out.write("circuit.json", io::to_json(circ).dump() + "\n");
  out.write_binary("probabilities.bin", ideal.probs);
  out.write("samples.csv", csv);
  Json summary = {{"n", circ.n}, {"depth", circ.depth()}, {"samples", f.samples}, {"sum_p_sq", ideal.sum_p_sq}};
  const auto est = [&](const EstimatorValue& v) { return Json{{"value", v.value}, {"stderr", v.stderr_.value_or(0)}}; };
  summary["XEB"] = est(xeb_samples(xs, ideal));
  if (ideal.dim() * ideal.sum_p_sq - 1 > 1e-12) summary["uXEB"] = est(uxeb_samples(xs, ideal));
  out.write("sample.json", summary.dump(2) + "\n");
  Json cfg = {{"n", circ.n}, {"depth", circ.depth()}, {"circuit_seed", circ.seed}, {"samples", f.samples},
              {"gate_set", to_string(circ.gate_set)}, {"boundary", to_string(circ.boundary)}};
  out.manifest("sample", cfg, c.seed.value_or(1), 1, started);
  std::printf("  wrote %d samples of an n=%d depth-%d circuit\n", f.samples, circ.n, circ.depth());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rcsbench: random circuit sampling benchmarking simulator"};
  app.require_subcommand(1);
  Common c;

  auto* bench = app.add_subcommand("benchmark", "RCS benchmark: simulate, estimate, fit");
  add_common(bench, c);
  add_noise_flags(bench, c);

  SpinFlags sf;
  auto* spinc = app.add_subcommand("spinmodel", "exact spin-model second moments and first-order terms");
  add_common(spinc, c);
  spinc->add_option("--l-max", sf.l_max, "largest depth l");
  spinc->add_option("--pauli", sf.pauli, "Pauli label, padded with I to n qubits");
  spinc->add_option("--eps", sf.eps, "X error probability for the first-order table");
  spinc->add_option("--d-max", sf.d_max, "largest depth of the first-order table");

  std::optional<double> alpha;
  auto* virt = app.add_subcommand("virtual-exp", "correlated-noise extraction (T1, Ramsey, RCS)");
  add_common(virt, c);
  virt->add_option("--alpha", alpha, "gamma3 = 0.02 * alpha");

  std::string lengths;
  bool no_compare = false;
  auto* rb = app.add_subcommand("rb", "simultaneous two-qubit RB and comparison with RCS");
  add_common(rb, c);
  add_noise_flags(rb, c);
  rb->add_option("--lengths", lengths, "sequence lengths: from:to[:step] or a,b,c");
  rb->add_flag("--no-compare", no_compare, "skip the RCS comparison run");

  std::optional<int> K;
  std::optional<double> eps;
  std::string gate_sets;
  auto* var = app.add_subcommand("variance", "Monte-Carlo Var(sum_l A_l) versus depth");
  add_common(var, c);
  var->add_option("--locations", K, "error positions per layer (0 = all qubits)");
  var->add_option("--eps", eps, "X error probability");
  var->add_option("--gate-sets", gate_sets, "comma-separated: haar2q,cnot_haar1q");

  SampleFlags smp;
  auto* sample = app.add_subcommand("sample", "sample bitstrings from an ideal random circuit");
  add_common(sample, c);
  sample->add_option("--circuit", smp.circuit, "circuit JSON to load instead of sampling one");
  sample->add_option("--samples", smp.samples, "number of bitstrings");
  sample->add_option("--gate-set", smp.gate_set, "haar2q | cnot_haar1q");
  sample->add_option("--boundary", smp.boundary, "ring | open");

  auto* presets = app.add_subcommand("presets", "list named presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*presets) {
      for (const auto& p : list_presets()) std::printf("%-28s %-12s %s\n", p.name.c_str(), p.command.c_str(), p.description.c_str());
      return 0;
    }
    if (*bench) return cmd_benchmark(c);
    if (*spinc) return cmd_spinmodel(c, sf);
    if (*virt) return cmd_virtual(c, alpha);
    if (*rb) return cmd_rb(c, lengths, !no_compare);
    if (*var) return cmd_variance(c, K, eps, gate_sets);
    if (*sample) return cmd_sample(c, smp);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
