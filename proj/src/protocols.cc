#include "rcsbench/protocols.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "rcsbench/mcwf.h"
#include "rcsbench/parallel.h"
#include "rcsbench/rng.h"
#include "rcsbench/spinmodel.h"
#include "rcsbench/statevec.h"

namespace rcsbench {

std::string to_string(Backend b) {
  switch (b) {
    case Backend::mcwf: return "mcwf";
    case Backend::density: return "density";
    case Backend::statevec_sampling: return "statevec_sampling";
  }
  return "?";
}

Backend parse_backend(const std::string& s) {
  if (s == "mcwf") return Backend::mcwf;
  if (s == "density") return Backend::density;
  if (s == "statevec_sampling" || s == "sampling") return Backend::statevec_sampling;
  throw ConfigError("unknown backend '" + s + "' (expected mcwf, density or statevec_sampling)");
}

std::string to_string(CircuitMode m) { return m == CircuitMode::prefix ? "prefix" : "independent"; }

CircuitMode parse_circuit_mode(const std::string& s) {
  if (s == "prefix") return CircuitMode::prefix;
  if (s == "independent") return CircuitMode::independent;
  throw ConfigError("unknown circuit mode '" + s + "' (expected independent or prefix)");
}

void validate_config(const BenchmarkConfig& c) {
  auto fail = [](const std::string& m) { throw ConfigError("benchmark config: " + m); };
  if (c.n < 2) fail("n must be >= 2");
  if (c.boundary == Boundary::ring && c.n % 2 != 0) fail("ring boundary requires even n");
  if (c.depths.empty()) fail("depths must not be empty");
  for (size_t i = 0; i < c.depths.size(); ++i) {
    if (c.depths[i] < 1) fail("depths must be >= 1");
    if (i > 0 && c.depths[i] <= c.depths[i - 1]) fail("depths must be strictly increasing");
  }
  if (c.L < 1) fail("L must be >= 1");
  if (c.trajectories < 1) fail("trajectories must be >= 1");
  if (c.samples < 1) fail("samples must be >= 1");
  if (c.threads < 1) fail("threads must be >= 1");
  if (c.backend == Backend::density && c.n > kMaxDensityQubits) fail("density backend requires n <= 10");
  if (c.n > 24) fail("n must be <= 24");
  if (c.noise) {
    if (c.noise->n != c.n) fail("noise model qubit count differs from n");
    try {
      validate_model(*c.noise);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }
  if (c.estimators.empty()) fail("no estimators requested");
  std::set<EstimatorKind> seen;
  for (auto k : c.estimators) {
    if (!seen.insert(k).second) fail("repeated estimator " + to_string(k));
    if (k == EstimatorKind::sRB) fail("sRB comes from the rb protocol, not from rcs_benchmark");
    if (k == EstimatorKind::DFE) {
      if (c.n > kMaxDfeQubits) fail("DFE requires n <= 8");
      if (c.backend == Backend::statevec_sampling) fail("DFE is not available with the sampling backend");
      if (c.dfe_paulis < 1) fail("dfe_paulis must be >= 1");
    }
  }
  if (c.fit_min && c.fit_max && *c.fit_min > *c.fit_max) fail("fit range is empty");
}

std::pair<int, int> default_fit_range(const BenchmarkConfig& c) {
  int lo = c.fit_min.value_or(-1);
  const int hi = c.fit_max.value_or(c.depths.back());
  if (!c.fit_min) {
    const auto above = std::count_if(c.depths.begin(), c.depths.end(), [&](int d) { return d >= c.n && d <= hi; });
    lo = above >= 3 ? c.n : c.depths.front();
  }
  return {lo, hi};
}

const EstimatorSeries& BenchmarkReport::at(EstimatorKind k) const {
  for (const auto& s : series)
    if (s.kind == k) return s;
  throw std::out_of_range("report has no series for " + to_string(k));
}

namespace {

struct IdealAt {
  PureState psi;
  IdealDistribution dist;
};

// Ideal states after each requested depth (sorted, within the circuit).
std::vector<IdealAt> ideal_states(const Circuit& circuit, const std::vector<int>& depths) {
  std::vector<IdealAt> out;
  PureState s = PureState::zero(circuit.n);
  size_t k = 0;
  int depth = 0;
  for (const auto& layer : circuit.layers) {
    apply_layer(s, layer);
    if (layer.injected) continue;
    ++depth;
    if (k < depths.size() && depths[k] == depth) {
      out.push_back({s, IdealDistribution::from_state(s)});
      ++k;
    }
  }
  if (k != depths.size()) throw std::logic_error("ideal_states: circuit shorter than requested depth");
  return out;
}

double from_sums(EstimatorKind k, const LinearSums& s, const IdealDistribution& ideal) {
  switch (k) {
    case EstimatorKind::uXEB: return uxeb_from_sums(s, ideal);
    case EstimatorKind::XEB: return xeb_from_sums(s, ideal);
    case EstimatorKind::logXEB: return logxeb_from_sums(s, ideal);
    case EstimatorKind::HOG: return hog_from_sums(s, ideal);
    default: throw std::logic_error("from_sums: not a linear estimator");
  }
}

bool needs_log(const std::vector<EstimatorKind>& ks) {
  return std::find(ks.begin(), ks.end(), EstimatorKind::logXEB) != ks.end();
}

// value[depth index][estimator index] and the matching within-circuit variance.
struct CircuitEval {
  std::vector<std::vector<double>> value, within;
  CircuitEval(size_t depths, size_t kinds)
      : value(depths, std::vector<double>(kinds, 0.0)), within(depths, std::vector<double>(kinds, 0.0)) {}
};

constexpr uint64_t kTagDfe = 0xDFE;
constexpr uint64_t kTagTrajectory = 0x7A;
constexpr uint64_t kTagSample = 0x5A;

CircuitEval eval_density(const BenchmarkConfig& cfg, const Circuit& circ, const std::vector<int>& depths) {
  const auto ideal = ideal_states(circ, depths);
  const auto& ks = cfg.estimators;
  const bool need_log = needs_log(ks);
  CircuitEval ev(depths.size(), ks.size());
  size_t k = 0;
  std::vector<double> q;
  auto observer = [&](int depth, const DensityState& rho) {
    if (k >= depths.size() || depths[k] != depth) return;
    const auto& id = ideal[k];
    q = rho.diagonal();
    for (double& v : q) v = std::max(v, 0.0);
    const LinearSums sums = linear_sums(q, id.dist, need_log);
    for (size_t e = 0; e < ks.size(); ++e) {
      switch (ks[e]) {
        case EstimatorKind::F: ev.value[k][e] = fidelity(rho, id.psi); break;
        case EstimatorKind::DFE: {
          Rng rng = Rng::stream(circ.seed, {kTagDfe, static_cast<uint64_t>(depth)});
          const auto v = dfe(id.psi, [&](const PauliString& p) { return pauli_expectation(rho, p); },
                             static_cast<size_t>(cfg.dfe_paulis), 0, rng);
          ev.value[k][e] = v.value;
          ev.within[k][e] = v.stderr_ ? *v.stderr_ * *v.stderr_ : 0.0;
          break;
        }
        default: ev.value[k][e] = from_sums(ks[e], sums, id.dist);
      }
    }
    ++k;
  };
  run_noisy_density(circ, cfg.noise ? &*cfg.noise : nullptr, observer, cfg.integrator);
  return ev;
}

// Exact values for the noiseless case shared by the pure-state backends.
CircuitEval eval_ideal(const BenchmarkConfig& cfg, const Circuit& circ, const std::vector<int>& depths) {
  const auto ideal = ideal_states(circ, depths);
  const auto& ks = cfg.estimators;
  CircuitEval ev(depths.size(), ks.size());
  for (size_t k = 0; k < depths.size(); ++k) {
    const auto& id = ideal[k];
    if (cfg.backend == Backend::statevec_sampling) {
      Rng rng = Rng::stream(circ.seed, {kTagSample, static_cast<uint64_t>(depths[k])});
      const auto xs = sample_bitstrings(id.psi, static_cast<size_t>(cfg.samples), rng);
      for (size_t e = 0; e < ks.size(); ++e) {
        EstimatorValue v{ks[e], 1.0, 0.0};
        switch (ks[e]) {
          case EstimatorKind::uXEB: v = uxeb_samples(xs, id.dist); break;
          case EstimatorKind::XEB: v = xeb_samples(xs, id.dist); break;
          case EstimatorKind::logXEB: v = logxeb_samples(xs, id.dist); break;
          case EstimatorKind::HOG: v = hog_samples(xs, id.dist); break;
          default: break;
        }
        ev.value[k][e] = v.value;
        ev.within[k][e] = v.stderr_ ? *v.stderr_ * *v.stderr_ : 0.0;
      }
    } else {
      const LinearSums sums = linear_sums(probabilities(id.psi), id.dist, needs_log(ks));
      for (size_t e = 0; e < ks.size(); ++e) {
        if (ks[e] == EstimatorKind::F || ks[e] == EstimatorKind::DFE)
          ev.value[k][e] = 1.0;
        else
          ev.value[k][e] = from_sums(ks[e], sums, id.dist);
      }
    }
  }
  return ev;
}

CircuitEval eval_mcwf(const BenchmarkConfig& cfg, const Circuit& circ, const std::vector<int>& depths) {
  const auto ideal = ideal_states(circ, depths);
  const auto& ks = cfg.estimators;
  const bool need_log = needs_log(ks);
  const bool want_dfe = std::find(ks.begin(), ks.end(), EstimatorKind::DFE) != ks.end();
  const size_t T = static_cast<size_t>(cfg.trajectories);
  const DecayProfile profile = decay_profile(*cfg.noise);
  std::vector<std::vector<double>> sum(depths.size(), std::vector<double>(ks.size(), 0.0));
  auto sum2 = sum;
  std::vector<std::vector<PureState>> kept(want_dfe ? depths.size() : 0);
  std::vector<double> q;
  for (size_t t = 0; t < T; ++t) {
    Rng rng = Rng::stream(circ.seed, {kTagTrajectory, t});
    size_t k = 0;
    auto observer = [&](int depth, const PureState& s) {
      if (k >= depths.size() || depths[k] != depth) return;
      const auto& id = ideal[k];
      const double norm = s.norm2();
      q.resize(s.dim());
      for (size_t x = 0; x < s.dim(); ++x) q[x] = std::norm(s.amplitudes[x]);
      const LinearSums sums = linear_sums(q, id.dist, need_log);
      for (size_t e = 0; e < ks.size(); ++e) {
        double v = 0;
        if (ks[e] == EstimatorKind::F)
          v = std::norm(inner_product(id.psi, s)) / norm;
        else if (ks[e] == EstimatorKind::DFE)
          continue;
        else
          v = from_sums(ks[e], sums, id.dist);
        sum[k][e] += v;
        sum2[k][e] += v * v;
      }
      if (want_dfe) {
        PureState c = s;
        c.normalize();
        kept[k].push_back(std::move(c));
      }
      ++k;
    };
    run_noisy_trajectory(circ, *cfg.noise, rng, observer, &profile);
  }
  CircuitEval ev(depths.size(), ks.size());
  const double Td = static_cast<double>(T);
  for (size_t k = 0; k < depths.size(); ++k) {
    for (size_t e = 0; e < ks.size(); ++e) {
      if (ks[e] == EstimatorKind::DFE) {
        Rng rng = Rng::stream(circ.seed, {kTagDfe, static_cast<uint64_t>(depths[k])});
        const auto& states = kept[k];
        const auto v = dfe(ideal[k].psi,
                           [&](const PauliString& p) {
                             double acc = 0;
                             for (const auto& s : states) acc += pauli_expectation(s.amplitudes, p);
                             return acc / static_cast<double>(states.size());
                           },
                           static_cast<size_t>(cfg.dfe_paulis), 0, rng);
        ev.value[k][e] = v.value;
        ev.within[k][e] = v.stderr_ ? *v.stderr_ * *v.stderr_ : 0.0;
        continue;
      }
      const double m = sum[k][e] / Td;
      ev.value[k][e] = m;
      ev.within[k][e] = T > 1 ? std::max(0.0, (sum2[k][e] - Td * m * m) / (Td - 1)) / Td : 0.0;
    }
  }
  return ev;
}

// One bitstring per trajectory from the normalized trajectory state.
CircuitEval eval_noisy_sampling(const BenchmarkConfig& cfg, const Circuit& circ, const std::vector<int>& depths) {
  const auto ideal = ideal_states(circ, depths);
  const auto& ks = cfg.estimators;
  const size_t T = static_cast<size_t>(cfg.trajectories);
  const DecayProfile profile = decay_profile(*cfg.noise);
  std::vector<std::vector<uint64_t>> xs(depths.size());
  std::vector<std::vector<double>> fids(depths.size());
  for (size_t t = 0; t < T; ++t) {
    Rng rng = Rng::stream(circ.seed, {kTagTrajectory, t});
    Rng pick = Rng::stream(circ.seed, {kTagSample, t});
    size_t k = 0;
    auto observer = [&](int depth, const PureState& s) {
      if (k >= depths.size() || depths[k] != depth) return;
      PureState c = s;
      c.normalize();
      xs[k].push_back(sample_bitstrings(c, 1, pick).front());
      fids[k].push_back(std::norm(inner_product(ideal[k].psi, c)));
      ++k;
    };
    run_noisy_trajectory(circ, *cfg.noise, rng, observer, &profile);
  }
  CircuitEval ev(depths.size(), ks.size());
  for (size_t k = 0; k < depths.size(); ++k) {
    const auto& id = ideal[k].dist;
    for (size_t e = 0; e < ks.size(); ++e) {
      EstimatorValue v;
      switch (ks[e]) {
        case EstimatorKind::uXEB: v = uxeb_samples(xs[k], id); break;
        case EstimatorKind::XEB: v = xeb_samples(xs[k], id); break;
        case EstimatorKind::logXEB: v = logxeb_samples(xs[k], id); break;
        case EstimatorKind::HOG: v = hog_samples(xs[k], id); break;
        case EstimatorKind::F: {
          v.value = mean_of(fids[k]);
          if (T > 1) v.stderr_ = std::sqrt(sample_variance(fids[k]) / static_cast<double>(T));
          break;
        }
        default: throw std::logic_error("sampling backend: unsupported estimator");
      }
      ev.value[k][e] = v.value;
      ev.within[k][e] = v.stderr_ ? *v.stderr_ * *v.stderr_ : 0.0;
    }
  }
  return ev;
}

CircuitEval eval_circuit(const BenchmarkConfig& cfg, const Circuit& circ, const std::vector<int>& depths) {
  if (cfg.backend == Backend::density) return eval_density(cfg, circ, depths);
  if (!cfg.noise) return eval_ideal(cfg, circ, depths);
  if (cfg.backend == Backend::mcwf) return eval_mcwf(cfg, circ, depths);
  return eval_noisy_sampling(cfg, circ, depths);
}

}  // namespace

BenchmarkReport rcs_benchmark(const BenchmarkConfig& cfg) {
  validate_config(cfg);
  const auto& depths = cfg.depths;
  const size_t nd = depths.size(), nk = cfg.estimators.size(), L = static_cast<size_t>(cfg.L);
  // results[depth index][circuit][estimator]
  std::vector<std::vector<std::vector<double>>> val(nd, std::vector<std::vector<double>>(L)), within = val;
  std::vector<std::vector<uint64_t>> seeds(nd, std::vector<uint64_t>(L));
  auto run = [&](const Circuit& circ, const std::vector<int>& ds, size_t first_k, size_t c) {
    CircuitEval ev = [&] {
      try {
        return eval_circuit(cfg, circ, ds);
      } catch (const ConfigError&) {
        throw;
      } catch (const std::exception& e) {
        std::stringstream ss;
        ss << "rcs_benchmark: circuit " << c << " (seed " << circ.seed << ", depth " << circ.depth()
           << "): " << e.what();
        throw std::runtime_error(ss.str());
      }
    }();
    for (size_t j = 0; j < ds.size(); ++j) {
      seeds[first_k + j][c] = circ.seed;
      val[first_k + j][c] = std::move(ev.value[j]);
      within[first_k + j][c] = std::move(ev.within[j]);
    }
  };
  if (cfg.circuit_mode == CircuitMode::prefix) {
    parallel_for(L, cfg.threads, [&](size_t c) {
      const Circuit circ =
          sample_rqc(cfg.n, depths.back(), cfg.gate_set, cfg.boundary, derive_seed(cfg.master_seed, {0xC1, c}));
      run(circ, depths, 0, c);
    });
  } else {
    parallel_for(nd * L, cfg.threads, [&](size_t u) {
      const size_t k = u / L, c = u % L;
      const auto d = static_cast<uint64_t>(depths[k]);
      const Circuit circ =
          sample_rqc(cfg.n, depths[k], cfg.gate_set, cfg.boundary, derive_seed(cfg.master_seed, {0xD1, d, c}));
      run(circ, {depths[k]}, k, c);
    });
  }
  BenchmarkReport rep;
  rep.config = cfg;
  rep.circuit_seeds = std::move(seeds);
  if (cfg.noise) rep.lambda_true = enr_of_model(*cfg.noise);
  const int M = cfg.backend == Backend::density          ? 0
                : !cfg.noise && cfg.backend == Backend::mcwf ? 1
                : cfg.backend == Backend::statevec_sampling && !cfg.noise ? cfg.samples
                                                                          : cfg.trajectories;
  const auto [lo, hi] = default_fit_range(cfg);
  for (size_t e = 0; e < nk; ++e) {
    EstimatorSeries s;
    s.kind = cfg.estimators[e];
    for (size_t k = 0; k < nd; ++k) {
      std::vector<double> v(L), w(L);
      for (size_t c = 0; c < L; ++c) {
        v[c] = val[k][c][e];
        w[c] = within[k][c][e];
      }
      s.points.push_back(aggregate_depth(depths[k], v, w, M));
    }
    try {
      s.fit = fit_exponential(s.points, lo, hi);
    } catch (const std::exception& ex) {
      s.fit_error = ex.what();
    }
    rep.series.push_back(std::move(s));
  }
  return rep;
}

namespace {

// Fit P(s) = A f^s + B. Constant unit survival is reported as f = 1 exactly.
void fit_rb_pair(PairFit& pf, double conversion) {
  const auto& pts = pf.survival;
  bool constant = true;
  for (const auto& p : pts)
    if (std::abs(p.mean - 1.0) > 1e-9) constant = false;
  if (constant) {
    pf.A = 0;
    pf.B = 1;
    pf.f = 1;
    pf.sigma_f = 0;
    pf.e = 0;
    pf.sigma_e = 0;
    return;
  }
  const size_t N = pts.size();
  if (N < 4) throw std::runtime_error("rb fit needs at least 4 sequence lengths");
  bool weighted = true;
  for (const auto& p : pts)
    if (!p.stderr_ || !(*p.stderr_ > 0)) weighted = false;
  Eigen::VectorXd s(N), y(N), w(N);
  for (size_t i = 0; i < N; ++i) {
    s(i) = pts[i].depth;
    y(i) = pts[i].mean;
    w(i) = weighted ? 1.0 / *pts[i].stderr_ : 1.0;
  }
  Eigen::VectorXd x0(3);
  const double B0 = 0.25;
  x0 << 0.75, 0.9, B0;
  if (((y.array() - B0) > 0).all()) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < N; ++i) {
      const double ly = std::log(y(i) - B0);
      sx += s(i);
      sy += ly;
      sxx += s(i) * s(i);
      sxy += s(i) * ly;
    }
    const double nn = static_cast<double>(N);
    const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    x0(0) = std::exp((sy - slope * sx) / nn);
    x0(1) = std::clamp(std::exp(slope), 0.05, 1.0);
  }
  auto fn = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd& jac) {
    r.resize(static_cast<Eigen::Index>(N));
    jac.resize(static_cast<Eigen::Index>(N), 3);
    for (size_t i = 0; i < N; ++i) {
      const double fs = std::pow(x(1), s(i));
      r(i) = w(i) * (y(i) - x(0) * fs - x(2));
      jac(i, 0) = -w(i) * fs;
      jac(i, 1) = -w(i) * x(0) * s(i) * std::pow(x(1), s(i) - 1);
      jac(i, 2) = -w(i);
    }
  };
  LmResult lm;
  try {
    lm = levenberg_marquardt(fn, x0);
  } catch (const std::exception& ex) {
    std::stringstream ss;
    ss << "rb fit failed for pair (" << pf.pair.first << "," << pf.pair.second << "): " << ex.what();
    throw std::runtime_error(ss.str());
  }
  Eigen::MatrixXd cov = lm.jtj_inverse;
  if (!weighted) cov *= N > 3 ? lm.rss / static_cast<double>(N - 3) : 0.0;
  pf.A = lm.x(0);
  pf.f = lm.x(1);
  pf.B = lm.x(2);
  pf.sigma_f = std::sqrt(std::max(0.0, cov(1, 1)));
  pf.e = conversion * (1 - pf.f);
  pf.sigma_e = conversion * pf.sigma_f;
}

// Probability that qubits a and b both read 0.
double pair_survival(const std::vector<double>& probs, int n, int a, int b) {
  const uint64_t mask = (uint64_t{1} << qubit_bit(n, a)) | (uint64_t{1} << qubit_bit(n, b));
  double acc = 0;
  for (uint64_t x = 0; x < probs.size(); ++x)
    if ((x & mask) == 0) acc += probs[x];
  return acc;
}

}  // namespace

RbReport simultaneous_rb(const RbConfig& cfg) {
  if (cfg.n < 2) throw ConfigError("rb: n must be >= 2");
  if (cfg.boundary == Boundary::ring && cfg.n % 2 != 0) throw ConfigError("rb: ring boundary requires even n");
  if (cfg.backend == Backend::statevec_sampling) throw ConfigError("rb: backend must be mcwf or density");
  if (cfg.backend == Backend::density && cfg.n > kMaxDensityQubits) throw ConfigError("rb: density requires n <= 10");
  if (cfg.lengths.size() < 4) throw ConfigError("rb: need at least 4 sequence lengths");
  for (size_t i = 0; i < cfg.lengths.size(); ++i)
    if (cfg.lengths[i] < 1 || (i > 0 && cfg.lengths[i] <= cfg.lengths[i - 1]))
      throw ConfigError("rb: sequence lengths must be positive and strictly increasing");
  if (cfg.sequences < 1 || cfg.trajectories < 1) throw ConfigError("rb: sequences and trajectories must be >= 1");
  if (cfg.noise && cfg.noise->n != cfg.n) throw ConfigError("rb: noise model qubit count differs from n");

  const int n = cfg.n;
  const size_t nl = cfg.lengths.size(), S = static_cast<size_t>(cfg.sequences);
  std::vector<std::vector<std::pair<int, int>>> patterns{layer_pairs(n, 1, cfg.boundary),
                                                         layer_pairs(n, 2, cfg.boundary)};
  std::optional<DecayProfile> profile;
  if (cfg.noise && cfg.backend == Backend::mcwf) profile = decay_profile(*cfg.noise);
  // surv[parity][length][sequence][pair]
  std::vector<std::vector<std::vector<std::vector<double>>>> surv(
      2, std::vector<std::vector<std::vector<double>>>(nl, std::vector<std::vector<double>>(S)));
  parallel_for(2 * nl * S, cfg.threads, [&](size_t u) {
    const size_t par = u / (nl * S), li = (u / S) % nl, j = u % S;
    const auto& pairs = patterns[par];
    const int len = cfg.lengths[li];
    Circuit circ;
    circ.n = n;
    circ.boundary = cfg.boundary;
    circ.seed = derive_seed(cfg.seed, {par + 1, static_cast<uint64_t>(len), j});
    Rng rng(circ.seed);
    std::vector<CMatrix> acc(pairs.size(), CMatrix::Identity(4, 4));
    for (int s = 0; s < len; ++s) {
      Layer layer;
      for (size_t p = 0; p < pairs.size(); ++p) {
        CMatrix g = sample_haar_unitary(4, rng);
        acc[p] = g * acc[p];
        layer.gates.push_back({{pairs[p].first, pairs[p].second}, std::move(g)});
      }
      circ.layers.push_back(std::move(layer));
    }
    Layer inverse;
    for (size_t p = 0; p < pairs.size(); ++p)
      inverse.gates.push_back({{pairs[p].first, pairs[p].second}, acc[p].adjoint()});
    circ.layers.push_back(std::move(inverse));

    std::vector<double> probs(size_t{1} << n, 0.0);
    if (cfg.backend == Backend::density) {
      probs = run_noisy_density(circ, cfg.noise ? &*cfg.noise : nullptr).diagonal();
    } else if (!cfg.noise) {
      probs = probabilities(run_circuit(circ));
    } else {
      const size_t T = static_cast<size_t>(cfg.trajectories);
      for (size_t t = 0; t < T; ++t) {
        Rng trng = Rng::stream(circ.seed, {kTagTrajectory, t});
        const PureState s = run_noisy_trajectory(circ, *cfg.noise, trng, nullptr, &*profile);
        for (size_t x = 0; x < probs.size(); ++x) probs[x] += std::norm(s.amplitudes[x]) / static_cast<double>(T);
      }
    }
    std::vector<double> out;
    for (const auto& pr : pairs) out.push_back(pair_survival(probs, n, pr.first, pr.second));
    surv[par][li][j] = std::move(out);
  });

  RbReport rep;
  rep.config = cfg;
  if (cfg.noise) rep.lambda_true = enr_of_model(*cfg.noise);
  double log_sum = 0;
  for (size_t par = 0; par < 2; ++par) {
    for (size_t p = 0; p < patterns[par].size(); ++p) {
      PairFit pf;
      pf.pair = pair_key(patterns[par][p].first, patterns[par][p].second);
      pf.parity = static_cast<int>(par) + 1;
      for (size_t li = 0; li < nl; ++li) {
        std::vector<double> v;
        for (size_t j = 0; j < S; ++j) v.push_back(surv[par][li][j][p]);
        pf.survival.push_back(aggregate_depth(cfg.lengths[li], v, {}, cfg.backend == Backend::mcwf ? cfg.trajectories : 0));
      }
      fit_rb_pair(pf, cfg.conversion);
      rep.error_rates[pf.pair] = pf.e;
      log_sum += std::log1p(-pf.e);
      rep.pairs.push_back(std::move(pf));
    }
  }
  rep.lambda_srb = -0.5 * log_sum;
  return rep;
}

double virtual_gamma3(double Gamma1, double Gamma2, double lambda, int n) {
  return Gamma1 / 4 + Gamma2 / 4 - lambda / n;
}

double virtual_lambda(int n, double gamma1, double gamma2, double gamma3) {
  return n * (gamma1 / 2 + gamma2 / 4 + gamma3);
}

double virtual_Gamma2(double gamma1, double gamma2, double gamma3) { return gamma1 + gamma2 + 8 * gamma3; }

namespace {

enum class FreeProbe { excited, coherence };

// Mean over qubits of P(|1>) or <X> at t = 1..t_max of free evolution.
std::vector<DepthPoint> free_evolution(const VirtualConfig& cfg, const NoiseModel& model, FreeProbe probe) {
  const int n = cfg.n;
  const size_t dim = size_t{1} << n;
  std::vector<DepthPoint> out;
  auto probe_density = [&](const DensityState& rho) {
    std::vector<double> per_qubit;
    if (probe == FreeProbe::excited) {
      const auto diag = rho.diagonal();
      for (int q = 0; q < n; ++q) {
        const uint64_t b = uint64_t{1} << qubit_bit(n, q);
        double acc = 0;
        for (uint64_t x = 0; x < dim; ++x)
          if (x & b) acc += diag[x];
        per_qubit.push_back(acc);
      }
    } else {
      for (int q = 0; q < n; ++q) {
        PauliString p;
        p.n = n;
        p.x_mask = uint64_t{1} << qubit_bit(n, q);
        per_qubit.push_back(pauli_expectation(rho, p));
      }
    }
    return per_qubit;
  };
  auto probe_state = [&](const PureState& s) {
    const double norm = s.norm2();
    double acc = 0;
    for (int q = 0; q < n; ++q) {
      const uint64_t b = uint64_t{1} << qubit_bit(n, q);
      if (probe == FreeProbe::excited) {
        for (uint64_t x = 0; x < dim; ++x)
          if (x & b) acc += std::norm(s.amplitudes[x]);
      } else {
        Complex e = 0;
        for (uint64_t x = 0; x < dim; ++x) e += std::conj(s.amplitudes[x ^ b]) * s.amplitudes[x];
        acc += e.real();
      }
    }
    return acc / (n * norm);
  };
  PureState init = PureState::zero(n);
  if (probe == FreeProbe::excited) {
    std::fill(init.amplitudes.begin(), init.amplitudes.end(), Complex(0.0));
    init.amplitudes[dim - 1] = 1.0;
  } else {
    std::fill(init.amplitudes.begin(), init.amplitudes.end(), Complex(1.0 / std::sqrt(static_cast<double>(dim))));
  }
  if (cfg.backend == Backend::density) {
    DensityState rho = DensityState::from_pure(init);
    for (int t = 1; t <= cfg.t_max; ++t) {
      evolve_density_unit_time(rho, model);
      DepthPoint p = aggregate_depth(t, probe_density(rho));
      // Exact expectation: the spread across qubits is not a sampling error.
      p.stderr_.reset();
      out.push_back(std::move(p));
    }
    return out;
  }
  const size_t T = static_cast<size_t>(cfg.trajectories);
  const DecayProfile profile = decay_profile(model);
  std::vector<std::vector<double>> vals(static_cast<size_t>(cfg.t_max), std::vector<double>(T));
  parallel_for(T, cfg.threads, [&](size_t t) {
    Trajectory tr = start_trajectory(init, Rng::stream(cfg.seed, {static_cast<uint64_t>(probe) + 0x71, t}));
    for (int step = 0; step < cfg.t_max; ++step) {
      evolve_unit_time(tr, model, profile);
      vals[static_cast<size_t>(step)][t] = probe_state(tr.state);
    }
  });
  for (int t = 1; t <= cfg.t_max; ++t)
    out.push_back(aggregate_depth(t, vals[static_cast<size_t>(t - 1)], {}, cfg.trajectories));
  return out;
}

}  // namespace

VirtualResult virtual_experiment(const VirtualConfig& cfg) {
  if (cfg.t_max < 3) throw ConfigError("virtual experiment: t_max must be >= 3");
  if (cfg.backend == Backend::statevec_sampling) throw ConfigError("virtual experiment: backend must be mcwf or density");
  if (cfg.backend == Backend::density && cfg.n > kMaxDensityQubits)
    throw ConfigError("virtual experiment: density requires n <= 10");
  const NoiseModel model = correlated_dephasing_model(cfg.n, cfg.gamma1, cfg.gamma2, cfg.gamma3);
  VirtualResult r;
  r.lambda_true = virtual_lambda(cfg.n, cfg.gamma1, cfg.gamma2, cfg.gamma3);
  r.t1_series = free_evolution(cfg, model, FreeProbe::excited);
  r.ramsey_series = free_evolution(cfg, model, FreeProbe::coherence);
  r.t1_fit = fit_exponential(r.t1_series);
  r.ramsey_fit = fit_exponential(r.ramsey_series);
  r.Gamma1 = r.t1_fit.lambda;
  r.sigma_Gamma1 = r.t1_fit.sigma_lambda;
  r.Gamma2 = 2 * r.ramsey_fit.lambda;
  r.sigma_Gamma2 = 2 * r.ramsey_fit.sigma_lambda;

  BenchmarkConfig bc = cfg.rcs;
  bc.n = cfg.n;
  bc.boundary = Boundary::ring;
  bc.noise = model;
  if (std::find(bc.estimators.begin(), bc.estimators.end(), EstimatorKind::uXEB) == bc.estimators.end())
    bc.estimators.push_back(EstimatorKind::uXEB);
  r.rcs = rcs_benchmark(bc);
  const auto& s = r.rcs.at(EstimatorKind::uXEB);
  if (!s.fit) throw std::runtime_error("virtual experiment: uXEB fit failed: " + s.fit_error);
  r.lambda = s.fit->lambda;
  r.sigma_lambda = s.fit->sigma_lambda;
  r.gamma3 = virtual_gamma3(r.Gamma1, r.Gamma2, r.lambda, cfg.n);
  r.sigma_gamma3 = std::sqrt(std::pow(r.sigma_Gamma1 / 4, 2) + std::pow(r.sigma_Gamma2 / 4, 2) +
                             std::pow(r.sigma_lambda / cfg.n, 2));
  return r;
}

namespace {

void paired_stats(Theorem1Result& r) {
  std::vector<double> diff(r.full.size());
  for (size_t i = 0; i < diff.size(); ++i) diff[i] = r.full[i] - r.diag[i];
  r.mean_full = mean_of(r.full);
  r.mean_diag = mean_of(r.diag);
  r.mean_diff = mean_of(diff);
  r.stderr_diff = diff.size() > 1 ? std::sqrt(sample_variance(diff) / static_cast<double>(diff.size())) : 0.0;
  if (r.stderr_diff > 0)
    r.z = r.mean_diff / r.stderr_diff;
  else
    r.z = r.mean_diff == 0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), r.mean_diff);
}

}  // namespace

Theorem1Result theorem1_check(int n, int d, const ProcessMatrix& chi, int L, uint64_t seed, GateSet gate_set,
                              int threads) {
  if (n > 6) throw ConfigError("theorem1_check: n must be <= 6");
  if (chi.k > 3) throw ConfigError("theorem1_check: channel support must be <= 3");
  if (L < 2) throw ConfigError("theorem1_check: L must be >= 2");
  const ProcessMatrix diag = diagonalize_channel(chi);
  Theorem1Result r;
  r.n = n;
  r.d = d;
  r.L = L;
  r.full.resize(static_cast<size_t>(L));
  r.diag.resize(static_cast<size_t>(L));
  parallel_for(static_cast<size_t>(L), threads, [&](size_t c) {
    const Circuit circ = sample_rqc(n, d, gate_set, Boundary::ring, derive_seed(seed, {c}));
    const PureState psi = run_circuit(circ);
    r.full[c] = fidelity(run_density_with_channel(circ, chi), psi);
    r.diag[c] = fidelity(run_density_with_channel(circ, diag), psi);
  });
  paired_stats(r);
  return r;
}

std::vector<FirstOrderRow> first_order_check(int n, int d_max, double eps, int L, uint64_t seed, int threads) {
  if (n > 8) throw ConfigError("first_order_check: n must be <= 8");
  if (d_max < 1 || L < 2) throw ConfigError("first_order_check: need d_max >= 1 and L >= 2");
  spin::check_ring_size(n);
  const ProcessMatrix chi = bit_flip_channel(eps);
  std::vector<int> depths(static_cast<size_t>(d_max));
  for (int d = 1; d <= d_max; ++d) depths[static_cast<size_t>(d - 1)] = d;
  std::vector<std::vector<double>> F(static_cast<size_t>(d_max), std::vector<double>(static_cast<size_t>(L)));
  parallel_for(static_cast<size_t>(L), threads, [&](size_t c) {
    const Circuit circ = sample_rqc(n, d_max, GateSet::haar2q, Boundary::ring, derive_seed(seed, {c}));
    const auto ideal = ideal_states(circ, depths);
    run_density_with_channel(circ, chi, [&](int depth, const DensityState& rho) {
      F[static_cast<size_t>(depth - 1)][c] = fidelity(rho, ideal[static_cast<size_t>(depth - 1)].psi);
    });
  });
  std::vector<FirstOrderRow> rows;
  for (int d = 1; d <= d_max; ++d) {
    FirstOrderRow row;
    row.d = d;
    const auto fo = spin::first_order_fidelity(n, d, eps);
    row.F0 = fo.F0;
    row.EF1 = fo.EF1;
    const auto& v = F[static_cast<size_t>(d - 1)];
    row.EF = mean_of(v);
    row.EF_stderr = std::sqrt(sample_variance(v) / static_cast<double>(L));
    row.first_ratio = row.EF1 / row.F0;
    row.second_ratio = (row.EF - row.F0 - row.EF1) / row.F0;
    rows.push_back(row);
  }
  return rows;
}

std::vector<TrajectoryAgreement> trajectory_agreement(int n, int d, const NoiseModel& model, int T, int circuits,
                                                      uint64_t seed, int threads) {
  if (n > kMaxDensityQubits) throw ConfigError("trajectory_agreement: n must be <= 10");
  if (T < 2 || circuits < 1) throw ConfigError("trajectory_agreement: need T >= 2 and circuits >= 1");
  std::vector<TrajectoryAgreement> out;
  for (int c = 0; c < circuits; ++c) {
    const Circuit circ =
        sample_rqc(n, d, GateSet::haar2q, Boundary::ring, derive_seed(seed, {static_cast<uint64_t>(c)}));
    TrajectoryAgreement a;
    a.circuit = c;
    a.density_fidelity = fidelity(run_noisy_density(circ, &model), circ);
    const auto ens =
        trajectory_ensemble(circ, model, T, derive_seed(seed, {static_cast<uint64_t>(c), 1}), false, threads);
    const double Td = T;
    a.trajectory_mean = ens.accumulator.fidelity_sum / Td;
    const double var = std::max(0.0, (ens.accumulator.fidelity_sq_sum - Td * a.trajectory_mean * a.trajectory_mean) /
                                         (Td - 1));
    a.trajectory_stderr = std::sqrt(var / Td);
    a.z = a.trajectory_stderr > 0 ? (a.trajectory_mean - a.density_fidelity) / a.trajectory_stderr : 0.0;
    out.push_back(a);
  }
  return out;
}

}  // namespace rcsbench
