#include "rcsbench/mcwf.h"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "rcsbench/parallel.h"

namespace rcsbench {
namespace {

constexpr size_t kMaxLevels = 4096;
constexpr double kNormTolerance = 1e-12;

}  // namespace

DecayProfile decay_profile(const NoiseModel& model) {
  DecayProfile prof;
  prof.n = model.n;
  const uint64_t dim = uint64_t{1} << model.n;
  prof.rates.assign(dim, 0.0);
  for (const auto& term : model.terms) {
    if (term.gamma == 0) continue;
    // Every supported kind is a monomial operator, so J^dag J is the
    // projector onto basis states it acts on.
    const MonomialOp m = term.op(model.n);
    for (uint64_t x = 0; x < dim; ++x)
      if (m.acts_on(x)) prof.rates[x] += term.gamma;
  }
  std::map<double, uint16_t> index;
  prof.level_of.assign(dim, 0);
  for (uint64_t x = 0; x < dim; ++x) {
    auto it = index.find(prof.rates[x]);
    if (it == index.end()) {
      if (index.size() >= kMaxLevels) {
        index.clear();
        break;
      }
      it = index.emplace(prof.rates[x], static_cast<uint16_t>(index.size())).first;
    }
    prof.level_of[x] = it->second;
  }
  if (index.empty()) {
    prof.level_of.clear();
  } else {
    prof.levels.assign(index.size(), 0.0);
    for (const auto& [rate, k] : index) prof.levels[k] = rate;
  }
  return prof;
}

Trajectory start_trajectory(PureState state, Rng rng) {
  Trajectory t{std::move(state), 1.0, std::move(rng), 0};
  t.threshold = t.rng.uniform_open();
  return t;
}

std::optional<double> jump_time(const PureState& state, const DecayProfile& profile, double p, double remaining) {
  if (profile.rates.size() != state.dim()) throw std::invalid_argument("jump_time: profile size mismatch");
  std::vector<double> w, g;
  if (profile.grouped()) {
    w.assign(profile.levels.size(), 0.0);
    for (size_t x = 0; x < state.dim(); ++x) w[profile.level_of[x]] += std::norm(state.amplitudes[x]);
    g = profile.levels;
  } else {
    w.resize(state.dim());
    for (size_t x = 0; x < state.dim(); ++x) w[x] = std::norm(state.amplitudes[x]);
    g = profile.rates;
  }
  double norm0 = 0;
  for (double v : w) norm0 += v;
  if (p >= norm0) return 0.0;
  auto f = [&](double t) {
    double s = 0;
    for (size_t k = 0; k < w.size(); ++k) s += w[k] * std::exp(-g[k] * t);
    return s - p;
  };
  auto df = [&](double t) {
    double s = 0;
    for (size_t k = 0; k < w.size(); ++k) s -= g[k] * w[k] * std::exp(-g[k] * t);
    return s;
  };
  if (f(remaining) > 0) return std::nullopt;
  double lo = 0, hi = remaining;
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0 ? lo : hi) = mid;
  }
  double t = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double fv = f(t);
    if (std::abs(fv) <= kNormTolerance) break;
    (fv > 0 ? lo : hi) = t;
    const double d = df(t);
    double next = d != 0 ? t - fv / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo < 1e-15) break;
    t = next;
  }
  return t;
}

void decay_state(PureState& state, const DecayProfile& profile, double t) {
  if (t == 0) return;
  if (profile.grouped()) {
    std::vector<double> factor(profile.levels.size());
    for (size_t k = 0; k < factor.size(); ++k) factor[k] = std::exp(-0.5 * profile.levels[k] * t);
    for (size_t x = 0; x < state.dim(); ++x) state.amplitudes[x] *= factor[profile.level_of[x]];
  } else {
    for (size_t x = 0; x < state.dim(); ++x) state.amplitudes[x] *= std::exp(-0.5 * profile.rates[x] * t);
  }
}

std::vector<double> jump_weights(const PureState& state, const NoiseModel& model) {
  std::vector<double> probs(state.dim());
  double norm = 0;
  for (size_t x = 0; x < state.dim(); ++x) norm += probs[x] = std::norm(state.amplitudes[x]);
  // Excited-population cache for single-bit conditions.
  std::map<uint64_t, double> cache;
  std::vector<double> w;
  w.reserve(model.terms.size());
  for (const auto& term : model.terms) {
    const MonomialOp m = term.op(model.n);
    double e;
    if (m.need == 0) {
      e = norm;
    } else if (auto it = cache.find(m.need); it != cache.end()) {
      e = it->second;
    } else {
      e = 0;
      for (uint64_t x = 0; x < state.dim(); ++x)
        if (m.acts_on(x)) e += probs[x];
      cache.emplace(m.need, e);
    }
    w.push_back(term.gamma * e);
  }
  return w;
}

size_t select_jump(const PureState& state, const NoiseModel& model, Rng& rng) {
  const auto w = jump_weights(state, model);
  double total = 0;
  for (double v : w) total += v;
  if (!(total > 0)) throw std::runtime_error("select_jump: no jump possible (all jump weights are zero)");
  const double u = rng.uniform() * total;
  double acc = 0;
  for (size_t l = 0; l < w.size(); ++l) {
    acc += w[l];
    if (u < acc && w[l] > 0) return l;
  }
  for (size_t l = w.size(); l-- > 0;)
    if (w[l] > 0) return l;
  return 0;
}

void apply_jump(PureState& state, const CollapseTerm& term) {
  const MonomialOp m = term.op(state.n);
  CVec out(state.dim(), Complex(0, 0));
  double norm = 0;
  for (uint64_t x = 0; x < state.dim(); ++x) {
    if (!m.acts_on(x)) continue;
    const Complex v = m.phase(x) * state.amplitudes[x];
    out[x ^ m.flip] = v;
    norm += std::norm(v);
  }
  if (!(norm > 0)) throw std::runtime_error("apply_jump: collapse operator annihilates the state");
  const double s = 1.0 / std::sqrt(norm);
  for (auto& a : out) a *= s;
  state.amplitudes = std::move(out);
}

void evolve_unit_time(Trajectory& traj, const NoiseModel& model, const DecayProfile& profile) {
  double remaining = 1.0;
  for (;;) {
    const auto t = jump_time(traj.state, profile, traj.threshold, remaining);
    if (!t) {
      decay_state(traj.state, profile, remaining);
      return;
    }
    decay_state(traj.state, profile, *t);
    remaining -= *t;
    const size_t l = select_jump(traj.state, model, traj.rng);
    apply_jump(traj.state, model.terms[l]);
    ++traj.jumps;
    traj.threshold = traj.rng.uniform_open();
    if (remaining <= 0) return;
  }
}

PureState run_noisy_trajectory(const Circuit& circuit, const NoiseModel& model, Rng& rng,
                               const TrajectoryObserver& observer, const DecayProfile* profile) {
  if (model.n != circuit.n) throw std::invalid_argument("run_noisy_trajectory: model/circuit n mismatch");
  DecayProfile local;
  if (!profile) {
    local = decay_profile(model);
    profile = &local;
  }
  Trajectory traj = start_trajectory(PureState::zero(circuit.n), rng);
  int depth = 0;
  for (const auto& layer : circuit.layers) {
    apply_layer(traj.state, layer);
    if (layer.injected) continue;
    ++depth;
    evolve_unit_time(traj, model, *profile);
    if (observer) observer(depth, traj.state);
  }
  rng = traj.rng;
  traj.state.normalize();
  return traj.state;
}

void TrajectoryAccumulator::add(double p_weighted, double fid) {
  ++T;
  sum_p_weighted += p_weighted;
  sum_p_weighted_sq += p_weighted * p_weighted;
  fidelity_sum += fid;
  fidelity_sq_sum += fid * fid;
}

void TrajectoryAccumulator::merge(const TrajectoryAccumulator& o) {
  T += o.T;
  sum_p_weighted += o.sum_p_weighted;
  sum_p_weighted_sq += o.sum_p_weighted_sq;
  fidelity_sum += o.fidelity_sum;
  fidelity_sq_sum += o.fidelity_sq_sum;
}

EnsembleResult trajectory_ensemble(const Circuit& circuit, const NoiseModel& model, int T, uint64_t master_seed,
                                   bool keep_states, int threads) {
  if (T < 1) throw std::invalid_argument("trajectory_ensemble: T must be >= 1");
  const PureState ideal = run_circuit(circuit);
  const auto p = probabilities(ideal);
  const DecayProfile profile = decay_profile(model);
  std::vector<double> pw(static_cast<size_t>(T)), fid(static_cast<size_t>(T));
  std::vector<PureState> states(keep_states ? static_cast<size_t>(T) : 0);
  parallel_for(static_cast<size_t>(T), threads, [&](size_t t) {
    Rng rng = Rng::stream(master_seed, {t});
    PureState s = run_noisy_trajectory(circuit, model, rng, nullptr, &profile);
    double acc = 0;
    for (size_t x = 0; x < s.dim(); ++x) acc += p[x] * std::norm(s.amplitudes[x]);
    pw[t] = acc;
    fid[t] = std::norm(inner_product(ideal, s));
    if (keep_states) states[t] = std::move(s);
  });
  EnsembleResult r;
  r.accumulator.circuit_seed = circuit.seed;
  r.accumulator.model = model.name;
  for (double v : p) r.accumulator.sum_p_sq += v * v;
  for (size_t t = 0; t < pw.size(); ++t) r.accumulator.add(pw[t], fid[t]);
  r.states = std::move(states);
  return r;
}

}  // namespace rcsbench
