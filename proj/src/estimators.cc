#include "rcsbench/estimators.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace rcsbench {
namespace {

constexpr double kTinyProbability = 1e-300;

EstimatorValue make(EstimatorKind k, double v, std::optional<double> se = std::nullopt) {
  return EstimatorValue{k, v, se};
}

double denominator(const IdealDistribution& ideal) { return ideal.dim() * ideal.sum_p_sq - 1.0; }

// Mean and standard error of D * p(x_i) over the samples.
template <class F>
std::pair<double, double> sample_moments(std::span<const uint64_t> samples, const IdealDistribution& ideal, F&& f) {
  if (samples.empty()) throw std::invalid_argument("sample estimator: no samples");
  double sum = 0, sum2 = 0;
  for (uint64_t x : samples) {
    if (x >= ideal.probs.size()) throw std::out_of_range("sample estimator: bitstring out of range");
    const double v = f(ideal.probs[x]);
    sum += v;
    sum2 += v * v;
  }
  const double m = static_cast<double>(samples.size());
  const double mean = sum / m;
  double se = 0;
  if (samples.size() > 1) {
    const double var = std::max(0.0, (sum2 - m * mean * mean) / (m - 1));
    se = std::sqrt(var / m);
  }
  return {mean, se};
}

std::pair<double, double> sample_moments(std::span<const uint64_t> samples, const IdealDistribution& ideal) {
  const double d = ideal.dim();
  return sample_moments(samples, ideal, [d](double p) { return d * p; });
}

}  // namespace

std::string to_string(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::F: return "F";
    case EstimatorKind::uXEB: return "uXEB";
    case EstimatorKind::XEB: return "XEB";
    case EstimatorKind::logXEB: return "logXEB";
    case EstimatorKind::HOG: return "HOG";
    case EstimatorKind::DFE: return "DFE";
    case EstimatorKind::sRB: return "sRB";
  }
  return "?";
}

EstimatorKind parse_estimator_kind(const std::string& s) {
  for (auto k : {EstimatorKind::F, EstimatorKind::uXEB, EstimatorKind::XEB, EstimatorKind::logXEB, EstimatorKind::HOG,
                 EstimatorKind::DFE, EstimatorKind::sRB})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown estimator kind '" + s + "'");
}

IdealDistribution IdealDistribution::from_probs(int n, std::vector<double> probs) {
  if (probs.size() != (size_t{1} << n)) throw std::invalid_argument("IdealDistribution: size must be 2^n");
  IdealDistribution d;
  d.n = n;
  d.probs = std::move(probs);
  for (double p : d.probs) {
    if (p < 0) throw std::invalid_argument("IdealDistribution: negative probability");
    d.sum_p_sq += p * p;
  }
  return d;
}

IdealDistribution IdealDistribution::from_state(const PureState& state) {
  return from_probs(state.n, probabilities(state));
}

EstimatorValue xeb_samples(std::span<const uint64_t> samples, const IdealDistribution& ideal) {
  auto [mean, se] = sample_moments(samples, ideal);
  return make(EstimatorKind::XEB, mean - 1.0, se);
}

EstimatorValue uxeb_samples(std::span<const uint64_t> samples, const IdealDistribution& ideal) {
  const double den = denominator(ideal);
  if (den <= 1e-12) throw std::invalid_argument("uxeb: degenerate denominator (ideal distribution is uniform)");
  auto [mean, se] = sample_moments(samples, ideal);
  return make(EstimatorKind::uXEB, (mean - 1.0) / den, se / den);
}

void LinearSums::add_scaled(const LinearSums& o, double w) {
  q_total += w * o.q_total;
  pq += w * o.pq;
  q_logp += w * o.q_logp;
  q_heavy += w * o.q_heavy;
}

LinearSums linear_sums(std::span<const double> q, const IdealDistribution& ideal, bool need_log) {
  if (q.size() != ideal.probs.size()) throw std::invalid_argument("estimator: q and p sizes differ");
  const double heavy = std::numbers::ln2 / ideal.dim();
  LinearSums s;
  for (size_t x = 0; x < q.size(); ++x) {
    const double qx = q[x], px = ideal.probs[x];
    s.q_total += qx;
    s.pq += px * qx;
    if (px >= heavy) s.q_heavy += qx;
    if (need_log && qx > 0) {
      if (px < kTinyProbability) {
        std::stringstream ss;
        ss << "logXEB: ideal probability " << px << " at x=" << x << " has nonzero noisy weight";
        throw std::domain_error(ss.str());
      }
      s.q_logp += qx * std::log(px);
    }
  }
  const double inv = 1.0 / s.q_total;
  s.pq *= inv;
  s.q_logp *= inv;
  s.q_heavy *= inv;
  s.q_total = 1.0;
  return s;
}

LinearSums linear_sums_from_amplitudes(const CVec& amps, const IdealDistribution& ideal, bool need_log) {
  std::vector<double> q(amps.size());
  for (size_t x = 0; x < amps.size(); ++x) q[x] = std::norm(amps[x]);
  return linear_sums(q, ideal, need_log);
}

double uxeb_from_sums(const LinearSums& s, const IdealDistribution& ideal) {
  const double den = denominator(ideal);
  if (den <= 1e-12) throw std::invalid_argument("uxeb: degenerate denominator (ideal distribution is uniform)");
  return (ideal.dim() * s.pq - 1.0) / den;
}

double xeb_from_sums(const LinearSums& s, const IdealDistribution& ideal) { return ideal.dim() * s.pq - 1.0; }

double logxeb_from_sums(const LinearSums& s, const IdealDistribution& ideal) {
  return std::log(ideal.dim()) + kEulerGamma + s.q_logp;
}

double hog_from_sums(const LinearSums& s, const IdealDistribution&) {
  return (2.0 * s.q_heavy - 1.0) / std::numbers::ln2;
}

EstimatorValue logxeb_samples(std::span<const uint64_t> samples, const IdealDistribution& ideal) {
  auto [mean, se] = sample_moments(samples, ideal, [](double p) {
    if (p < 1e-300) throw std::domain_error("logxeb: sampled bitstring has zero ideal probability");
    return std::log(p);
  });
  return make(EstimatorKind::logXEB, std::log(ideal.dim()) + kEulerGamma + mean, se);
}

EstimatorValue hog_samples(std::span<const uint64_t> samples, const IdealDistribution& ideal) {
  const double heavy = std::numbers::ln2 / ideal.dim();
  auto [mean, se] = sample_moments(samples, ideal, [heavy](double p) { return p >= heavy ? 1.0 : 0.0; });
  return make(EstimatorKind::HOG, (2.0 * mean - 1.0) / std::numbers::ln2, 2.0 * se / std::numbers::ln2);
}

EstimatorValue uxeb_full(std::span<const double> q, const IdealDistribution& ideal) {
  return make(EstimatorKind::uXEB, uxeb_from_sums(linear_sums(q, ideal, false), ideal));
}

EstimatorValue xeb_full(std::span<const double> q, const IdealDistribution& ideal) {
  return make(EstimatorKind::XEB, xeb_from_sums(linear_sums(q, ideal, false), ideal));
}

EstimatorValue logxeb_full(std::span<const double> q, const IdealDistribution& ideal) {
  return make(EstimatorKind::logXEB, logxeb_from_sums(linear_sums(q, ideal, true), ideal));
}

EstimatorValue hog_full(std::span<const double> q, const IdealDistribution& ideal) {
  return make(EstimatorKind::HOG, hog_from_sums(linear_sums(q, ideal, false), ideal));
}

PauliString pauli_from_index(int n, uint64_t index) {
  PauliString p;
  p.n = n;
  const uint64_t mask = (uint64_t{1} << n) - 1;
  p.x_mask = (index >> n) & mask;
  p.z_mask = index & mask;
  return p;
}

std::vector<double> pauli_expectations_all(const PureState& psi) {
  const int n = psi.n;
  if (n > kMaxDfeQubits) {
    std::stringstream ss;
    ss << "Pauli expectation table limited to n <= " << kMaxDfeQubits;
    throw std::invalid_argument(ss.str());
  }
  const uint64_t dim = psi.dim();
  std::vector<double> out(dim * dim);
  CVec g(dim);
  for (uint64_t xm = 0; xm < dim; ++xm) {
    // g(x) = conj(psi(x ^ xm)) psi(x); a Walsh-Hadamard transform over x
    // then gives sum_x (-1)^{x.z} g(x) for every z mask.
    for (uint64_t x = 0; x < dim; ++x) g[x] = std::conj(psi.amplitudes[x ^ xm]) * psi.amplitudes[x];
    for (uint64_t h = 1; h < dim; h <<= 1)
      for (uint64_t i = 0; i < dim; i += 2 * h)
        for (uint64_t j = i; j < i + h; ++j) {
          const Complex a = g[j], b = g[j + h];
          g[j] = a + b;
          g[j + h] = a - b;
        }
    for (uint64_t zm = 0; zm < dim; ++zm) {
      const int ny = popcount(xm & zm);
      // i^{#Y} times a value that is real up to that phase.
      Complex v = g[zm];
      switch (ny & 3) {
        case 1: v *= Complex(0, 1); break;
        case 2: v = -v; break;
        case 3: v *= Complex(0, -1); break;
        default: break;
      }
      out[(xm << n) | zm] = v.real();
    }
  }
  return out;
}

EstimatorValue dfe(const PureState& ideal, const PauliExpectation& noisy, size_t K, size_t shots, Rng& rng) {
  if (K == 0) throw std::invalid_argument("dfe: K must be >= 1");
  const auto chars = pauli_expectations_all(ideal);
  const double norm = ideal.norm2();
  // Sampling weights gamma_alpha^2 are proportional to <sigma_alpha>^2.
  std::vector<double> w(chars.size());
  double total = 0;
  for (size_t a = 0; a < chars.size(); ++a) total += w[a] = chars[a] * chars[a] / (norm * norm);
  std::vector<double> cdf(w.size());
  double acc = 0;
  for (size_t a = 0; a < w.size(); ++a) cdf[a] = acc += w[a];
  std::vector<double> ratios;
  ratios.reserve(K);
  for (size_t i = 0; i < K; ++i) {
    const double u = rng.uniform() * total;
    size_t a = static_cast<size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    if (a >= w.size()) a = w.size() - 1;
    const double ideal_e = chars[a] / norm;
    if (std::abs(ideal_e) < 1e-300) throw std::runtime_error("dfe: drew a Pauli with zero ideal expectation");
    const PauliString p = pauli_from_index(ideal.n, a);
    double e = noisy(p);
    if (shots > 0) {
      const double plus = std::clamp(0.5 * (1 + e), 0.0, 1.0);
      long count = 0;
      for (size_t s = 0; s < shots; ++s) count += rng.uniform() < plus ? 1 : -1;
      e = static_cast<double>(count) / static_cast<double>(shots);
    }
    ratios.push_back(e / ideal_e);
  }
  double mean = 0;
  for (double r : ratios) mean += r;
  mean /= static_cast<double>(K);
  std::optional<double> se;
  if (K > 1) {
    double var = 0;
    for (double r : ratios) var += (r - mean) * (r - mean);
    se = std::sqrt(var / static_cast<double>(K - 1) / static_cast<double>(K));
  }
  return make(EstimatorKind::DFE, mean, se);
}

EstimatorValue srb_estimate(std::span<const double> e) {
  double f = 1;
  for (double v : e) {
    if (!(v >= 0 && v < 1)) throw std::invalid_argument("srb_estimate: error rates must lie in [0, 1)");
    f *= 1 - v;
  }
  return make(EstimatorKind::sRB, f);
}

PairKey pair_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

EstimatorValue srb_estimate(const std::map<PairKey, double>& rates, const Circuit& circuit) {
  std::vector<double> e;
  for (const auto& layer : circuit.layers) {
    if (layer.injected) continue;
    for (const auto& g : layer.gates) {
      if (g.targets.size() != 2) continue;
      auto it = rates.find(pair_key(g.targets[0], g.targets[1]));
      if (it == rates.end()) {
        std::stringstream ss;
        ss << "srb_estimate: no error rate for pair (" << g.targets[0] << "," << g.targets[1] << ")";
        throw std::invalid_argument(ss.str());
      }
      e.push_back(it->second);
    }
  }
  return srb_estimate(e);
}

}  // namespace rcsbench
