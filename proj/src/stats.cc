#include "rcsbench/stats.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rcsbench/parallel.h"
#include "rcsbench/rng.h"
#include "rcsbench/statevec.h"

namespace rcsbench {

LmResult levenberg_marquardt(const ResidualFn& fn, Eigen::VectorXd x, int max_iterations, double rtol) {
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  fn(x, r, jac);
  double rss = r.squaredNorm();
  double mu = -1;
  LmResult res;
  int it = 0;
  for (; it < max_iterations; ++it) {
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * r;
    if (mu < 0) mu = 1e-3 * std::max(jtj.diagonal().maxCoeff(), 1e-300);
    if (g.norm() == 0 || rss == 0) {
      res.converged = true;
      break;
    }
    bool accepted = false;
    for (int tries = 0; tries < 60 && !accepted; ++tries) {
      Eigen::MatrixXd a = jtj;
      for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, i) += mu * std::max(jtj(i, i), 1e-300);
      const Eigen::VectorXd step = a.ldlt().solve(-g);
      const Eigen::VectorXd xn = x + step;
      Eigen::VectorXd rn;
      Eigen::MatrixXd jn;
      fn(xn, rn, jn);
      const double rss_n = rn.squaredNorm();
      if (std::isfinite(rss_n) && rss_n <= rss) {
        const double drop = rss - rss_n;
        const bool small_step = step.norm() <= rtol * (x.norm() + rtol);
        x = xn;
        r = rn;
        jac = jn;
        mu = std::max(mu / 3.0, 1e-15);
        accepted = true;
        const bool small_drop = drop <= rtol * std::max(rss, 1e-300);
        rss = rss_n;
        if (small_step || small_drop) res.converged = true;
      } else {
        mu *= 4.0;
      }
    }
    if (!accepted) {
      // No descent direction left at machine precision.
      res.converged = true;
      break;
    }
    if (res.converged) {
      ++it;
      break;
    }
  }
  const Eigen::MatrixXd jtj = jac.transpose() * jac;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
  if (!lu.isInvertible()) throw std::runtime_error("least squares: singular Jacobian");
  res.x = x;
  res.jtj_inverse = lu.inverse();
  res.rss = rss;
  res.iterations = it;
  return res;
}

DecayFit fit_exponential(const std::vector<DepthPoint>& all, std::optional<int> d_min, std::optional<int> d_max) {
  std::vector<const DepthPoint*> pts;
  for (const auto& p : all)
    if ((!d_min || p.depth >= *d_min) && (!d_max || p.depth <= *d_max)) pts.push_back(&p);
  if (pts.size() < 3) {
    std::stringstream ss;
    ss << "fit_exponential: need at least 3 points in range (got " << pts.size() << ")";
    throw std::invalid_argument(ss.str());
  }
  const size_t N = pts.size();
  bool weighted = true;
  for (const auto* p : pts)
    if (!p->stderr_ || !(*p->stderr_ > 0)) weighted = false;
  Eigen::VectorXd d(N), y(N), w(N);
  for (size_t i = 0; i < N; ++i) {
    d(i) = pts[i]->depth;
    y(i) = pts[i]->mean;
    w(i) = weighted ? 1.0 / *pts[i]->stderr_ : 1.0;
  }
  // Log-linear initializer when every mean is positive.
  Eigen::VectorXd x0(2);
  bool all_positive = (y.array() > 0).all();
  if (all_positive) {
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < N; ++i) {
      const double wi = weighted ? std::pow(y(i) * w(i), 2) : 1.0;
      const double ly = std::log(y(i));
      sw += wi;
      sx += wi * d(i);
      sy += wi * ly;
      sxx += wi * d(i) * d(i);
      sxy += wi * d(i) * ly;
    }
    const double det = sw * sxx - sx * sx;
    if (det <= 0) throw std::runtime_error("fit_exponential: degenerate depth grid");
    const double slope = (sw * sxy - sx * sy) / det;
    const double icpt = (sy - slope * sx) / sw;
    x0 << std::exp(icpt), -slope;
  } else {
    x0 << (y(0) != 0 ? std::abs(y(0)) : 1.0), 0.0;
  }
  auto fn = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd& jac) {
    r.resize(static_cast<Eigen::Index>(N));
    jac.resize(static_cast<Eigen::Index>(N), 2);
    for (size_t i = 0; i < N; ++i) {
      const double e = std::exp(-x(1) * d(i));
      r(i) = w(i) * (y(i) - x(0) * e);
      jac(i, 0) = -w(i) * e;
      jac(i, 1) = w(i) * x(0) * d(i) * e;
    }
  };
  const LmResult lm = levenberg_marquardt(fn, x0);
  DecayFit f;
  f.A = lm.x(0);
  f.lambda = lm.x(1);
  Eigen::MatrixXd cov = lm.jtj_inverse;
  if (!weighted) cov *= N > 2 ? lm.rss / static_cast<double>(N - 2) : 0.0;
  f.sigma_A = std::sqrt(std::max(0.0, cov(0, 0)));
  f.sigma_lambda = std::sqrt(std::max(0.0, cov(1, 1)));
  f.cov_A_lambda = cov(0, 1);
  f.residual_norm = std::sqrt(lm.rss);
  f.iterations = lm.iterations;
  f.weighted = weighted;
  f.n_points = static_cast<int>(N);
  f.d_min = static_cast<int>(d.minCoeff());
  f.d_max = static_cast<int>(d.maxCoeff());
  for (size_t i = 0; i < N; ++i) f.residuals.push_back(y(i) - f.A * std::exp(-f.lambda * d(i)));
  return f;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("mean of empty list");
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
  if (v.size() < 2) throw std::invalid_argument("sample variance needs at least 2 values");
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

DepthPoint aggregate_depth(int depth, const std::vector<double>& values, const std::vector<double>& within, int M) {
  if (values.empty()) throw std::invalid_argument("aggregate_depth: no values");
  if (!within.empty() && within.size() != values.size())
    throw std::invalid_argument("aggregate_depth: within-circuit variances must match values");
  DepthPoint p;
  p.depth = depth;
  p.L = static_cast<int>(values.size());
  p.M = M;
  p.mean = mean_of(values);
  if (values.size() >= 2) p.stderr_ = std::sqrt(sample_variance(values) / static_cast<double>(values.size()));
  p.per_circuit = values;
  p.within_var = within;
  return p;
}

double varc_unbiased(const std::vector<double>& values, const std::vector<double>& within) {
  const double v = sample_variance(values);
  if (within.empty()) return v;
  if (within.size() != values.size()) throw std::invalid_argument("varc_unbiased: size mismatch");
  return v - mean_of(within);
}

std::vector<AlCovarianceResult> al_covariance_profile(int n, const std::vector<int>& depths, double eps, int L, int K,
                                                      GateSet gate_set, uint64_t seed, int threads) {
  if (depths.empty()) throw std::invalid_argument("al_covariance: no depths");
  if (L < 2) throw std::invalid_argument("al_covariance: need at least 2 circuits");
  const int d_max = *std::max_element(depths.begin(), depths.end());
  const bool enumerate = K <= 0 || K >= n;
  // per circuit, cumulative sum_{l<=d} A_l at every d up to d_max
  std::vector<std::vector<double>> cum(static_cast<size_t>(L));
  parallel_for(static_cast<size_t>(L), threads, [&](size_t c) {
    const Circuit circ = sample_rqc(n, d_max, gate_set, Boundary::ring, derive_seed(seed, {c}));
    Rng loc = Rng::stream(seed, {c, 1});
    PureState s = PureState::zero(n);
    std::vector<double> out;
    double acc = 0;
    for (const auto& layer : circ.layers) {
      apply_layer(s, layer);
      // <psi_{i,l}|psi> = <phi_l| X_i |phi_l> after gate cancellation.
      auto x_expect = [&](int q) {
        const uint64_t b = uint64_t{1} << qubit_bit(n, q);
        Complex e = 0;
        for (uint64_t x = 0; x < s.dim(); ++x) e += std::conj(s.amplitudes[x ^ b]) * s.amplitudes[x];
        return e.real();
      };
      double a = 0;
      if (enumerate) {
        for (int q = 0; q < n; ++q) a += std::pow(x_expect(q), 2);
        a /= n;
      } else {
        for (int k = 0; k < K; ++k) a += std::pow(x_expect(static_cast<int>(loc.below(static_cast<uint64_t>(n)))), 2);
        a /= K;
      }
      acc += a;
      out.push_back(acc);
    }
    cum[c] = std::move(out);
  });
  std::vector<AlCovarianceResult> res;
  for (int d : depths) {
    if (d < 1) throw std::invalid_argument("al_covariance: depth must be >= 1");
    AlCovarianceResult r;
    r.n = n;
    r.d = d;
    r.L = L;
    for (const auto& c : cum) r.per_circuit_sum.push_back(c[static_cast<size_t>(d - 1)]);
    r.mean_sum = mean_of(r.per_circuit_sum);
    r.var_sum = sample_variance(r.per_circuit_sum);
    r.var_fidelity = std::pow(n * eps, 2) * std::pow(1 - eps, 2.0 * n * d - 2) * r.var_sum;
    res.push_back(std::move(r));
  }
  return res;
}

AlCovarianceResult al_covariance(int n, int d, double eps, int L, int K, GateSet gate_set, uint64_t seed,
                                 int threads) {
  return al_covariance_profile(n, {d}, eps, L, K, gate_set, seed, threads).front();
}

}  // namespace rcsbench
