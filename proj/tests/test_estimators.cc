#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rcsbench/density.h"
#include "rcsbench/estimators.h"
#include "rcsbench/noise.h"
#include "rcsbench/statevec.h"

using namespace rcsbench;

namespace {

IdealDistribution ideal_of(int n, int d, uint64_t seed) {
  return IdealDistribution::from_state(run_circuit(sample_rqc(n, d, GateSet::haar2q, Boundary::ring, seed)));
}

IdealDistribution identity_ideal(int n) {
  std::vector<double> p(size_t{1} << n, 0.0);
  p[0] = 1;
  return IdealDistribution::from_probs(n, p);
}

// Direct transcriptions of the full-distribution formulas.
double oracle_logxeb(const std::vector<double>& q, const std::vector<double>& p) {
  double s = 0;
  for (size_t x = 0; x < p.size(); ++x) s += q[x] * std::log(p[x]);
  return std::log(static_cast<double>(p.size())) + 0.5772156649015329 + s;
}

double oracle_hog(const std::vector<double>& q, const std::vector<double>& p) {
  const double thr = std::log(2.0) / static_cast<double>(p.size());
  double s = 0;
  for (size_t x = 0; x < p.size(); ++x) s += p[x] >= thr ? q[x] : 0.0;
  return (2 * s - 1) / std::log(2.0);
}

struct Running {
  double sum = 0, sq = 0;
  int n = 0;
  void add(double v) {
    sum += v;
    sq += v * v;
    ++n;
  }
  double mean() const { return sum / n; }
  double se() const { return std::sqrt(std::max(0.0, sq / n - mean() * mean()) / (n - 1)); }
};

constexpr double kLogXebUniformBaseline = -0.00051907353614765838;
constexpr double kHogUniformBaseline = 0.0022542110013890047;

}  // namespace

TEST(SampleXeb, IdentityCircuit) {
  const auto ideal = identity_ideal(4);
  const std::vector<uint64_t> s(10, 0);
  EXPECT_DOUBLE_EQ(xeb_samples(s, ideal).value, 15.0);
  EXPECT_DOUBLE_EQ(uxeb_samples(s, ideal).value, 1.0);
  EXPECT_EQ(*xeb_samples(s, ideal).stderr_, 0.0);
}

TEST(SampleXeb, EmptyAndDegenerate) {
  const auto ideal = ideal_of(4, 4, 1);
  EXPECT_THROW(xeb_samples({}, ideal), std::invalid_argument);
  const auto uniform = IdealDistribution::from_probs(3, std::vector<double>(8, 0.125));
  const std::vector<uint64_t> s{1, 2, 3};
  EXPECT_THROW(uxeb_samples(s, uniform), std::invalid_argument);
}

TEST(SampleXeb, UniformSamplesGiveZero) {
  const int n = 8;
  Running xeb, uxeb;
  Rng rng(3);
  for (uint64_t c = 0; c < 100; ++c) {
    const auto ideal = ideal_of(n, 12, 100 + c);
    std::vector<uint64_t> s(2000);
    for (auto& x : s) x = rng.below(uint64_t{1} << n);
    xeb.add(xeb_samples(s, ideal).value);
    uxeb.add(uxeb_samples(s, ideal).value);
  }
  EXPECT_NEAR(xeb.mean(), 0.0, 3 * xeb.se());
  EXPECT_NEAR(uxeb.mean(), 0.0, 3 * uxeb.se());
}

TEST(SampleXeb, IdealSamplesUnbiased) {
  const int n = 6;
  Running uxeb;
  Rng rng(4);
  for (uint64_t c = 0; c < 100; ++c) {
    const PureState psi = run_circuit(sample_rqc(n, 3, GateSet::haar2q, Boundary::ring, 500 + c));
    const auto ideal = IdealDistribution::from_state(psi);
    const auto s = sample_bitstrings(psi, 1000, rng);
    uxeb.add(uxeb_samples(s, ideal).value);
    // XEB expectation on ideal samples is D sum p^2 - 1.
    const auto x = xeb_samples(s, ideal);
    EXPECT_NEAR(x.value, ideal.dim() * ideal.sum_p_sq - 1, 5 * *x.stderr_);
  }
  EXPECT_NEAR(uxeb.mean(), 1.0, 3 * uxeb.se());
}

TEST(SampleXeb, ErrorShrinksAsRootM) {
  const auto psi = run_circuit(sample_rqc(6, 10, GateSet::haar2q, Boundary::ring, 9));
  const auto ideal = IdealDistribution::from_state(psi);
  const double full = uxeb_full(ideal.probs, ideal).value;
  auto rms = [&](size_t M) {
    Rng rng(M);
    double s = 0;
    for (int r = 0; r < 400; ++r) {
      const double e = uxeb_samples(sample_bitstrings(psi, M, rng), ideal).value - full;
      s += e * e;
    }
    return std::sqrt(s / 400);
  };
  const double ratio = rms(100) / rms(1600);
  EXPECT_GT(ratio, 3.3);
  EXPECT_LT(ratio, 4.8);
}

TEST(FullEstimators, IdealQGivesOne) {
  const auto ideal = ideal_of(8, 10, 3);
  EXPECT_NEAR(uxeb_full(ideal.probs, ideal).value, 1.0, 1e-12);
  const double x = xeb_full(ideal.probs, ideal).value;
  EXPECT_NEAR(x, ideal.dim() * ideal.sum_p_sq - 1, 1e-12);
}

TEST(FullEstimators, UxebTimesDenominatorIsXeb) {
  const auto ideal = ideal_of(6, 4, 5);
  const auto q = ideal_of(6, 4, 6).probs;
  EXPECT_NEAR(uxeb_full(q, ideal).value * (ideal.dim() * ideal.sum_p_sq - 1), xeb_full(q, ideal).value, 1e-13);
}

TEST(FullEstimators, MatchDirectFormulas) {
  const auto ideal = ideal_of(6, 8, 5);
  const auto q = ideal_of(6, 8, 7).probs;
  EXPECT_NEAR(logxeb_full(q, ideal).value, oracle_logxeb(q, ideal.probs), 1e-12);
  EXPECT_NEAR(hog_full(q, ideal).value, oracle_hog(q, ideal.probs), 1e-12);
}

TEST(FullEstimators, LogXebRejectsZeroProbability) {
  const auto ideal = identity_ideal(2);
  const std::vector<double> q{0.5, 0.5, 0, 0};
  EXPECT_THROW(logxeb_full(q, ideal), std::domain_error);
  const std::vector<uint64_t> s{1};
  EXPECT_THROW(logxeb_samples(s, ideal), std::domain_error);
}

// Uniform-q baselines of log-XEB and HOG at n=10, depth 20, averaged over 50
// circuits. Values frozen from the direct-formula oracle above.
TEST(FullEstimators, MaximallyMixedBaselines) {
  const int n = 10;
  const std::vector<double> q(size_t{1} << n, 1.0 / (1 << n));
  Running lx, hg, ux;
  for (uint64_t c = 0; c < 50; ++c) {
    const auto ideal = ideal_of(n, 20, derive_seed(2024, {c}));
    const double l = logxeb_full(q, ideal).value, h = hog_full(q, ideal).value;
    EXPECT_NEAR(l, oracle_logxeb(q, ideal.probs), 1e-12);
    EXPECT_NEAR(h, oracle_hog(q, ideal.probs), 1e-12);
    EXPECT_NEAR(uxeb_full(q, ideal).value, 0.0, 1e-12);
    lx.add(l);
    hg.add(h);
  }
  EXPECT_NEAR(lx.mean(), kLogXebUniformBaseline, 1e-9);
  EXPECT_NEAR(hg.mean(), kHogUniformBaseline, 1e-9);
}

TEST(FullEstimators, PorterThomasLimitOfLogXebAndHog) {
  const auto ideal = ideal_of(12, 30, 1);
  EXPECT_NEAR(logxeb_full(ideal.probs, ideal).value, 1.0, 0.02);
  EXPECT_NEAR(hog_full(ideal.probs, ideal).value, 1.0, 0.02);
}

TEST(FullEstimators, DenominatorApproachesOneAtDepth) {
  Running den;
  for (uint64_t c = 0; c < 50; ++c) {
    const auto ideal = ideal_of(12, 20, derive_seed(7, {c}));
    den.add(ideal.dim() * ideal.sum_p_sq - 1);
  }
  EXPECT_LT(std::abs(den.mean() - 1), 0.1);
}

TEST(Dfe, PureStateGivesOne) {
  const PureState psi = run_circuit(sample_rqc(4, 4, GateSet::haar2q, Boundary::ring, 1));
  Rng rng(1);
  const auto v = dfe(psi, [&](const PauliString& p) { return pauli_expectation(psi.amplitudes, p); }, 25, 0, rng);
  EXPECT_NEAR(v.value, 1.0, 1e-12);
}

TEST(Dfe, MaximallyMixedGivesInverseDimension) {
  const PureState psi = run_circuit(sample_rqc(4, 4, GateSet::haar2q, Boundary::ring, 2));
  Running r;
  Rng rng(2);
  // Only the identity has a nonzero noisy expectation, so each draw is 0 or 16.
  for (int i = 0; i < 400; ++i)
    r.add(dfe(psi, [](const PauliString& p) { return p.is_identity() ? 1.0 : 0.0; }, 20, 0, rng).value);
  EXPECT_NEAR(r.mean(), 1.0 / 16, 3 * r.se());
}

TEST(Dfe, AgreesWithExactFidelity) {
  const int n = 5;
  const NoiseModel m = *preset_model("t1t2", n, 0.1);
  Running diff;
  Rng rng(3);
  for (uint64_t c = 0; c < 30; ++c) {
    const Circuit circ = sample_rqc(n, 6, GateSet::haar2q, Boundary::open, 900 + c);
    const DensityState rho = run_noisy_density(circ, &m);
    const PureState psi = run_circuit(circ);
    const auto v = dfe(psi, [&](const PauliString& p) { return pauli_expectation(rho, p); }, 20, 0, rng);
    diff.add(v.value - fidelity(rho, psi));
  }
  EXPECT_NEAR(diff.mean(), 0.0, 3 * diff.se());
}

TEST(Dfe, RefusesLargeRegister) {
  const PureState psi = PureState::zero(kMaxDfeQubits + 1);
  Rng rng(1);
  EXPECT_THROW(dfe(psi, [](const PauliString&) { return 1.0; }, 1, 0, rng), std::invalid_argument);
}

TEST(Srb, ProductOfSurvivals) {
  EXPECT_EQ(srb_estimate(std::vector<double>{}).value, 1.0);
  EXPECT_EQ(srb_estimate(std::vector<double>{0, 0, 0}).value, 1.0);
  EXPECT_NEAR(srb_estimate(std::vector<double>{0.01, 0.01}).value, 0.9801, 1e-15);
  EXPECT_THROW(srb_estimate(std::vector<double>{1.0}), std::invalid_argument);
}

TEST(Srb, LooksUpPairsInCircuit) {
  const Circuit c = sample_rqc(4, 2, GateSet::haar2q, Boundary::ring, 1);
  std::map<PairKey, double> e{{{0, 1}, 0.01}, {{2, 3}, 0.02}, {{1, 2}, 0.03}, {{0, 3}, 0.04}};
  EXPECT_NEAR(srb_estimate(e, c).value, 0.99 * 0.98 * 0.97 * 0.96, 1e-15);
  e.erase({0, 3});
  EXPECT_THROW(srb_estimate(e, c), std::invalid_argument);
}
