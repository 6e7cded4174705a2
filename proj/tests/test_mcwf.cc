#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "rcsbench/density.h"
#include "rcsbench/mcwf.h"
#include "rcsbench/noise.h"

using namespace rcsbench;

namespace {

CollapseTerm term(TermKind k, std::vector<int> support, double g, std::string pauli = "") {
  return CollapseTerm{k, std::move(support), g, std::move(pauli)};
}

PureState basis(int n, uint64_t x) {
  PureState s = PureState::zero(n);
  s.amplitudes[0] = 0;
  s.amplitudes[x] = 1;
  return s;
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

}  // namespace

TEST(DecayProfileTest, Examples) {
  const double g = 0.1;
  const auto px = decay_profile(make_model(2, {term(TermKind::pauli_string, {0}, g, "X")}));
  for (double r : px.rates) EXPECT_DOUBLE_EQ(r, g);
  const auto pa = decay_profile(make_model(1, {term(TermKind::amplitude_decay, {0}, g)}));
  EXPECT_EQ(pa.rates, (std::vector<double>{0, g}));
  const auto pt = decay_profile(make_model(2, {term(TermKind::amplitude_decay, {0, 1}, g), term(TermKind::dephasing, {0, 1}, 2 * g)}));
  EXPECT_NEAR(pt.rates[3], 6 * g, 1e-15);
  EXPECT_NEAR(pt.rates[1], 3 * g, 1e-15);
  const auto pc = decay_profile(make_model(3, {term(TermKind::corr_dephasing, {0, 2}, g)}));
  for (uint64_t x = 0; x < 8; ++x) EXPECT_DOUBLE_EQ(pc.rates[x], (x & 0b101) == 0b101 ? g : 0.0);
}

TEST(JumpTime, ClosedForms) {
  const double g = 0.7, p = 0.6;
  const auto prof = decay_profile(make_model(2, {term(TermKind::pauli_string, {0, 1}, g, "XY")}));
  PureState s = PureState::zero(2);
  const auto t = jump_time(s, prof, p, 10.0);
  ASSERT_TRUE(t);
  EXPECT_NEAR(*t, -std::log(p) / g, 1e-10);
  const auto pa = decay_profile(make_model(1, {term(TermKind::amplitude_decay, {0}, 2.0)}));
  EXPECT_NEAR(*jump_time(basis(1, 1), pa, 0.5, 1.0), std::log(2.0) / 2.0, 1e-10);
  // No crossing inside the window.
  EXPECT_FALSE(jump_time(s, prof, 0.01, 1.0));
  // Threshold above the current norm fires immediately.
  EXPECT_EQ(*jump_time(s, prof, 1.5, 1.0), 0.0);
}

TEST(JumpTime, MixedRatesMatchGridScan) {
  const int n = 3;
  const NoiseModel m = make_model(n, {term(TermKind::amplitude_decay, {0}, 0.9), term(TermKind::dephasing, {1}, 0.4),
                                      term(TermKind::corr_amplitude, {1, 2}, 1.3)});
  const auto prof = decay_profile(m);
  const PureState s = run_circuit(sample_rqc(n, 3, GateSet::haar2q, Boundary::open, 6));
  const double p = 0.7;
  const auto t = jump_time(s, prof, p, 2.0);
  ASSERT_TRUE(t);
  auto norm = [&](double tt) {
    double v = 0;
    for (size_t x = 0; x < s.dim(); ++x) v += std::norm(s.amplitudes[x]) * std::exp(-prof.rates[x] * tt);
    return v;
  };
  double scan = -1;
  for (int i = 0; i <= 2000000; ++i) {
    const double tt = i * 1e-6;
    if (norm(tt) <= p) {
      scan = tt;
      break;
    }
  }
  ASSERT_GE(scan, 0);
  EXPECT_NEAR(*t, scan, 1e-6);
  EXPECT_NEAR(norm(*t), p, 1e-12);
}

TEST(SelectJump, EqualWeightsAndNoJump) {
  const NoiseModel m = make_model(1, {term(TermKind::amplitude_decay, {0}, 0.3), term(TermKind::dephasing, {0}, 0.3)});
  const auto w = jump_weights(basis(1, 1), m);
  EXPECT_DOUBLE_EQ(w[0], w[1]);
  Rng rng(1);
  EXPECT_THROW(select_jump(basis(1, 0), m, rng), std::runtime_error);
}

TEST(SelectJump, FrequenciesMatchWeights) {
  const NoiseModel m = make_model(2, {term(TermKind::amplitude_decay, {0}, 0.3), term(TermKind::dephasing, {1}, 0.5),
                                      term(TermKind::pauli_string, {0}, 0.2, "X")});
  const PureState s = run_circuit(sample_rqc(2, 2, GateSet::haar2q, Boundary::open, 3));
  const auto w = jump_weights(s, m);
  const double tot = w[0] + w[1] + w[2];
  Rng rng(5);
  const int N = 100000;
  std::vector<double> c(3, 0);
  for (int i = 0; i < N; ++i) c[select_jump(s, m, rng)] += 1;
  for (size_t l = 0; l < 3; ++l) {
    const double p = w[l] / tot;
    EXPECT_NEAR(c[l], N * p, 4 * std::sqrt(N * p * (1 - p)));
  }
}

TEST(ApplyJump, Examples) {
  PureState s = basis(1, 0);
  apply_jump(s, term(TermKind::pauli_string, {0}, 1, "X"));
  EXPECT_NEAR(std::abs(s.amplitudes[1]), 1.0, 1e-15);
  PureState plus = PureState::zero(1);
  plus.amplitudes = {M_SQRT1_2, M_SQRT1_2};
  apply_jump(plus, term(TermKind::amplitude_decay, {0}, 1));
  EXPECT_NEAR(std::abs(plus.amplitudes[0]), 1.0, 1e-15);
  EXPECT_EQ(plus.amplitudes[1], Complex(0));
  PureState zero = basis(1, 0);
  EXPECT_THROW(apply_jump(zero, term(TermKind::amplitude_decay, {0}, 1)), std::runtime_error);
  PureState r = run_circuit(sample_rqc(4, 3, GateSet::haar2q, Boundary::ring, 1));
  for (auto& a : r.amplitudes) a *= 0.3;
  apply_jump(r, term(TermKind::corr_dephasing, {1, 3}, 1));
  EXPECT_NEAR(r.norm2(), 1.0, 1e-12);
}

TEST(EvolveUnitTime, ZeroRateLeavesState) {
  const NoiseModel m = make_model(2, {term(TermKind::dephasing, {0}, 0.0)});
  const PureState s = run_circuit(sample_rqc(2, 1, GateSet::haar2q, Boundary::open, 1));
  Trajectory t = start_trajectory(s, Rng(1));
  evolve_unit_time(t, m, decay_profile(m));
  for (size_t i = 0; i < s.dim(); ++i) EXPECT_EQ(t.state.amplitudes[i], s.amplitudes[i]);
}

TEST(EvolveUnitTime, NormNeverIncreasesWithoutJump) {
  const NoiseModel m = *preset_model("t1t2", 3, 0.1);
  const auto prof = decay_profile(m);
  PureState s = run_circuit(sample_rqc(3, 2, GateSet::haar2q, Boundary::open, 1));
  double prev = s.norm2();
  for (int i = 0; i < 50; ++i) {
    decay_state(s, prof, 0.02);
    EXPECT_LE(s.norm2(), prev);
    prev = s.norm2();
  }
}

TEST(EvolveUnitTime, AmplitudeDampingPopulation) {
  const NoiseModel m = make_model(1, {term(TermKind::amplitude_decay, {0}, 0.05)});
  const auto prof = decay_profile(m);
  Running r;
  for (uint64_t i = 0; i < 100000; ++i) {
    Trajectory t = start_trajectory(basis(1, 1), Rng::stream(3, {i}));
    evolve_unit_time(t, m, prof);
    r.add(std::norm(t.state.amplitudes[1]) / t.state.norm2());
  }
  EXPECT_NEAR(r.mean(), std::exp(-0.05), 3 * r.se());
}

TEST(EvolveUnitTime, StrongNoiseMatchesDensity) {
  // gamma = 0.5 makes several jumps per interval common.
  const NoiseModel m = make_model(2, {term(TermKind::amplitude_decay, {0, 1}, 0.5), term(TermKind::pauli_string, {0}, 0.5, "X"),
                                      term(TermKind::dephasing, {1}, 0.5)});
  const auto prof = decay_profile(m);
  const PureState s0 = run_circuit(sample_rqc(2, 1, GateSet::haar2q, Boundary::open, 9));
  DensityState rho = DensityState::from_pure(s0);
  evolve_density_unit_time(rho, m, LindbladIntegrator::rk4);
  std::vector<Running> pop(4), coh(2);
  int multi = 0;
  for (uint64_t i = 0; i < 20000; ++i) {
    Trajectory t = start_trajectory(s0, Rng::stream(4, {i}));
    evolve_unit_time(t, m, prof);
    if (t.jumps >= 2) ++multi;
    const double nn = t.state.norm2();
    for (size_t x = 0; x < 4; ++x) pop[x].add(std::norm(t.state.amplitudes[x]) / nn);
    const Complex c01 = t.state.amplitudes[0] * std::conj(t.state.amplitudes[1]) / nn;
    coh[0].add(c01.real());
    coh[1].add(c01.imag());
  }
  EXPECT_GT(multi, 100);
  for (size_t x = 0; x < 4; ++x) EXPECT_NEAR(pop[x].mean(), rho.at(x, x).real(), 3 * pop[x].se() + 1e-12) << x;
  EXPECT_NEAR(coh[0].mean(), rho.at(0, 1).real(), 3 * coh[0].se());
  EXPECT_NEAR(coh[1].mean(), rho.at(0, 1).imag(), 3 * coh[1].se());
}

TEST(Trajectory, ZeroNoiseEqualsIdeal) {
  const Circuit c = sample_rqc(4, 6, GateSet::haar2q, Boundary::ring, 2);
  const NoiseModel m = make_model(4, {term(TermKind::dephasing, {0}, 0.0)});
  Rng rng(1);
  const PureState a = run_noisy_trajectory(c, m, rng), b = run_circuit(c);
  for (size_t i = 0; i < a.dim(); ++i) EXPECT_LE(std::abs(a.amplitudes[i] - b.amplitudes[i]), 1e-14);
}

TEST(Trajectory, AverageFidelityMatchesDensity) {
  const Circuit c = sample_rqc(4, 8, GateSet::haar2q, Boundary::ring, 31);
  const NoiseModel m = *preset_model("t1t2", 4, 0.2);
  const double exact = fidelity(run_noisy_density(c, &m), c);
  const auto acc = trajectory_ensemble(c, m, 5000, 77).accumulator;
  const double mean = acc.fidelity_sum / acc.T;
  const double se = std::sqrt((acc.fidelity_sq_sum / acc.T - mean * mean) / (acc.T - 1));
  EXPECT_NEAR(mean, exact, 3 * se);
}

TEST(Trajectory, EnsembleOfOneEqualsSingleRun) {
  const Circuit c = sample_rqc(4, 5, GateSet::haar2q, Boundary::ring, 3);
  const NoiseModel m = *preset_model("pauli_x", 4, 0.3);
  const auto e = trajectory_ensemble(c, m, 1, 11, true);
  Rng rng = Rng::stream(11, {0});
  const PureState s = run_noisy_trajectory(c, m, rng);
  ASSERT_EQ(e.states.size(), 1u);
  for (size_t i = 0; i < s.dim(); ++i) EXPECT_EQ(e.states[0].amplitudes[i], s.amplitudes[i]);
}

TEST(Trajectory, DeterministicAcrossThreadCounts) {
  const Circuit c = sample_rqc(6, 6, GateSet::haar2q, Boundary::ring, 3);
  const NoiseModel m = *preset_model("weight_nm1", 6, 0.3);
  const auto a = trajectory_ensemble(c, m, 64, 5, false, 1).accumulator;
  const auto b = trajectory_ensemble(c, m, 64, 5, false, 3).accumulator;
  EXPECT_EQ(a.fidelity_sum, b.fidelity_sum);
  EXPECT_EQ(a.sum_p_weighted, b.sum_p_weighted);
  EXPECT_EQ(a.sum_p_weighted_sq, b.sum_p_weighted_sq);
}

TEST(Trajectory, MergeOrderIndependentWithinRounding) {
  TrajectoryAccumulator a, b, ab, ba;
  a.add(0.1, 0.9);
  a.add(0.2, 0.8);
  b.add(0.3, 0.5);
  ab = a;
  ab.merge(b);
  ba = b;
  ba.merge(a);
  EXPECT_NEAR(ab.fidelity_sum, ba.fidelity_sum, 1e-15);
  EXPECT_EQ(ab.T, 3);
  EXPECT_EQ(ba.T, 3);
}

TEST(Trajectory, TwentyQubitPerformanceSmoke) {
  const Circuit c = sample_rqc(20, 50, GateSet::haar2q, Boundary::ring, 1);
  const NoiseModel m = *preset_model("t1t2", 20, 0.05);
  Rng rng(1);
  const auto t0 = std::chrono::steady_clock::now();
  const PureState s = run_noisy_trajectory(c, m, rng);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_NEAR(s.norm2(), 1.0, 1e-8);
  EXPECT_LT(secs, 60.0);
}
