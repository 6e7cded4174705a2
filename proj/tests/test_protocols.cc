#include <gtest/gtest.h>

#include <cmath>

#include "rcsbench/density.h"
#include "rcsbench/estimators.h"
#include "rcsbench/io.h"
#include "rcsbench/noise.h"
#include "rcsbench/protocols.h"
#include "rcsbench/statevec.h"

using namespace rcsbench;

namespace {

std::vector<int> range(int a, int b) {
  std::vector<int> v;
  for (int d = a; d <= b; ++d) v.push_back(d);
  return v;
}

BenchmarkConfig small_config() {
  BenchmarkConfig c;
  c.name = "unit";
  c.n = 4;
  c.depths = range(2, 8);
  c.L = 6;
  c.backend = Backend::density;
  c.noise = preset_model("pauli_x", 4, 0.1);
  c.estimators = {EstimatorKind::F, EstimatorKind::uXEB, EstimatorKind::XEB};
  c.master_seed = 5;
  return c;
}

}  // namespace

TEST(Config, Validation) {
  BenchmarkConfig c = small_config();
  EXPECT_NO_THROW(validate_config(c));
  c.depths = {3, 3, 4};
  EXPECT_THROW(validate_config(c), ConfigError);
  c = small_config();
  c.L = 0;
  EXPECT_THROW(validate_config(c), ConfigError);
  c = small_config();
  c.n = 12;
  c.noise = preset_model("pauli_x", 12, 0.1);
  EXPECT_THROW(validate_config(c), ConfigError);
  c.backend = Backend::mcwf;
  EXPECT_NO_THROW(validate_config(c));
  c = small_config();
  c.n = 5;
  EXPECT_THROW(validate_config(c), ConfigError);
  c.boundary = Boundary::open;
  c.noise = preset_model("pauli_x", 5, 0.1, Boundary::open);
  EXPECT_NO_THROW(validate_config(c));
}

TEST(Config, DefaultFitRange) {
  BenchmarkConfig c = small_config();
  c.depths = range(2, 12);
  EXPECT_EQ(default_fit_range(c), std::make_pair(4, 12));
  c.depths = range(1, 5);
  EXPECT_EQ(default_fit_range(c), std::make_pair(1, 5));
}

TEST(Benchmark, NoiselessGivesUnitEstimators) {
  BenchmarkConfig c = small_config();
  c.noise.reset();
  const auto r = rcs_benchmark(c);
  EXPECT_FALSE(r.lambda_true.has_value());
  for (auto k : {EstimatorKind::F, EstimatorKind::uXEB}) {
    const auto& s = r.at(k);
    for (const auto& p : s.points) EXPECT_NEAR(p.mean, 1.0, 1e-10);
    ASSERT_TRUE(s.fit);
    EXPECT_NEAR(s.fit->lambda, 0.0, 1e-9);
  }
}

TEST(Benchmark, EveryLambdaHasSigma) {
  const auto r = rcs_benchmark(small_config());
  ASSERT_TRUE(r.lambda_true);
  EXPECT_NEAR(*r.lambda_true, 0.1, 1e-15);
  for (const auto& s : r.series) {
    ASSERT_TRUE(s.fit) << to_string(s.kind) << ": " << s.fit_error;
    EXPECT_GT(s.fit->sigma_lambda, 0.0);
  }
}

TEST(Benchmark, ByteIdenticalReports) {
  BenchmarkConfig c = small_config();
  const std::string a = io::to_json(rcs_benchmark(c)).dump();
  const std::string b = io::to_json(rcs_benchmark(c)).dump();
  c.threads = 3;
  const std::string t = io::to_json(rcs_benchmark(c)).dump();
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, t);
  c.master_seed = 6;
  EXPECT_NE(a, io::to_json(rcs_benchmark(c)).dump());
}

TEST(Benchmark, McwfReportsDeterministicAcrossThreads) {
  BenchmarkConfig c = small_config();
  c.backend = Backend::mcwf;
  c.trajectories = 30;
  c.depths = range(2, 5);
  const std::string a = io::to_json(rcs_benchmark(c)).dump();
  c.threads = 2;
  EXPECT_EQ(a, io::to_json(rcs_benchmark(c)).dump());
}

TEST(Benchmark, XebAtLeastUxebWhenDenominatorExceedsOne) {
  const auto model = preset_model("pauli_x", 4, 0.1);
  int checked = 0;
  for (int d = 1; d <= 6; ++d)
    for (uint64_t s = 0; s < 10; ++s) {
      const Circuit c = sample_rqc(4, d, GateSet::haar2q, Boundary::ring, derive_seed(31, {s, uint64_t(d)}));
      const auto ideal = IdealDistribution::from_state(run_circuit(c));
      const auto q = run_noisy_density(c, &*model).diagonal();
      const double x = xeb_full(q, ideal).value, u = uxeb_full(q, ideal).value;
      const double denom = ideal.dim() * ideal.sum_p_sq - 1;
      EXPECT_NEAR(u * denom, x, 1e-12);
      if (denom > 1 && x > 0) {
        EXPECT_GE(x, u);
        ++checked;
      }
    }
  EXPECT_GT(checked, 10);
}

TEST(Benchmark, PrefixModeReusesCircuits) {
  BenchmarkConfig c = small_config();
  c.circuit_mode = CircuitMode::prefix;
  const auto r = rcs_benchmark(c);
  for (size_t d = 1; d < r.circuit_seeds.size(); ++d) EXPECT_EQ(r.circuit_seeds[d], r.circuit_seeds[0]);
  c.circuit_mode = CircuitMode::independent;
  const auto s = rcs_benchmark(c);
  EXPECT_NE(s.circuit_seeds[1], s.circuit_seeds[0]);
}

TEST(Benchmark, DensityAndTrajectoryBackendsAgree) {
  BenchmarkConfig c = small_config();
  c.noise = preset_model("t1t2", 4, 0.1);
  c.depths = range(4, 12);
  c.L = 10;
  c.circuit_mode = CircuitMode::prefix;
  c.estimators = {EstimatorKind::F, EstimatorKind::uXEB};
  const auto exact = rcs_benchmark(c);
  c.backend = Backend::mcwf;
  c.trajectories = 5000;
  const auto traj = rcs_benchmark(c);
  for (auto k : {EstimatorKind::F, EstimatorKind::uXEB}) {
    const auto& a = *exact.at(k).fit;
    const auto& b = *traj.at(k).fit;
    EXPECT_NEAR(a.lambda, b.lambda, 3 * std::hypot(a.sigma_lambda, b.sigma_lambda)) << to_string(k);
  }
}

TEST(Benchmark, SamplingBackendUnbiased) {
  BenchmarkConfig c = small_config();
  c.noise.reset();
  c.backend = Backend::statevec_sampling;
  c.samples = 500;
  c.L = 40;
  c.depths = {6, 8, 10};
  c.estimators = {EstimatorKind::uXEB};
  const auto r = rcs_benchmark(c);
  for (const auto& p : r.at(EstimatorKind::uXEB).points) EXPECT_NEAR(p.mean, 1.0, 3 * *p.stderr_);
}

TEST(Benchmark, DfeTracksFidelity) {
  BenchmarkConfig c = small_config();
  c.estimators = {EstimatorKind::F, EstimatorKind::DFE};
  c.dfe_paulis = 200;
  c.L = 10;
  const auto r = rcs_benchmark(c);
  const auto& f = r.at(EstimatorKind::F);
  const auto& g = r.at(EstimatorKind::DFE);
  for (size_t d = 0; d < f.points.size(); ++d) EXPECT_NEAR(g.points[d].mean, f.points[d].mean, 4 * *g.points[d].stderr_ + 1e-12);
}

TEST(Rb, NoiselessSurvivalIsOne) {
  RbConfig r;
  r.n = 4;
  r.lengths = {1, 2, 4, 8};
  r.sequences = 4;
  const auto rep = simultaneous_rb(r);
  EXPECT_EQ(rep.pairs.size(), 4u);
  for (const auto& p : rep.pairs) {
    EXPECT_EQ(p.e, 0.0);
    for (const auto& s : p.survival) EXPECT_NEAR(s.mean, 1.0, 1e-12);
  }
  EXPECT_EQ(rep.lambda_srb, 0.0);
}

TEST(Rb, LocalPauliNoiseMatchesTrueRate) {
  RbConfig r;
  r.n = 8;
  r.noise = preset_model("pauli_x", 8, 0.1);
  r.sequences = 20;
  r.seed = 12;
  const auto rep = simultaneous_rb(r);
  ASSERT_TRUE(rep.lambda_true);
  EXPECT_NEAR(std::exp(-rep.lambda_srb) / std::exp(-*rep.lambda_true), 1.0, 0.05);
  for (const auto& p : rep.pairs) {
    EXPECT_NEAR(p.e, r.conversion * (1 - p.f), 1e-15);
    EXPECT_GT(p.sigma_e, 0.0);
  }
}

TEST(Virtual, ClosedLoopArithmetic) {
  EXPECT_NEAR(virtual_gamma3(0.01, 0.03, 0.1, 10), 0.0, 1e-17);
  EXPECT_NEAR(virtual_Gamma2(0.01, 0.02, 0.02), 0.19, 1e-15);
  EXPECT_NEAR(virtual_lambda(10, 0.01, 0.02, 0.02) / 10, 0.03, 1e-15);
  EXPECT_NEAR(virtual_gamma3(0.01, 0.19, 0.3, 10), 0.02, 1e-15);
  for (double g3 : {0.0, 0.002, 0.005, 0.01, 0.02}) {
    const double l = virtual_lambda(10, 0.01, 0.02, g3);
    EXPECT_NEAR(virtual_gamma3(0.01, virtual_Gamma2(0.01, 0.02, g3), l, 10), g3, 1e-16);
  }
}

TEST(Virtual, RamseyConventionMatchesDensity) {
  // Three qubits on a ring, so each has two ZZ neighbours.
  const double g1 = 0.01, g2 = 0.02, g3 = 0.015;
  const NoiseModel m = correlated_dephasing_model(3, g1, g2, g3);
  DensityState rho(3);
  for (auto& v : rho.rho) v = 1.0 / 8;
  const PauliString x0 = PauliString::parse("XII");
  for (int t = 1; t <= 5; ++t) {
    evolve_density_unit_time(rho, m, LindbladIntegrator::rk4);
    EXPECT_NEAR(pauli_expectation(rho, x0), std::exp(-virtual_Gamma2(g1, g2, g3) * t / 2), 1e-9);
  }
}

TEST(Virtual, FreeEvolutionFitsAreExact) {
  VirtualConfig v;
  v.n = 4;
  v.gamma3 = 0.01;
  v.t_max = 10;
  v.rcs.depths = range(4, 12);
  v.rcs.L = 8;
  v.rcs.circuit_mode = CircuitMode::prefix;
  v.rcs.estimators = {EstimatorKind::uXEB};
  const auto r = virtual_experiment(v);
  EXPECT_NEAR(r.Gamma1, 0.01, 1e-8);
  EXPECT_NEAR(r.Gamma2, virtual_Gamma2(0.01, 0.02, 0.01), 1e-8);
  EXPECT_NEAR(r.lambda_true, virtual_lambda(4, 0.01, 0.02, 0.01), 1e-15);
  EXPECT_NEAR(r.gamma3, virtual_gamma3(r.Gamma1, r.Gamma2, r.lambda, 4), 1e-15);
  EXPECT_GT(r.sigma_gamma3, 0.0);
}

TEST(Theorem1, DiagonalInputGivesZeroDifference) {
  const auto chi = ProcessMatrix::pauli_channel(1, {0.96, 0.02, 0.01, 0.01});
  const auto r = theorem1_check(4, 4, chi, 10, 3);
  for (size_t i = 0; i < r.full.size(); ++i) EXPECT_EQ(r.full[i], r.diag[i]);
  EXPECT_EQ(r.mean_diff, 0.0);
}

TEST(Theorem1, AmplitudeDecayMeansAgree) {
  const auto chi = exact_process_matrix(CollapseTerm{TermKind::amplitude_decay, {0}, 0.05, ""});
  const auto r = theorem1_check(4, 6, chi, 150, 7);
  double maxdiff = 0;
  for (size_t i = 0; i < r.full.size(); ++i) maxdiff = std::max(maxdiff, std::abs(r.full[i] - r.diag[i]));
  EXPECT_GT(maxdiff, 1e-6);  // per-circuit values differ
  EXPECT_LT(std::abs(r.z), 3.0);
}

TEST(Theorem1, OffDiagonalPerturbationMeansAgree) {
  auto chi = ProcessMatrix::pauli_channel(1, {0.9, 0.05, 0.03, 0.02});
  chi.chi(1, 2) = chi.chi(2, 1) = 0.03;
  ASSERT_TRUE(chi.is_channel());
  const auto r = theorem1_check(4, 6, chi, 150, 8);
  EXPECT_LT(std::abs(r.z), 3.0);
}

TEST(FirstOrder, NoNoiseIsExact) {
  for (const auto& row : first_order_check(4, 5, 0.0, 3, 1)) {
    EXPECT_NEAR(row.EF, 1.0, 1e-12);
    EXPECT_EQ(row.F0, 1.0);
    EXPECT_EQ(row.EF1, 0.0);
  }
}

TEST(FirstOrder, DeepLimitIsMaximallyMixed) {
  const auto rows = first_order_check(4, 200, 0.01, 4, 2);
  const auto& last = rows.back();
  EXPECT_EQ(last.d, 200);
  EXPECT_NEAR(last.EF, 1.0 / 16, 0.05 / 16);
  EXPECT_LT(last.F0, 1e-3);
  EXPECT_GT(last.second_ratio, 10.0);
}

TEST(TrajectoryAgreementTest, SmallRun) {
  const auto rows = trajectory_agreement(4, 4, *preset_model("t1t2", 4, 0.1), 400, 3, 9);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    EXPECT_GT(r.trajectory_stderr, 0.0);
    EXPECT_LT(std::abs(r.z), 4.0);
  }
}
