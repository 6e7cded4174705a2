#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcsbench/circuits.h"
#include "rcsbench/density.h"
#include "rcsbench/estimators.h"
#include "rcsbench/noise.h"
#include "rcsbench/stats.h"

namespace rcsbench {

// Raised for invalid user-supplied configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Backend { mcwf, density, statevec_sampling };
std::string to_string(Backend b);
Backend parse_backend(const std::string& s);

// independent: fresh circuits for every (depth, index). prefix: one circuit of
// the largest depth per index, observed at every requested depth.
enum class CircuitMode { independent, prefix };
std::string to_string(CircuitMode m);
CircuitMode parse_circuit_mode(const std::string& s);

struct BenchmarkConfig {
  std::string name;
  int n = 4;
  std::vector<int> depths;
  int L = 10;
  Backend backend = Backend::density;
  int trajectories = 100;  // mcwf; also one sample per trajectory when sampling with noise
  int samples = 1000;      // statevec_sampling without noise
  GateSet gate_set = GateSet::haar2q;
  Boundary boundary = Boundary::ring;
  std::optional<NoiseModel> noise;
  std::vector<EstimatorKind> estimators{EstimatorKind::F, EstimatorKind::uXEB};
  uint64_t master_seed = 1;
  std::optional<int> fit_min;
  std::optional<int> fit_max;
  CircuitMode circuit_mode = CircuitMode::independent;
  int dfe_paulis = 100;
  int threads = 1;
  LindbladIntegrator integrator = LindbladIntegrator::automatic;
};

void validate_config(const BenchmarkConfig& config);

// Fit range used when none is configured: from depth n when at least three
// depths remain, otherwise the whole grid.
std::pair<int, int> default_fit_range(const BenchmarkConfig& config);

struct EstimatorSeries {
  EstimatorKind kind = EstimatorKind::F;
  std::vector<DepthPoint> points;
  std::optional<DecayFit> fit;
  std::string fit_error;
};

struct BenchmarkReport {
  BenchmarkConfig config;
  std::optional<double> lambda_true;
  std::vector<EstimatorSeries> series;
  std::vector<std::vector<uint64_t>> circuit_seeds;  // [depth index][circuit]

  const EstimatorSeries& at(EstimatorKind k) const;
};

BenchmarkReport rcs_benchmark(const BenchmarkConfig& config);

struct RbConfig {
  int n = 4;
  std::optional<NoiseModel> noise;
  std::vector<int> lengths{1, 2, 4, 8, 16, 32};
  int sequences = 20;
  Backend backend = Backend::density;
  int trajectories = 100;
  Boundary boundary = Boundary::ring;
  uint64_t seed = 1;
  int threads = 1;
  // Pauli error rate e = conversion * (1 - f) for the fitted depolarizing parameter f.
  double conversion = 15.0 / 16.0;
};

struct PairFit {
  PairKey pair;
  int parity = 1;  // layer parity (1 odd, 2 even) whose pattern contains the pair
  double A = 0, f = 1, B = 0;
  double sigma_f = 0;
  double e = 0, sigma_e = 0;
  std::vector<DepthPoint> survival;  // depth = sequence length
};

struct RbReport {
  RbConfig config;
  std::vector<PairFit> pairs;
  std::map<PairKey, double> error_rates;
  double lambda_srb = 0;  // per circuit layer, averaged over both parities
  std::optional<double> lambda_true;
};

RbReport simultaneous_rb(const RbConfig& config);

struct VirtualConfig {
  int n = 10;
  double gamma1 = 0.01;
  double gamma2 = 0.02;
  double gamma3 = 0.0;
  Backend backend = Backend::density;  // free-evolution experiments
  int trajectories = 200;
  int t_max = 20;
  BenchmarkConfig rcs;  // n and noise are filled in from the rates above
  uint64_t seed = 1;
  int threads = 1;
};

struct VirtualResult {
  std::vector<DepthPoint> t1_series;      // depth = time, mean excited population
  std::vector<DepthPoint> ramsey_series;  // depth = time, mean <X>
  DecayFit t1_fit, ramsey_fit;
  double Gamma1 = 0, sigma_Gamma1 = 0;
  double Gamma2 = 0, sigma_Gamma2 = 0;
  double lambda = 0, sigma_lambda = 0;
  double gamma3 = 0, sigma_gamma3 = 0;
  double lambda_true = 0;
  BenchmarkReport rcs;
};

// gamma3 = Gamma1/4 + Gamma2/4 - lambda/n.
double virtual_gamma3(double Gamma1, double Gamma2, double lambda, int n);
// lambda = n (gamma1/2 + gamma2/4 + gamma3) and Gamma2 = gamma1 + gamma2 + 8 gamma3.
double virtual_lambda(int n, double gamma1, double gamma2, double gamma3);
double virtual_Gamma2(double gamma1, double gamma2, double gamma3);

VirtualResult virtual_experiment(const VirtualConfig& config);

struct Theorem1Result {
  int n = 0, d = 0, L = 0;
  double mean_full = 0, mean_diag = 0;
  double mean_diff = 0, stderr_diff = 0, z = 0;
  std::vector<double> full, diag;
};

// Same circuits under chi and under its diagonal part; paired z-score of the
// fidelity difference.
Theorem1Result theorem1_check(int n, int d, const ProcessMatrix& chi, int L, uint64_t seed,
                              GateSet gate_set = GateSet::haar2q, int threads = 1);

struct FirstOrderRow {
  int d = 0;
  double F0 = 0, EF1 = 0;
  double EF = 0, EF_stderr = 0;
  double first_ratio = 0;   // EF1 / F0
  double second_ratio = 0;  // (EF - F0 - EF1) / F0
};

// EF from density simulation with i.i.d. X flips of probability eps after
// every layer, averaged over L circuits; F0 and EF1 from the spin model.
std::vector<FirstOrderRow> first_order_check(int n, int d_max, double eps, int L, uint64_t seed, int threads = 1);

struct TrajectoryAgreement {
  int circuit = 0;
  double density_fidelity = 0;
  double trajectory_mean = 0;
  double trajectory_stderr = 0;
  double z = 0;
};

// Per circuit: trajectory-averaged fidelity against the exact density fidelity.
std::vector<TrajectoryAgreement> trajectory_agreement(int n, int d, const NoiseModel& model, int T, int circuits,
                                                      uint64_t seed, int threads = 1);

}  // namespace rcsbench
