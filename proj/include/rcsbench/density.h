#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "rcsbench/circuits.h"
#include "rcsbench/noise.h"
#include "rcsbench/pauli.h"
#include "rcsbench/statevec.h"

namespace rcsbench {

constexpr int kMaxDensityQubits = 10;

// rho stored row-major: element (x, y) at index (x << n) | y.
struct DensityState {
  int n = 0;
  CVec rho;

  DensityState() = default;
  explicit DensityState(int n);  // all zeros
  static DensityState zero_state(int n);
  static DensityState from_pure(const PureState& psi);
  static DensityState maximally_mixed(int n);

  size_t dim() const { return size_t{1} << n; }
  Complex& at(uint64_t x, uint64_t y) { return rho[(x << n) | y]; }
  const Complex& at(uint64_t x, uint64_t y) const { return rho[(x << n) | y]; }

  double trace() const;
  double hermiticity_error() const;
  double min_eigenvalue() const;
  std::vector<double> diagonal() const;
};

enum class LindbladIntegrator {
  // Exact closed-form channels when every dissipator commutes, RK4 otherwise.
  automatic,
  rk4,
  exact,
};

constexpr double kRk4Step = 0.02;

void apply_gate(DensityState& rho, const Gate& gate);
void apply_layer(DensityState& rho, const Layer& layer);

// d rho / dt = sum_l gamma_l D[J_l](rho); writes the generator applied to rho.
void lindblad_rhs(const DensityState& rho, const NoiseModel& model, CVec& out);

// True when all dissipators in the model commute as superoperators, so the
// channel factorizes into closed-form pieces.
bool has_exact_channel(const NoiseModel& model);

void evolve_density(DensityState& rho, const NoiseModel& model, double t,
                    LindbladIntegrator integrator = LindbladIntegrator::automatic, double h = kRk4Step);
void evolve_density_unit_time(DensityState& rho, const NoiseModel& model,
                              LindbladIntegrator integrator = LindbladIntegrator::automatic);

// Called after each gate layer's noise step with the depth reached so far.
using DensityObserver = std::function<void(int depth, const DensityState& rho)>;

// Gate layers alternate with unit-time noise, matching trajectory timing.
// A null model gives the ideal evolution.
DensityState run_noisy_density(const Circuit& circuit, const NoiseModel* model,
                               const DensityObserver& observer = nullptr,
                               LindbladIntegrator integrator = LindbladIntegrator::automatic);

// Same alternation with a fixed process matrix applied after each gate layer
// on consecutive support windows {0..k-1}, {k..2k-1}, ...
DensityState run_density_with_channel(const Circuit& circuit, const ProcessMatrix& chi,
                                      const DensityObserver& observer = nullptr);

// <psi|rho|psi>, clamped to [0, 1].
double fidelity(const DensityState& rho, const PureState& psi);
double fidelity(const DensityState& rho, const Circuit& circuit);

void apply_pauli_channel(DensityState& rho, const ProcessMatrix& chi, const std::vector<int>& support);

// tr(P rho).
double pauli_expectation(const DensityState& rho, const PauliString& p);

}  // namespace rcsbench
