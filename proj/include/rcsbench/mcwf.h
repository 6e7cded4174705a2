#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rcsbench/circuits.h"
#include "rcsbench/noise.h"
#include "rcsbench/rng.h"
#include "rcsbench/statevec.h"

namespace rcsbench {

// Gamma_x = sum_l gamma_l <x|J_l^dag J_l|x>. Distinct values are grouped into
// levels so norm evaluations during root finding cost O(levels).
struct DecayProfile {
  int n = 0;
  std::vector<double> rates;          // per basis state
  std::vector<double> levels;         // distinct rates (empty when too many)
  std::vector<uint16_t> level_of;     // index into levels, per basis state
  bool grouped() const { return !levels.empty(); }
};

DecayProfile decay_profile(const NoiseModel& model);

struct Trajectory {
  PureState state;      // unnormalized between jumps
  double threshold = 1; // pending jump threshold p
  Rng rng;
  int jumps = 0;
};

Trajectory start_trajectory(PureState state, Rng rng);

// Solves sum_x |psi_x|^2 exp(-Gamma_x t) = p on [0, remaining]. Returns nullopt
// when the norm stays above p for the whole window, 0 when p >= current norm.
std::optional<double> jump_time(const PureState& state, const DecayProfile& profile, double p,
                                double remaining = 1.0);

// psi_x <- psi_x exp(-Gamma_x t / 2).
void decay_state(PureState& state, const DecayProfile& profile, double t);

// Unnormalized jump weights gamma_l <psi|J_l^dag J_l|psi>.
std::vector<double> jump_weights(const PureState& state, const NoiseModel& model);
size_t select_jump(const PureState& state, const NoiseModel& model, Rng& rng);
void apply_jump(PureState& state, const CollapseTerm& term);

void evolve_unit_time(Trajectory& traj, const NoiseModel& model, const DecayProfile& profile);

// Called after each gate layer's noise step; the state is not normalized.
using TrajectoryObserver = std::function<void(int depth, const PureState& state)>;

PureState run_noisy_trajectory(const Circuit& circuit, const NoiseModel& model, Rng& rng,
                               const TrajectoryObserver& observer = nullptr,
                               const DecayProfile* profile = nullptr);

// Streaming sums over trajectories for one circuit.
struct TrajectoryAccumulator {
  uint64_t circuit_seed = 0;
  std::string model;
  int T = 0;
  double sum_p_weighted = 0;     // sum_t sum_x p(x) q_t(x)
  double sum_p_weighted_sq = 0;  // sum_t (sum_x p(x) q_t(x))^2
  double sum_p_sq = 0;           // sum_x p(x)^2 of the ideal output
  double fidelity_sum = 0;       // sum_t |<psi|phi_t>|^2
  double fidelity_sq_sum = 0;

  void add(double p_weighted, double fid);
  void merge(const TrajectoryAccumulator& other);
};

struct EnsembleResult {
  TrajectoryAccumulator accumulator;
  std::vector<PureState> states;  // filled only when requested
};

// T trajectories with streams (master_seed, trajectory index); merged in index order.
EnsembleResult trajectory_ensemble(const Circuit& circuit, const NoiseModel& model, int T, uint64_t master_seed,
                                   bool keep_states = false, int threads = 1);

}  // namespace rcsbench
