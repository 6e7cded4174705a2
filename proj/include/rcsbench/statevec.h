#pragma once

#include <cstdint>
#include <vector>

#include "rcsbench/circuits.h"
#include "rcsbench/rng.h"
#include "rcsbench/types.h"

namespace rcsbench {

constexpr int kMaxStatevecQubits = 24;

struct PureState {
  int n = 0;
  CVec amplitudes;

  static PureState zero(int n);
  double norm2() const;
  void normalize();
  size_t dim() const { return amplitudes.size(); }
};

void apply_gate(PureState& state, const Gate& gate);
void apply_layer(PureState& state, const Layer& layer);

// C|0^n>. Runs every layer (including injected ones).
PureState run_circuit(const Circuit& circuit);

double output_probability(const PureState& state, uint64_t x);
// |amplitude_x|^2 / norm2 for all x.
std::vector<double> probabilities(const PureState& state);

// Inverse-CDF sampling over the full table; renormalizes if norm2 drifts.
std::vector<uint64_t> sample_bitstrings(const PureState& state, size_t M, Rng& rng);
std::vector<uint64_t> sample_from_probabilities(const std::vector<double>& probs, size_t M, Rng& rng);

// |<psi_injected|psi_ideal>|^2. Only layers up to the injection point are simulated.
double pauli_overlap_sq(const Circuit& circuit, const ErrorInjection& injection);

Complex inner_product(const PureState& a, const PureState& b);

// Bitstring text with qubit 0 first.
std::string bitstring(uint64_t x, int n);
uint64_t parse_bitstring(const std::string& s);

}  // namespace rcsbench
