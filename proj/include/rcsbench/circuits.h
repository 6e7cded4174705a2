#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rcsbench/rng.h"
#include "rcsbench/types.h"

namespace rcsbench {

enum class Boundary { ring, open };
enum class GateSet { haar2q, cnot_haar1q };

std::string to_string(Boundary b);
std::string to_string(GateSet g);
Boundary parse_boundary(const std::string& s);
GateSet parse_gate_set(const std::string& s);

struct Gate {
  std::vector<int> targets;
  CMatrix matrix;
};

// One depth unit. Gates are applied in list order. Injected layers hold
// Pauli errors and do not count toward the depth.
struct Layer {
  std::vector<Gate> gates;
  bool injected = false;
};

struct Circuit {
  int n = 0;
  Boundary boundary = Boundary::ring;
  GateSet gate_set = GateSet::haar2q;
  uint64_t seed = 0;
  std::vector<Layer> layers;

  int depth() const;
  // Number of two-qubit gates.
  int two_qubit_gate_count() const;
  // Copy holding only the first d gate layers (injected layers inside are kept).
  Circuit prefix(int d) const;
};

struct ErrorInjection {
  std::string pauli;  // length n over {I,X,Y,Z}
  int layer = 1;      // inserted after gate layer `layer`
};

CMatrix sample_haar_unitary(int dim, Rng& rng);

// Pairs acted on by gate layer t (1-based) under the alternating architecture.
std::vector<std::pair<int, int>> layer_pairs(int n, int t, Boundary boundary);

// Pure function of (n, d, gate_set, boundary, seed). Gates are drawn layer by
// layer from one stream, so the first d' layers of a depth-d circuit equal the
// depth-d' circuit with the same seed.
Circuit sample_rqc(int n, int d, GateSet gate_set, Boundary boundary, uint64_t seed);

Circuit inject_pauli(const Circuit& circuit, const ErrorInjection& injection);
Circuit remove_injections(const Circuit& circuit);

void validate_circuit(const Circuit& circuit);

CMatrix pauli_matrix(char p);
CMatrix cnot_matrix();

}  // namespace rcsbench
