#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "rcsbench/types.h"

namespace rcsbench {

// n-qubit Pauli as i^{#Y} X^x Z^z with masks over physical bits.
struct PauliString {
  int n = 0;
  uint64_t x_mask = 0;
  uint64_t z_mask = 0;

  // Label character q acts on qubit q. Accepts I, X, Y, Z.
  static PauliString parse(std::string_view label);
  std::string label() const;
  bool is_identity() const { return x_mask == 0 && z_mask == 0; }
  int weight() const { return popcount(x_mask | z_mask); }
  int y_count() const { return popcount(x_mask & z_mask); }
  // Qubits on which the Pauli acts non-trivially, ascending.
  std::vector<int> support() const;
};

// Operators with one nonzero entry per column, used for collapse operators:
// J|x> = [x & need == need] * i^y * (-1)^{|x & z|} |x ^ flip>.
struct MonomialOp {
  uint64_t need = 0;
  uint64_t flip = 0;
  uint64_t z = 0;
  int y = 0;  // power of i in the global phase

  static MonomialOp from_pauli(const PauliString& p);
  Complex phase(uint64_t x) const;
  bool acts_on(uint64_t x) const { return (x & need) == need; }
};

// |P psi>; in place.
void apply_pauli(CVec& psi, const PauliString& p);
// <psi| P |psi>, real for Hermitian P.
double pauli_expectation(const CVec& psi, const PauliString& p);

}  // namespace rcsbench
