#include "rcsbench/pauli.h"

#include <sstream>
#include <stdexcept>

namespace rcsbench {
namespace {

Complex ipow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

}  // namespace

PauliString PauliString::parse(std::string_view label) {
  PauliString p;
  p.n = static_cast<int>(label.size());
  if (p.n == 0 || p.n > 63) throw std::invalid_argument("Pauli label length must be in 1..63");
  for (int q = 0; q < p.n; ++q) {
    const uint64_t bit = uint64_t{1} << qubit_bit(p.n, q);
    switch (label[static_cast<size_t>(q)]) {
      case 'I': break;
      case 'X': p.x_mask |= bit; break;
      case 'Y': p.x_mask |= bit; p.z_mask |= bit; break;
      case 'Z': p.z_mask |= bit; break;
      default: {
        std::stringstream ss;
        ss << "invalid Pauli character '" << label[static_cast<size_t>(q)] << "' in " << label;
        throw std::invalid_argument(ss.str());
      }
    }
  }
  return p;
}

std::string PauliString::label() const {
  std::string s(static_cast<size_t>(n), 'I');
  for (int q = 0; q < n; ++q) {
    const uint64_t bit = uint64_t{1} << qubit_bit(n, q);
    const bool x = x_mask & bit, z = z_mask & bit;
    s[static_cast<size_t>(q)] = x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
  }
  return s;
}

std::vector<int> PauliString::support() const {
  std::vector<int> out;
  for (int q = 0; q < n; ++q)
    if ((x_mask | z_mask) >> qubit_bit(n, q) & 1) out.push_back(q);
  return out;
}

MonomialOp MonomialOp::from_pauli(const PauliString& p) {
  MonomialOp op;
  op.flip = p.x_mask;
  op.z = p.z_mask;
  op.y = p.y_count();
  return op;
}

Complex MonomialOp::phase(uint64_t x) const {
  Complex c = ipow(y);
  return (popcount(x & z) & 1) ? -c : c;
}

void apply_pauli(CVec& psi, const PauliString& p) {
  const MonomialOp op = MonomialOp::from_pauli(p);
  const uint64_t dim = psi.size();
  if (op.flip == 0) {
    for (uint64_t x = 0; x < dim; ++x) psi[x] *= op.phase(x);
    return;
  }
  for (uint64_t x = 0; x < dim; ++x) {
    const uint64_t y = x ^ op.flip;
    if (y < x) continue;
    const Complex ax = psi[x], ay = psi[y];
    psi[y] = op.phase(x) * ax;
    psi[x] = op.phase(y) * ay;
  }
}

double pauli_expectation(const CVec& psi, const PauliString& p) {
  const MonomialOp op = MonomialOp::from_pauli(p);
  Complex acc = 0;
  for (uint64_t x = 0; x < psi.size(); ++x) acc += std::conj(psi[x ^ op.flip]) * op.phase(x) * psi[x];
  return acc.real();
}

}  // namespace rcsbench
