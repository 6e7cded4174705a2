#include "rcsbench/statevec.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rcsbench/kernels.h"
#include "rcsbench/pauli.h"

namespace rcsbench {

PureState PureState::zero(int n) {
  if (n < 1 || n > kMaxStatevecQubits) {
    std::stringstream ss;
    ss << "statevector supports 1.." << kMaxStatevecQubits << " qubits (got " << n << ")";
    throw std::invalid_argument(ss.str());
  }
  PureState s;
  s.n = n;
  s.amplitudes.assign(size_t{1} << n, Complex(0, 0));
  s.amplitudes[0] = 1;
  return s;
}

double PureState::norm2() const {
  double acc = 0;
  for (const auto& a : amplitudes) acc += std::norm(a);
  return acc;
}

void PureState::normalize() {
  const double s = 1.0 / std::sqrt(norm2());
  for (auto& a : amplitudes) a *= s;
}

void apply_gate(PureState& state, const Gate& gate) {
  const size_t k = gate.targets.size();
  if (k == 0 || gate.matrix.rows() != (Eigen::Index{1} << k) || gate.matrix.cols() != gate.matrix.rows())
    throw std::invalid_argument("apply_gate: matrix dimension does not match targets");
  std::vector<unsigned> bits;
  for (int t : gate.targets) {
    if (t < 0 || t >= state.n) throw std::invalid_argument("apply_gate: target out of range");
    bits.push_back(qubit_bit(state.n, t));
  }
  const auto m = kernels::row_major(gate.matrix);
  kernels::apply_kbit(state.amplitudes.data(), state.dim(), bits, m.data());
}

void apply_layer(PureState& state, const Layer& layer) {
  for (const auto& g : layer.gates) apply_gate(state, g);
}

PureState run_circuit(const Circuit& circuit) {
  PureState s = PureState::zero(circuit.n);
  for (const auto& layer : circuit.layers) apply_layer(s, layer);
  return s;
}

double output_probability(const PureState& state, uint64_t x) {
  if (x >= state.dim()) throw std::out_of_range("output_probability: bitstring out of range");
  return std::norm(state.amplitudes[x]);
}

std::vector<double> probabilities(const PureState& state) {
  std::vector<double> p(state.dim());
  const double inv = 1.0 / state.norm2();
  for (size_t x = 0; x < p.size(); ++x) p[x] = std::norm(state.amplitudes[x]) * inv;
  return p;
}

std::vector<uint64_t> sample_from_probabilities(const std::vector<double>& probs, size_t M, Rng& rng) {
  std::vector<uint64_t> out;
  if (M == 0) return out;
  std::vector<double> cdf(probs.size());
  double acc = 0;
  for (size_t x = 0; x < probs.size(); ++x) {
    acc += probs[x];
    cdf[x] = acc;
  }
  out.reserve(M);
  for (size_t i = 0; i < M; ++i) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    size_t x = static_cast<size_t>(it - cdf.begin());
    if (x >= probs.size()) x = probs.size() - 1;
    out.push_back(x);
  }
  return out;
}

std::vector<uint64_t> sample_bitstrings(const PureState& state, size_t M, Rng& rng) {
  std::vector<double> p(state.dim());
  for (size_t x = 0; x < p.size(); ++x) p[x] = std::norm(state.amplitudes[x]);
  const double total = state.norm2();
  if (std::abs(total - 1.0) > 1e-8)
    for (auto& v : p) v /= total;
  return sample_from_probabilities(p, M, rng);
}

Complex inner_product(const PureState& a, const PureState& b) {
  if (a.n != b.n) throw std::invalid_argument("inner_product: qubit count mismatch");
  Complex acc = 0;
  for (size_t x = 0; x < a.dim(); ++x) acc += std::conj(a.amplitudes[x]) * b.amplitudes[x];
  return acc;
}

double pauli_overlap_sq(const Circuit& circuit, const ErrorInjection& injection) {
  // <0|C^dag P_l C|0> with the later layers cancelling: simulate layers <= l.
  const PauliString p = PauliString::parse(injection.pauli);
  if (p.n != circuit.n) throw std::invalid_argument("pauli_overlap_sq: label length must equal n");
  if (p.is_identity()) throw std::invalid_argument("pauli_overlap_sq: identity Pauli is not an error");
  if (injection.layer < 0 || injection.layer > circuit.depth())
    throw std::out_of_range("pauli_overlap_sq: layer out of range");
  const Circuit head = circuit.prefix(injection.layer);
  const PureState s = run_circuit(head);
  const double e = pauli_expectation(s.amplitudes, p);
  return e * e;
}

std::string bitstring(uint64_t x, int n) {
  std::string s(static_cast<size_t>(n), '0');
  for (int q = 0; q < n; ++q)
    if (x >> qubit_bit(n, q) & 1) s[static_cast<size_t>(q)] = '1';
  return s;
}

uint64_t parse_bitstring(const std::string& s) {
  uint64_t x = 0;
  for (char c : s) {
    if (c != '0' && c != '1') throw std::invalid_argument("bitstring must contain only 0/1");
    x = (x << 1) | static_cast<uint64_t>(c - '0');
  }
  return x;
}

}  // namespace rcsbench
