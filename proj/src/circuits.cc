#include "rcsbench/circuits.h"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rcsbench/pauli.h"

namespace rcsbench {

std::string to_string(Boundary b) { return b == Boundary::ring ? "ring" : "open"; }
std::string to_string(GateSet g) { return g == GateSet::haar2q ? "haar2q" : "cnot_haar1q"; }

Boundary parse_boundary(const std::string& s) {
  if (s == "ring") return Boundary::ring;
  if (s == "open") return Boundary::open;
  throw std::invalid_argument("unknown boundary '" + s + "'");
}

GateSet parse_gate_set(const std::string& s) {
  if (s == "haar2q") return GateSet::haar2q;
  if (s == "cnot_haar1q") return GateSet::cnot_haar1q;
  throw std::invalid_argument("unknown gate set '" + s + "'");
}

int Circuit::depth() const {
  int d = 0;
  for (const auto& layer : layers) d += layer.injected ? 0 : 1;
  return d;
}

int Circuit::two_qubit_gate_count() const {
  int m = 0;
  for (const auto& layer : layers)
    for (const auto& g : layer.gates) m += g.targets.size() == 2 ? 1 : 0;
  return m;
}

Circuit Circuit::prefix(int d) const {
  if (d < 0 || d > depth()) throw std::out_of_range("prefix depth out of range");
  Circuit out = *this;
  out.layers.clear();
  int seen = 0;
  for (const auto& layer : layers) {
    if (!layer.injected && seen == d) break;
    out.layers.push_back(layer);
    if (!layer.injected) ++seen;
  }
  return out;
}

CMatrix sample_haar_unitary(int dim, Rng& rng) {
  if (dim != 2 && dim != 4) {
    std::stringstream ss;
    ss << "sample_haar_unitary: unsupported dimension " << dim;
    throw std::invalid_argument(ss.str());
  }
  const double s = 1.0 / std::sqrt(2.0);
  CMatrix z(dim, dim);
  for (int c = 0; c < dim; ++c)
    for (int r = 0; r < dim; ++r) {
      const double re = rng.normal(), im = rng.normal();
      z(r, c) = Complex(re * s, im * s);
    }
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ();
  const CMatrix& rr = qr.matrixQR();
  for (int j = 0; j < dim; ++j) {
    const Complex d = rr(j, j);
    const double a = std::abs(d);
    q.col(j) *= a > 0 ? d / a : Complex(1, 0);
  }
  return q;
}

std::vector<std::pair<int, int>> layer_pairs(int n, int t, Boundary boundary) {
  std::vector<std::pair<int, int>> pairs;
  const int start = (t % 2 == 1) ? 0 : 1;
  for (int i = start; i < n; i += 2) {
    if (i + 1 < n) {
      pairs.emplace_back(i, i + 1);
    } else if (boundary == Boundary::ring) {
      pairs.emplace_back(i, 0);
    }
  }
  return pairs;
}

CMatrix pauli_matrix(char p) {
  CMatrix m = CMatrix::Zero(2, 2);
  switch (p) {
    case 'I': m(0, 0) = 1; m(1, 1) = 1; break;
    case 'X': m(0, 1) = 1; m(1, 0) = 1; break;
    case 'Y': m(0, 1) = Complex(0, -1); m(1, 0) = Complex(0, 1); break;
    case 'Z': m(0, 0) = 1; m(1, 1) = -1; break;
    default: throw std::invalid_argument(std::string("invalid Pauli '") + p + "'");
  }
  return m;
}

CMatrix cnot_matrix() {
  CMatrix m = CMatrix::Zero(4, 4);
  m(0, 0) = 1;
  m(1, 1) = 1;
  m(2, 3) = 1;
  m(3, 2) = 1;
  return m;
}

Circuit sample_rqc(int n, int d, GateSet gate_set, Boundary boundary, uint64_t seed) {
  if (n < 2) throw std::invalid_argument("sample_rqc: n must be >= 2");
  if (d < 0) throw std::invalid_argument("sample_rqc: depth must be >= 0");
  if (boundary == Boundary::ring && n % 2 != 0) {
    std::stringstream ss;
    ss << "sample_rqc: ring boundary requires even n (got n=" << n << ")";
    throw std::invalid_argument(ss.str());
  }
  Circuit c;
  c.n = n;
  c.boundary = boundary;
  c.gate_set = gate_set;
  c.seed = seed;
  Rng rng(seed);
  for (int t = 1; t <= d; ++t) {
    Layer layer;
    if (gate_set == GateSet::cnot_haar1q) {
      for (int q = 0; q < n; ++q) layer.gates.push_back(Gate{{q}, sample_haar_unitary(2, rng)});
      for (auto [a, b] : layer_pairs(n, t, boundary)) {
        // Control is the lower qubit index.
        const int ctrl = std::min(a, b), tgt = std::max(a, b);
        layer.gates.push_back(Gate{{ctrl, tgt}, cnot_matrix()});
      }
    } else {
      for (auto [a, b] : layer_pairs(n, t, boundary))
        layer.gates.push_back(Gate{{a, b}, sample_haar_unitary(4, rng)});
    }
    c.layers.push_back(std::move(layer));
  }
  return c;
}

Circuit inject_pauli(const Circuit& circuit, const ErrorInjection& injection) {
  if (static_cast<int>(injection.pauli.size()) != circuit.n)
    throw std::invalid_argument("inject_pauli: Pauli label length must equal n");
  const PauliString p = PauliString::parse(injection.pauli);
  if (p.is_identity()) throw std::invalid_argument("inject_pauli: identity Pauli is not an error");
  if (injection.layer < 1 || injection.layer > circuit.depth()) {
    std::stringstream ss;
    ss << "inject_pauli: layer " << injection.layer << " outside [1, " << circuit.depth() << "]";
    throw std::out_of_range(ss.str());
  }
  Layer err;
  err.injected = true;
  for (int q = 0; q < circuit.n; ++q) {
    const char ch = injection.pauli[static_cast<size_t>(q)];
    if (ch != 'I') err.gates.push_back(Gate{{q}, pauli_matrix(ch)});
  }
  Circuit out = circuit;
  out.layers.clear();
  int seen = 0;
  for (const auto& layer : circuit.layers) {
    out.layers.push_back(layer);
    if (!layer.injected && ++seen == injection.layer) out.layers.push_back(err);
  }
  return out;
}

Circuit remove_injections(const Circuit& circuit) {
  Circuit out = circuit;
  out.layers.clear();
  for (const auto& layer : circuit.layers)
    if (!layer.injected) out.layers.push_back(layer);
  return out;
}

void validate_circuit(const Circuit& c) {
  if (c.n < 1 || c.n > 63) throw std::invalid_argument("circuit: n out of range");
  for (const auto& layer : c.layers) {
    for (const auto& g : layer.gates) {
      const auto k = g.targets.size();
      if (k == 0 || k > 2) throw std::invalid_argument("circuit: gates act on 1 or 2 qubits");
      const Eigen::Index dim = Eigen::Index{1} << k;
      if (g.matrix.rows() != dim || g.matrix.cols() != dim)
        throw std::invalid_argument("circuit: gate matrix dimension does not match targets");
      std::set<int> seen;
      for (int t : g.targets) {
        if (t < 0 || t >= c.n) throw std::invalid_argument("circuit: target out of range");
        if (!seen.insert(t).second) throw std::invalid_argument("circuit: repeated target");
      }
      if (k == 2) {
        const int a = g.targets[0], b = g.targets[1];
        const int diff = std::abs(a - b);
        const bool adjacent = diff == 1 || (c.boundary == Boundary::ring && diff == c.n - 1);
        if (!adjacent) throw std::invalid_argument("circuit: two-qubit gate on non-adjacent qubits");
      }
      const double err = (g.matrix.adjoint() * g.matrix - CMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
      if (err > 1e-10) throw std::invalid_argument("circuit: gate matrix is not unitary");
    }
  }
}

}  // namespace rcsbench
