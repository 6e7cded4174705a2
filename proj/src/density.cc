#include "rcsbench/density.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rcsbench/kernels.h"

namespace rcsbench {
namespace {

void check_size(int n) {
  if (n < 1 || n > kMaxDensityQubits) {
    std::stringstream ss;
    ss << "density simulation supports 1.." << kMaxDensityQubits << " qubits (got " << n << ")";
    throw std::invalid_argument(ss.str());
  }
}

inline double parity_sign(uint64_t v) { return (popcount(v) & 1) ? -1.0 : 1.0; }

// Closed-form pieces of a model whose dissipators all commute.
struct ExactPlan {
  std::vector<std::pair<MonomialOp, double>> paulis;  // gamma D[P]
  std::vector<std::pair<int, double>> damping;        // gamma D[sigma_q]
};

std::optional<ExactPlan> exact_plan(const NoiseModel& model) {
  ExactPlan plan;
  const int n = model.n;
  for (const auto& t : model.terms) {
    switch (t.kind) {
      case TermKind::pauli_string:
        plan.paulis.emplace_back(t.op(n), t.gamma);
        break;
      case TermKind::dephasing: {
        // gamma D[|1><1|] = (gamma/4) D[Z].
        MonomialOp z;
        z.z = uint64_t{1} << qubit_bit(n, t.support[0]);
        plan.paulis.emplace_back(z, t.gamma / 4);
        break;
      }
      case TermKind::amplitude_decay:
        plan.damping.emplace_back(t.support[0], t.gamma);
        break;
      default:
        return std::nullopt;
    }
  }
  // Damping on q commutes with Pauli conjugations that are I or Z on q.
  for (const auto& [q, g] : plan.damping) {
    const uint64_t bit = uint64_t{1} << qubit_bit(n, q);
    for (const auto& [p, gp] : plan.paulis)
      if ((p.flip & bit) && gp > 0 && g > 0) return std::nullopt;
  }
  return plan;
}

void apply_pauli_mixing(DensityState& rho, const MonomialOp& p, double gamma, double t) {
  const double e = std::exp(-2.0 * gamma * t);
  const double a = 0.5 * (1 + e), b = 0.5 * (1 - e);
  const int n = rho.n;
  const uint64_t mask = rho.dim() - 1;
  const uint64_t total = rho.rho.size();
  const uint64_t pair_flip = (p.flip << n) | p.flip;
  for (uint64_t idx = 0; idx < total; ++idx) {
    const uint64_t partner = idx ^ pair_flip;
    if (partner < idx) continue;
    const double s = parity_sign(((idx >> n) ^ idx) & mask & p.z);
    if (partner == idx) {
      rho.rho[idx] *= a + b * s;
    } else {
      const Complex u = rho.rho[idx], v = rho.rho[partner];
      rho.rho[idx] = a * u + b * s * v;
      rho.rho[partner] = a * v + b * s * u;
    }
  }
}

void apply_damping(DensityState& rho, int q, double gamma, double t) {
  const double keep = std::exp(-gamma * t);
  const double coh = std::exp(-0.5 * gamma * t);
  const double moved = 1 - keep;
  const int n = rho.n;
  const uint64_t kb = uint64_t{1} << (n + qubit_bit(n, q));
  const uint64_t bb = uint64_t{1} << qubit_bit(n, q);
  const uint64_t total = rho.rho.size();
  for (uint64_t idx = 0; idx < total; ++idx) {
    if (idx & (kb | bb)) continue;
    Complex& r00 = rho.rho[idx];
    Complex& r01 = rho.rho[idx | bb];
    Complex& r10 = rho.rho[idx | kb];
    Complex& r11 = rho.rho[idx | kb | bb];
    r00 += moved * r11;
    r11 *= keep;
    r01 *= coh;
    r10 *= coh;
  }
}

void rk4(DensityState& rho, const NoiseModel& model, double t, double h) {
  const int steps = std::max(1, static_cast<int>(std::ceil(t / h - 1e-9)));
  const double dt = t / steps;
  const size_t size = rho.rho.size();
  CVec k1(size), k2(size), k3(size), k4(size);
  DensityState tmp(rho.n);
  for (int s = 0; s < steps; ++s) {
    lindblad_rhs(rho, model, k1);
    for (size_t i = 0; i < size; ++i) tmp.rho[i] = rho.rho[i] + 0.5 * dt * k1[i];
    lindblad_rhs(tmp, model, k2);
    for (size_t i = 0; i < size; ++i) tmp.rho[i] = rho.rho[i] + 0.5 * dt * k2[i];
    lindblad_rhs(tmp, model, k3);
    for (size_t i = 0; i < size; ++i) tmp.rho[i] = rho.rho[i] + dt * k3[i];
    lindblad_rhs(tmp, model, k4);
    for (size_t i = 0; i < size; ++i) rho.rho[i] += (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
}

std::vector<unsigned> ket_bits(int n, const std::vector<int>& qubits) {
  std::vector<unsigned> b;
  for (int q : qubits) b.push_back(static_cast<unsigned>(n) + qubit_bit(n, q));
  return b;
}

std::vector<unsigned> bra_bits(int n, const std::vector<int>& qubits) {
  std::vector<unsigned> b;
  for (int q : qubits) b.push_back(qubit_bit(n, q));
  return b;
}

}  // namespace

DensityState::DensityState(int n_) : n(n_) {
  check_size(n_);
  rho.assign(size_t{1} << (2 * n_), Complex(0, 0));
}

DensityState DensityState::zero_state(int n) {
  DensityState d(n);
  d.rho[0] = 1;
  return d;
}

DensityState DensityState::from_pure(const PureState& psi) {
  DensityState d(psi.n);
  const double inv = 1.0 / psi.norm2();
  for (uint64_t x = 0; x < d.dim(); ++x)
    for (uint64_t y = 0; y < d.dim(); ++y) d.at(x, y) = psi.amplitudes[x] * std::conj(psi.amplitudes[y]) * inv;
  return d;
}

DensityState DensityState::maximally_mixed(int n) {
  DensityState d(n);
  const double v = 1.0 / static_cast<double>(d.dim());
  for (uint64_t x = 0; x < d.dim(); ++x) d.at(x, x) = v;
  return d;
}

double DensityState::trace() const {
  double t = 0;
  for (uint64_t x = 0; x < dim(); ++x) t += at(x, x).real();
  return t;
}

double DensityState::hermiticity_error() const {
  double e = 0;
  for (uint64_t x = 0; x < dim(); ++x)
    for (uint64_t y = x; y < dim(); ++y) e = std::max(e, std::abs(at(x, y) - std::conj(at(y, x))));
  return e;
}

double DensityState::min_eigenvalue() const {
  const auto d = static_cast<Eigen::Index>(dim());
  CMatrix m(d, d);
  for (Eigen::Index x = 0; x < d; ++x)
    for (Eigen::Index y = 0; y < d; ++y) m(x, y) = at(static_cast<uint64_t>(x), static_cast<uint64_t>(y));
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

std::vector<double> DensityState::diagonal() const {
  std::vector<double> q(dim());
  for (uint64_t x = 0; x < dim(); ++x) q[x] = at(x, x).real();
  return q;
}

void apply_gate(DensityState& rho, const Gate& gate) {
  const size_t k = gate.targets.size();
  if (k == 0 || gate.matrix.rows() != (Eigen::Index{1} << k) || gate.matrix.cols() != gate.matrix.rows())
    throw std::invalid_argument("apply_gate: matrix dimension does not match targets");
  for (int t : gate.targets)
    if (t < 0 || t >= rho.n) throw std::invalid_argument("apply_gate: target out of range");
  const auto u = kernels::row_major(gate.matrix);
  const auto uc = kernels::row_major(gate.matrix.conjugate());
  const auto kb = ket_bits(rho.n, gate.targets);
  const auto bb = bra_bits(rho.n, gate.targets);
  kernels::apply_kbit(rho.rho.data(), rho.rho.size(), kb, u.data());
  kernels::apply_kbit(rho.rho.data(), rho.rho.size(), bb, uc.data());
}

void apply_layer(DensityState& rho, const Layer& layer) {
  for (const auto& g : layer.gates) apply_gate(rho, g);
}

void lindblad_rhs(const DensityState& rho, const NoiseModel& model, CVec& out) {
  const int n = rho.n;
  const uint64_t mask = rho.dim() - 1;
  const uint64_t total = rho.rho.size();
  out.assign(total, Complex(0, 0));
  for (const auto& term : model.terms) {
    if (term.gamma == 0) continue;
    const MonomialOp m = term.op(n);
    const double g = term.gamma;
    for (uint64_t idx = 0; idx < total; ++idx) {
      const uint64_t x = idx >> n, y = idx & mask;
      const bool ax = m.acts_on(x), ay = m.acts_on(y);
      if (!ax && !ay) continue;
      const Complex r = rho.rho[idx];
      out[idx] -= 0.5 * g * ((ax ? 1.0 : 0.0) + (ay ? 1.0 : 0.0)) * r;
      if (ax && ay) {
        const uint64_t tgt = ((x ^ m.flip) << n) | (y ^ m.flip);
        out[tgt] += g * parity_sign((x ^ y) & m.z) * r;
      }
    }
  }
}

bool has_exact_channel(const NoiseModel& model) { return exact_plan(model).has_value(); }

void evolve_density(DensityState& rho, const NoiseModel& model, double t, LindbladIntegrator integrator, double h) {
  check_size(rho.n);
  if (model.n != rho.n) throw std::invalid_argument("evolve_density: model and state qubit counts differ");
  if (t < 0) throw std::invalid_argument("evolve_density: negative time");
  if (t == 0) return;
  if (integrator != LindbladIntegrator::rk4) {
    const auto plan = exact_plan(model);
    if (plan) {
      for (const auto& [p, g] : plan->paulis)
        if (g > 0) apply_pauli_mixing(rho, p, g, t);
      for (const auto& [q, g] : plan->damping)
        if (g > 0) apply_damping(rho, q, g, t);
      return;
    }
    if (integrator == LindbladIntegrator::exact)
      throw std::invalid_argument("evolve_density: model has non-commuting dissipators; exact channel unavailable");
  }
  rk4(rho, model, t, h);
}

void evolve_density_unit_time(DensityState& rho, const NoiseModel& model, LindbladIntegrator integrator) {
  evolve_density(rho, model, 1.0, integrator);
}

DensityState run_noisy_density(const Circuit& circuit, const NoiseModel* model, const DensityObserver& observer,
                               LindbladIntegrator integrator) {
  if (model && model->n != circuit.n) throw std::invalid_argument("run_noisy_density: model/circuit n mismatch");
  DensityState rho = DensityState::zero_state(circuit.n);
  int depth = 0;
  for (const auto& layer : circuit.layers) {
    apply_layer(rho, layer);
    if (layer.injected) continue;
    ++depth;
    if (model) evolve_density_unit_time(rho, *model, integrator);
    if (observer) observer(depth, rho);
  }
  return rho;
}

DensityState run_density_with_channel(const Circuit& circuit, const ProcessMatrix& chi, const DensityObserver& observer) {
  if (circuit.n % chi.k != 0) throw std::invalid_argument("run_density_with_channel: n must be a multiple of the support size");
  DensityState rho = DensityState::zero_state(circuit.n);
  int depth = 0;
  for (const auto& layer : circuit.layers) {
    apply_layer(rho, layer);
    if (layer.injected) continue;
    ++depth;
    for (int start = 0; start < circuit.n; start += chi.k) {
      std::vector<int> support;
      for (int j = 0; j < chi.k; ++j) support.push_back(start + j);
      apply_pauli_channel(rho, chi, support);
    }
    if (observer) observer(depth, rho);
  }
  return rho;
}

double fidelity(const DensityState& rho, const PureState& psi) {
  if (rho.n != psi.n) throw std::invalid_argument("fidelity: qubit count mismatch");
  const uint64_t d = rho.dim();
  Complex acc = 0;
  for (uint64_t x = 0; x < d; ++x) {
    Complex row = 0;
    const Complex* r = &rho.rho[x << rho.n];
    for (uint64_t y = 0; y < d; ++y) row += r[y] * psi.amplitudes[y];
    acc += std::conj(psi.amplitudes[x]) * row;
  }
  const double f = acc.real() / psi.norm2();
  return std::clamp(f, 0.0, 1.0);
}

double fidelity(const DensityState& rho, const Circuit& circuit) { return fidelity(rho, run_circuit(circuit)); }

void apply_pauli_channel(DensityState& rho, const ProcessMatrix& chi, const std::vector<int>& support) {
  const int k = static_cast<int>(support.size());
  if (k < 1 || k > 3) throw std::invalid_argument("apply_pauli_channel: support must be 1..3 qubits");
  if (chi.k != k) throw std::invalid_argument("apply_pauli_channel: process matrix size does not match support");
  for (size_t i = 0; i < support.size(); ++i) {
    if (support[i] < 0 || support[i] >= rho.n) throw std::invalid_argument("apply_pauli_channel: support out of range");
    for (size_t j = 0; j < i; ++j)
      if (support[i] == support[j]) throw std::invalid_argument("apply_pauli_channel: repeated support qubit");
  }
  if (!chi.is_channel(1e-9)) throw std::invalid_argument("apply_pauli_channel: process matrix is not a valid channel");
  const CMatrix s = superop_from_process_matrix(chi);
  const auto m = kernels::row_major(s);
  auto bits = ket_bits(rho.n, support);
  const auto bb = bra_bits(rho.n, support);
  bits.insert(bits.end(), bb.begin(), bb.end());
  kernels::apply_kbit(rho.rho.data(), rho.rho.size(), bits, m.data());
}

double pauli_expectation(const DensityState& rho, const PauliString& p) {
  if (p.n != rho.n) throw std::invalid_argument("pauli_expectation: qubit count mismatch");
  const MonomialOp op = MonomialOp::from_pauli(p);
  Complex acc = 0;
  for (uint64_t y = 0; y < rho.dim(); ++y) acc += op.phase(y) * rho.at(y, y ^ op.flip);
  return acc.real();
}

}  // namespace rcsbench
