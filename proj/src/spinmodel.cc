#include "rcsbench/spinmodel.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rcsbench::spin {
namespace {

// Weights scaled by 60 keep the tau sum in integers.
int weingarten60(Spin tau, Spin sigma) { return tau == sigma ? 4 : -1; }

// Two-copy single-qubit overlap <<a|b>>: tr(I) tr(I) = 4 or tr(SWAP) = 2.
int copy_overlap(Spin a, Spin b) { return a == b ? 4 : 2; }

}  // namespace

double weingarten_weight(Spin tau, Spin sigma) { return weingarten60(tau, sigma) / 60.0; }

double triangle_weight(Spin top_left, Spin top_right, Spin bottom) {
  int acc = 0;
  for (Spin tau : {Spin::minus, Spin::plus})
    acc += weingarten60(tau, bottom) * copy_overlap(top_left, tau) * copy_overlap(top_right, tau);
  return acc / 60.0;
}

void check_ring_size(int n) {
  if (n % 2 != 0) {
    std::stringstream ss;
    ss << "spin model needs an even ring size (got n=" << n << ")";
    throw std::invalid_argument(ss.str());
  }
  if (n < 4 || n > kMaxSpinQubits) {
    std::stringstream ss;
    ss << "spin model supports ring sizes 4.." << kMaxSpinQubits << " (got n=" << n << ")";
    throw std::invalid_argument(ss.str());
  }
}

TransferMatrix::TransferMatrix(int n) : n_(n), m_(n / 2) {
  check_ring_size(n);
  if (triangle_weight(Spin::minus, Spin::minus, Spin::plus) != 0 ||
      triangle_weight(Spin::plus, Spin::plus, Spin::minus) != 0 ||
      triangle_weight(Spin::plus, Spin::minus, Spin::plus) != triangle_weight(Spin::plus, Spin::minus, Spin::minus))
    throw std::logic_error("spin model: triangle weights lost their forcing structure");
}

std::vector<double> TransferMatrix::step_up(const std::vector<double>& below, int t_below) const {
  const uint64_t size = uint64_t{1} << m_;
  const double same = triangle_weight(Spin::plus, Spin::plus, Spin::plus);
  const double wall = triangle_weight(Spin::plus, Spin::minus, Spin::minus);
  std::vector<double> wall_pow(static_cast<size_t>(m_) + 1, 1.0);
  for (int k = 1; k <= m_; ++k) wall_pow[static_cast<size_t>(k)] = wall_pow[static_cast<size_t>(k - 1)] * wall;
  // Lower gate j sits under gates (j-1, j) of the layer above when the lower
  // layer is odd, and under (j, j+1) when it is even.
  const int shift = (t_below % 2 == 1) ? -1 : 0;
  std::vector<double> above(size, 0.0);
  for (uint64_t a = 0; a < size; ++a) {
    uint64_t forced = 0, free = 0;
    for (int j = 0; j < m_; ++j) {
      const int p1 = ((j + shift) % m_ + m_) % m_;
      const int p2 = (p1 + 1) % m_;
      const uint64_t b1 = a >> p1 & 1, b2 = a >> p2 & 1;
      if (b1 == b2)
        forced |= b1 << j;
      else
        free |= uint64_t{1} << j;
    }
    double sum = 0;
    for (uint64_t sub = free;; sub = (sub - 1) & free) {
      sum += below[forced | sub];
      if (sub == 0) break;
    }
    const int forced_count = m_ - __builtin_popcountll(free);
    above[a] = sum * wall_pow[static_cast<size_t>(__builtin_popcountll(free))] * std::pow(same, forced_count);
  }
  return above;
}

std::vector<std::vector<double>> TransferMatrix::partition_rows(int l_max) const {
  if (l_max < 1) throw std::invalid_argument("partition function: depth must be >= 1");
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<size_t>(l_max));
  // Inputs fixed to |0> give a free bottom boundary.
  rows.emplace_back(size_t{1} << m_, 1.0);
  for (int t = 1; t < l_max; ++t) rows.push_back(step_up(rows.back(), t));
  return rows;
}

double TransferMatrix::partition_function(int l, uint64_t top) const {
  if (top >= (uint64_t{1} << m_)) throw std::invalid_argument("partition function: boundary has too many gates");
  return partition_rows(l).back()[top];
}

uint64_t TransferMatrix::error_gates(int l, const std::string& pauli) const {
  if (static_cast<int>(pauli.size()) != n_) throw std::invalid_argument("spin model: Pauli label length must equal n");
  for (char c : pauli)
    if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') throw std::invalid_argument("spin model: invalid Pauli label");
  uint64_t err = 0;
  for (int k = 0; k < m_; ++k) {
    const int a = (l % 2 == 1) ? 2 * k : 2 * k + 1;
    const int b = (a + 1) % n_;
    if (pauli[static_cast<size_t>(a)] != 'I' || pauli[static_cast<size_t>(b)] != 'I') err |= uint64_t{1} << k;
  }
  return err;
}

double TransferMatrix::boundary_sum(const std::vector<double>& row, uint64_t err) const {
  if (err == 0) throw std::invalid_argument("spin model: identity Pauli has no error boundary");
  // Each error gate contributes (4/15) Z(plus) - (1/15) Z(minus).
  const double wp = 4.0 / 15.0, wm = -1.0 / 15.0;
  const int k = __builtin_popcountll(err);
  double total = 0;
  for (uint64_t sub = err;; sub = (sub - 1) & err) {
    const int np = __builtin_popcountll(sub);
    total += std::pow(wp, np) * std::pow(wm, k - np) * row[sub];
    if (sub == 0) break;
  }
  return total;
}

double TransferMatrix::expected_overlap_sq(int l, const std::string& pauli) const {
  const uint64_t err = error_gates(l, pauli);
  return boundary_sum(partition_rows(l).back(), err);
}

std::vector<double> TransferMatrix::overlap_profile(int l_max, const std::string& pauli) const {
  const auto rows = partition_rows(l_max);
  std::vector<double> out;
  for (int l = 1; l <= l_max; ++l) out.push_back(boundary_sum(rows[static_cast<size_t>(l - 1)], error_gates(l, pauli)));
  return out;
}

double partition_function(int n, int l, const std::vector<Spin>& top) {
  TransferMatrix tm(n);
  if (static_cast<int>(top.size()) != tm.gates_per_layer())
    throw std::invalid_argument("partition function: boundary length must be n/2");
  uint64_t mask = 0;
  for (size_t k = 0; k < top.size(); ++k)
    if (top[k] == Spin::plus) mask |= uint64_t{1} << k;
  return tm.partition_function(l, mask);
}

double expected_overlap_sq(int n, int l, const std::string& pauli) {
  return TransferMatrix(n).expected_overlap_sq(l, pauli);
}

double expected_overlap_sq_1local(int n, int l) {
  std::string p(static_cast<size_t>(n), 'I');
  p[0] = 'X';
  return expected_overlap_sq(n, l, p);
}

double domain_wall_bound(int l) {
  if (l < 1) throw std::invalid_argument("domain_wall_bound: l must be >= 1");
  return std::pow(0.8, 2.0 * (l - 1));
}

double haar_limit(int n) { return 1.0 / (std::ldexp(1.0, n) + 1.0); }

double decay_bound(int n, int l) { return (4.0 / 15.0) * domain_wall_bound(l) + haar_limit(n); }

FirstOrder first_order_fidelity(int n, int d, double eps) {
  if (d < 0) throw std::invalid_argument("first_order_fidelity: d must be >= 0");
  if (!(eps >= 0 && eps < 1)) throw std::invalid_argument("first_order_fidelity: eps must lie in [0, 1)");
  FirstOrder r;
  r.F0 = std::pow(1 - eps, static_cast<double>(n) * d);
  if (d == 0 || eps == 0) {
    check_ring_size(n);
    return r;
  }
  std::string p(static_cast<size_t>(n), 'I');
  p[0] = 'X';
  const auto prof = TransferMatrix(n).overlap_profile(d, p);
  double sum = 0;
  for (double v : prof) sum += v;
  r.EF1 = n * eps * std::pow(1 - eps, static_cast<double>(n) * d - 1) * sum;
  return r;
}

double single_plus_limit(int n) {
  TransferMatrix tm(n);
  const auto rows = tm.partition_rows(200);
  const double z200 = rows[199][1], z190 = rows[189][1];
  if (std::abs(z200 - z190) >= 1e-12) {
    std::stringstream ss;
    ss << "spin model: Z(n=" << n << ", l) not converged by l=200 (|Z(200)-Z(190)| = " << std::abs(z200 - z190) << ")";
    throw std::runtime_error(ss.str());
  }
  return z200;
}

}  // namespace rcsbench::spin
