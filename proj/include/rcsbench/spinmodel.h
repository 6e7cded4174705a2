#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rcsbench::spin {

// Permutation label of a gate after Haar averaging: minus is the identity
// permutation (the spin of an error-free top gate), plus is the swap.
enum class Spin : uint8_t { minus = 0, plus = 1 };

// Local weights before summing tau: 1/15 when tau == sigma, -1/60 otherwise.
double weingarten_weight(Spin tau, Spin sigma);

// Weight of a lower gate's spin given the spins of the two gates above it.
double triangle_weight(Spin top_left, Spin top_right, Spin bottom);

constexpr int kMaxSpinQubits = 28;

// Gate-row configurations are bitmasks over the n/2 gates of a layer
// (bit k set means gate k carries plus). Layer t odd holds gates on (2k, 2k+1),
// layer t even holds gates on (2k+1, 2k+2 mod n).
class TransferMatrix {
 public:
  explicit TransferMatrix(int n);

  int n() const { return n_; }
  int gates_per_layer() const { return m_; }

  // Z(n, l; b) for every top configuration b of a depth-l lattice with a free
  // bottom boundary. Row index l-1 of the result.
  std::vector<std::vector<double>> partition_rows(int l_max) const;
  double partition_function(int l, uint64_t top) const;

  // Gates of layer l that touch a qubit in the Pauli's support.
  uint64_t error_gates(int l, const std::string& pauli) const;

  // E_C |<0|C^dag sigma C|0>|^2 over RQC(n, l) on a ring, exactly.
  double expected_overlap_sq(int l, const std::string& pauli) const;
  std::vector<double> overlap_profile(int l_max, const std::string& pauli) const;

 private:
  // u_above(a) = sum_s T(s | a) u_below(s); parity of the lower layer is t_below.
  std::vector<double> step_up(const std::vector<double>& below, int t_below) const;
  double boundary_sum(const std::vector<double>& row, uint64_t err) const;

  int n_;
  int m_;
};

void check_ring_size(int n);

double partition_function(int n, int l, const std::vector<Spin>& top);
double expected_overlap_sq(int n, int l, const std::string& pauli);
// Single-qubit X on qubit 0.
double expected_overlap_sq_1local(int n, int l);

double domain_wall_bound(int l);
double haar_limit(int n);
// (4/15)(4/5)^{2(l-1)} + 1/(2^n+1).
double decay_bound(int n, int l);

struct FirstOrder {
  double F0 = 1;
  double EF1 = 0;
};

// i.i.d. single-qubit X errors with probability eps after every layer.
FirstOrder first_order_fidelity(int n, int d, double eps);

// Z(n, l) for the single-plus boundary at large depth: value at l = 200 with
// |Z(200) - Z(190)| < 1e-12 checked.
double single_plus_limit(int n);

}  // namespace rcsbench::spin
