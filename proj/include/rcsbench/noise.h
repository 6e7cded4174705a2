#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rcsbench/circuits.h"
#include "rcsbench/pauli.h"
#include "rcsbench/types.h"

namespace rcsbench {

enum class TermKind { amplitude_decay, dephasing, pauli_string, corr_amplitude, corr_dephasing };

std::string to_string(TermKind k);
TermKind parse_term_kind(const std::string& s);

// gamma * D[J] with J built from sigma = |0><1| (amplitude), |1><1|
// (dephasing), a Pauli label over the support, or products across the support.
struct CollapseTerm {
  TermKind kind = TermKind::pauli_string;
  std::vector<int> support;
  double gamma = 0.0;
  std::string pauli;  // pauli_string only; one character per support qubit

  MonomialOp op(int n) const;
  // Dense J on the support (support order, first qubit most significant).
  CMatrix local_matrix() const;
};

struct NoiseModel {
  int n = 0;
  std::vector<CollapseTerm> terms;
  std::string name;
};

// Splits multi-qubit amplitude_decay/dephasing terms into one term per qubit
// and checks every term. Throws std::invalid_argument on failure.
NoiseModel make_model(int n, std::vector<CollapseTerm> terms, std::string name = "");
void validate_model(const NoiseModel& model);

double enr_of_term(const CollapseTerm& term);
double enr_of_model(const NoiseModel& model);

// Process matrix over the k-qubit Pauli basis; index digits are I=0 X=1 Y=2 Z=3
// with the first support qubit as the most significant digit.
struct ProcessMatrix {
  int k = 1;
  CMatrix chi;

  static ProcessMatrix identity(int k);
  static ProcessMatrix pauli_channel(int k, const std::vector<double>& probs);
  double enr() const;
  double trace() const;
  // Hermitian, PSD and trace preserving within tol.
  bool is_channel(double tol = 1e-10) const;
  double min_eigenvalue() const;
};

CMatrix pauli_basis_element(int k, int alpha);
std::string pauli_basis_label(int k, int alpha);

ProcessMatrix first_order_process_matrix(const CollapseTerm& term);
// Channel tomography of the exact evolution exp(t * gamma D[J]) on the support.
ProcessMatrix exact_process_matrix(const CollapseTerm& term, double t = 1.0);
ProcessMatrix process_matrix_from_superop(int k, const CMatrix& superop);
// Row-major Liouville matrix sum chi_ab sigma_a (x) sigma_b^T.
CMatrix superop_from_process_matrix(const ProcessMatrix& chi);
ProcessMatrix diagonalize_channel(const ProcessMatrix& chi);

// Presets keyed by the Table I rows, with rates chosen so the model ENR is lambda_true.
// Names: none, t1t2, pauli_x, corr_xx, weight_nm1.
std::optional<NoiseModel> preset_model(const std::string& name, int n, double lambda_true,
                                       Boundary boundary = Boundary::ring);
std::vector<std::string> preset_model_names();

// gamma1 D(sigma_i) + gamma2 D(sigma_i^dag sigma_i) + gamma3 D(Z_i Z_{i+1}) on a ring.
NoiseModel correlated_dephasing_model(int n, double gamma1, double gamma2, double gamma3);

// Single-qubit i.i.d. Pauli channel with error probability eps (X flips).
ProcessMatrix bit_flip_channel(double eps);

}  // namespace rcsbench
