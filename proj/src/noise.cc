#include "rcsbench/noise.h"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

#include "rcsbench/density.h"

namespace rcsbench {
namespace {

constexpr const char kPauliChars[4] = {'I', 'X', 'Y', 'Z'};

uint64_t support_bits(int n, const std::vector<int>& support) {
  uint64_t m = 0;
  for (int q : support) m |= uint64_t{1} << qubit_bit(n, q);
  return m;
}

std::vector<int> local_support(size_t k) {
  std::vector<int> s(k);
  for (size_t i = 0; i < k; ++i) s[i] = static_cast<int>(i);
  return s;
}

}  // namespace

std::string to_string(TermKind k) {
  switch (k) {
    case TermKind::amplitude_decay: return "amplitude_decay";
    case TermKind::dephasing: return "dephasing";
    case TermKind::pauli_string: return "pauli_string";
    case TermKind::corr_amplitude: return "corr_amplitude";
    case TermKind::corr_dephasing: return "corr_dephasing";
  }
  return "?";
}

TermKind parse_term_kind(const std::string& s) {
  if (s == "amplitude_decay") return TermKind::amplitude_decay;
  if (s == "dephasing") return TermKind::dephasing;
  if (s == "pauli_string") return TermKind::pauli_string;
  if (s == "corr_amplitude") return TermKind::corr_amplitude;
  if (s == "corr_dephasing") return TermKind::corr_dephasing;
  throw std::invalid_argument("unknown collapse term kind '" + s + "'");
}

MonomialOp CollapseTerm::op(int n) const {
  MonomialOp m;
  const uint64_t bits = support_bits(n, support);
  switch (kind) {
    case TermKind::amplitude_decay:
    case TermKind::corr_amplitude:
      m.need = bits;
      m.flip = bits;
      break;
    case TermKind::dephasing:
    case TermKind::corr_dephasing:
      m.need = bits;
      break;
    case TermKind::pauli_string: {
      std::string full(static_cast<size_t>(n), 'I');
      for (size_t i = 0; i < support.size(); ++i) full[static_cast<size_t>(support[i])] = pauli[i];
      m = MonomialOp::from_pauli(PauliString::parse(full));
      break;
    }
  }
  return m;
}

CMatrix CollapseTerm::local_matrix() const {
  const int k = static_cast<int>(support.size());
  CollapseTerm local = *this;
  local.support = local_support(support.size());
  const MonomialOp m = local.op(k);
  const Eigen::Index dim = Eigen::Index{1} << k;
  CMatrix j = CMatrix::Zero(dim, dim);
  for (uint64_t x = 0; x < static_cast<uint64_t>(dim); ++x)
    if (m.acts_on(x)) j(static_cast<Eigen::Index>(x ^ m.flip), static_cast<Eigen::Index>(x)) = m.phase(x);
  return j;
}

void validate_model(const NoiseModel& model) {
  if (model.n < 1 || model.n > 63) throw std::invalid_argument("noise model: n out of range");
  if (model.terms.empty()) throw std::invalid_argument("noise model: at least one term required");
  for (size_t i = 0; i < model.terms.size(); ++i) {
    const auto& t = model.terms[i];
    std::stringstream where;
    where << "noise model term " << i << " (" << to_string(t.kind) << "): ";
    if (!(t.gamma >= 0) || !std::isfinite(t.gamma))
      throw std::invalid_argument(where.str() + "rate must be finite and >= 0");
    if (t.support.empty()) throw std::invalid_argument(where.str() + "empty support");
    std::set<int> seen;
    for (int q : t.support) {
      if (q < 0 || q >= model.n) throw std::invalid_argument(where.str() + "support index out of range");
      if (!seen.insert(q).second) throw std::invalid_argument(where.str() + "repeated support index");
    }
    switch (t.kind) {
      case TermKind::amplitude_decay:
      case TermKind::dephasing:
        if (t.support.size() != 1) throw std::invalid_argument(where.str() + "expected one qubit");
        break;
      case TermKind::corr_amplitude:
      case TermKind::corr_dephasing:
        if (t.support.size() < 2) throw std::invalid_argument(where.str() + "needs at least two qubits");
        break;
      case TermKind::pauli_string:
        if (t.pauli.size() != t.support.size())
          throw std::invalid_argument(where.str() + "label length must equal support size");
        for (char c : t.pauli)
          if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z')
            throw std::invalid_argument(where.str() + "invalid Pauli label");
        break;
    }
  }
}

NoiseModel make_model(int n, std::vector<CollapseTerm> terms, std::string name) {
  NoiseModel m;
  m.n = n;
  m.name = std::move(name);
  for (auto& t : terms) {
    const bool per_qubit = t.kind == TermKind::amplitude_decay || t.kind == TermKind::dephasing;
    if (per_qubit && t.support.size() > 1) {
      for (int q : t.support) m.terms.push_back(CollapseTerm{t.kind, {q}, t.gamma, ""});
    } else {
      m.terms.push_back(std::move(t));
    }
  }
  validate_model(m);
  return m;
}

double enr_of_term(const CollapseTerm& term) {
  // First-order ENR: gamma * sum_{alpha != 0} |j_alpha|^2 with J = sum_alpha j_alpha sigma_alpha,
  // i.e. gamma * (tr(J^dag J)/2^k - |tr J / 2^k|^2).
  if (term.kind == TermKind::pauli_string) {
    for (char c : term.pauli)
      if (c != 'I') return term.gamma;
    return 0.0;
  }
  const int k = static_cast<int>(term.support.size());
  const double d = std::ldexp(1.0, k);
  // Monomial J: tr(J^dag J) counts acted-on basis states; tr J only has
  // diagonal contributions when nothing is flipped.
  CollapseTerm local = term;
  local.support = local_support(term.support.size());
  const MonomialOp m = local.op(k);
  double tr_jdj = 0;
  Complex tr_j = 0;
  for (uint64_t x = 0; x < (uint64_t{1} << k); ++x) {
    if (!m.acts_on(x)) continue;
    tr_jdj += 1.0;
    if (m.flip == 0) tr_j += m.phase(x);
  }
  return term.gamma * (tr_jdj / d - std::norm(tr_j / d));
}

double enr_of_model(const NoiseModel& model) {
  double total = 0;
  for (const auto& t : model.terms) total += enr_of_term(t);
  return total;
}

CMatrix pauli_basis_element(int k, int alpha) {
  CMatrix m = CMatrix::Identity(1, 1);
  for (int q = 0; q < k; ++q) {
    const int digit = (alpha >> (2 * (k - 1 - q))) & 3;
    const CMatrix p = pauli_matrix(kPauliChars[digit]);
    CMatrix next(m.rows() * 2, m.cols() * 2);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) next.block(2 * r, 2 * c, 2, 2) = m(r, c) * p;
    m = next;
  }
  return m;
}

std::string pauli_basis_label(int k, int alpha) {
  std::string s;
  for (int q = 0; q < k; ++q) s += kPauliChars[(alpha >> (2 * (k - 1 - q))) & 3];
  return s;
}

ProcessMatrix ProcessMatrix::identity(int k) {
  ProcessMatrix p;
  p.k = k;
  const Eigen::Index dim = Eigen::Index{1} << (2 * k);
  p.chi = CMatrix::Zero(dim, dim);
  p.chi(0, 0) = 1;
  return p;
}

ProcessMatrix ProcessMatrix::pauli_channel(int k, const std::vector<double>& probs) {
  ProcessMatrix p;
  p.k = k;
  const Eigen::Index dim = Eigen::Index{1} << (2 * k);
  if (static_cast<Eigen::Index>(probs.size()) != dim)
    throw std::invalid_argument("pauli_channel: need 4^k probabilities");
  p.chi = CMatrix::Zero(dim, dim);
  for (Eigen::Index a = 0; a < dim; ++a) p.chi(a, a) = probs[static_cast<size_t>(a)];
  return p;
}

double ProcessMatrix::enr() const {
  double s = 0;
  for (Eigen::Index a = 1; a < chi.rows(); ++a) s += chi(a, a).real();
  return s;
}

double ProcessMatrix::trace() const { return chi.trace().real(); }

double ProcessMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (chi + chi.adjoint()));
  return es.eigenvalues().minCoeff();
}

bool ProcessMatrix::is_channel(double tol) const {
  const Eigen::Index dim = Eigen::Index{1} << (2 * k);
  if (chi.rows() != dim || chi.cols() != dim) return false;
  if ((chi - chi.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  if (min_eigenvalue() < -tol) return false;
  // Trace preservation: sum_ab chi_ab sigma_b sigma_a = I.
  const Eigen::Index d = Eigen::Index{1} << k;
  CMatrix acc = CMatrix::Zero(d, d);
  for (Eigen::Index a = 0; a < dim; ++a)
    for (Eigen::Index b = 0; b < dim; ++b)
      if (chi(a, b) != Complex(0, 0))
        acc += chi(a, b) * pauli_basis_element(k, static_cast<int>(b)) *
               pauli_basis_element(k, static_cast<int>(a));
  return (acc - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff() <= tol;
}

ProcessMatrix first_order_process_matrix(const CollapseTerm& term) {
  const int k = static_cast<int>(term.support.size());
  if (k < 1 || k > 3) throw std::invalid_argument("first_order_process_matrix: support must be 1..3 qubits");
  const CMatrix j = term.local_matrix();
  const CMatrix jdj = j.adjoint() * j;
  const Eigen::Index dim = Eigen::Index{1} << (2 * k);
  const double d = std::ldexp(1.0, k);
  Eigen::VectorXcd jv(dim), cv(dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    const CMatrix s = pauli_basis_element(k, static_cast<int>(a));
    jv(a) = (s * j).trace() / d;
    cv(a) = (s * jdj).trace() / d;
  }
  ProcessMatrix p = ProcessMatrix::identity(k);
  p.chi += term.gamma * (jv * jv.adjoint());
  for (Eigen::Index a = 0; a < dim; ++a) {
    p.chi(a, 0) -= 0.5 * term.gamma * cv(a);
    p.chi(0, a) -= 0.5 * term.gamma * std::conj(cv(a));
  }
  return p;
}

ProcessMatrix process_matrix_from_superop(int k, const CMatrix& s) {
  const Eigen::Index dim = Eigen::Index{1} << (2 * k);
  if (s.rows() != dim || s.cols() != dim) throw std::invalid_argument("superoperator dimension mismatch");
  std::vector<CMatrix> basis;
  for (Eigen::Index a = 0; a < dim; ++a) basis.push_back(pauli_basis_element(k, static_cast<int>(a)));
  ProcessMatrix p;
  p.k = k;
  p.chi = CMatrix::Zero(dim, dim);
  const double norm = static_cast<double>(dim);  // tr(P_a^dag P_a)^2 = 4^k
  for (Eigen::Index a = 0; a < dim; ++a)
    for (Eigen::Index b = 0; b < dim; ++b) {
      // <sigma_a (x) sigma_b^T, S>_HS / d^2 using the row-major vec convention.
      const CMatrix kron = Eigen::kroneckerProduct(basis[static_cast<size_t>(a)], basis[static_cast<size_t>(b)].transpose());
      p.chi(a, b) = (kron.adjoint() * s).trace() / norm;
    }
  return p;
}

CMatrix superop_from_process_matrix(const ProcessMatrix& p) {
  const Eigen::Index dim = Eigen::Index{1} << (2 * p.k);
  CMatrix s = CMatrix::Zero(dim, dim);
  for (Eigen::Index a = 0; a < dim; ++a)
    for (Eigen::Index b = 0; b < dim; ++b) {
      if (p.chi(a, b) == Complex(0, 0)) continue;
      s += p.chi(a, b) * Eigen::kroneckerProduct(pauli_basis_element(p.k, static_cast<int>(a)),
                                                 pauli_basis_element(p.k, static_cast<int>(b)).transpose())
                             .eval();
    }
  return s;
}

ProcessMatrix exact_process_matrix(const CollapseTerm& term, double t) {
  const int k = static_cast<int>(term.support.size());
  if (k < 1 || k > 3) throw std::invalid_argument("exact_process_matrix: support must be 1..3 qubits");
  CollapseTerm local = term;
  local.support = local_support(term.support.size());
  const NoiseModel model = make_model(k, {local});
  const Eigen::Index d = Eigen::Index{1} << k;
  CMatrix s(d * d, d * d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b) {
      DensityState rho(k);
      rho.at(static_cast<uint64_t>(a), static_cast<uint64_t>(b)) = 1;
      evolve_density(rho, model, t, LindbladIntegrator::rk4);
      for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
          s(i * d + j, a * d + b) = rho.at(static_cast<uint64_t>(i), static_cast<uint64_t>(j));
    }
  return process_matrix_from_superop(k, s);
}

ProcessMatrix diagonalize_channel(const ProcessMatrix& chi) {
  ProcessMatrix out = chi;
  out.chi = CMatrix::Zero(chi.chi.rows(), chi.chi.cols());
  for (Eigen::Index a = 0; a < chi.chi.rows(); ++a) out.chi(a, a) = chi.chi(a, a).real();
  return out;
}

ProcessMatrix bit_flip_channel(double eps) { return ProcessMatrix::pauli_channel(1, {1 - eps, eps, 0, 0}); }

std::vector<std::string> preset_model_names() { return {"none", "t1t2", "pauli_x", "corr_xx", "weight_nm1"}; }

std::optional<NoiseModel> preset_model(const std::string& name, int n, double lambda_true, Boundary boundary) {
  if (n < 2) throw std::invalid_argument("noise preset: n must be >= 2");
  if (name == "none") return std::nullopt;
  std::vector<CollapseTerm> terms;
  if (name == "t1t2") {
    // gamma D[sigma] + 2 gamma D[sigma^dag sigma] has ENR gamma per qubit.
    const double g = lambda_true / n;
    for (int q = 0; q < n; ++q) {
      terms.push_back({TermKind::amplitude_decay, {q}, g, ""});
      terms.push_back({TermKind::dephasing, {q}, 2 * g, ""});
    }
  } else if (name == "pauli_x") {
    const double g = lambda_true / n;
    for (int q = 0; q < n; ++q) terms.push_back({TermKind::pauli_string, {q}, g, "X"});
  } else if (name == "corr_xx") {
    std::vector<std::pair<int, int>> pairs;
    for (int q = 0; q + 1 < n; ++q) pairs.emplace_back(q, q + 1);
    if (boundary == Boundary::ring && n > 2) pairs.emplace_back(n - 1, 0);
    const double g = lambda_true / static_cast<double>(pairs.size());
    for (auto [a, b] : pairs) terms.push_back({TermKind::pauli_string, {a, b}, g, "XX"});
  } else if (name == "weight_nm1") {
    const double g = lambda_true / n;
    for (int skip = 0; skip < n; ++skip) {
      CollapseTerm t{TermKind::pauli_string, {}, g, ""};
      for (int q = 0; q < n; ++q)
        if (q != skip) {
          t.support.push_back(q);
          t.pauli += 'X';
        }
      terms.push_back(std::move(t));
    }
  } else {
    throw std::invalid_argument("unknown noise preset '" + name + "'");
  }
  return make_model(n, std::move(terms), name);
}

NoiseModel correlated_dephasing_model(int n, double gamma1, double gamma2, double gamma3) {
  if (n < 3) throw std::invalid_argument("correlated dephasing model needs a ring of n >= 3");
  std::vector<CollapseTerm> terms;
  for (int q = 0; q < n; ++q) {
    terms.push_back({TermKind::amplitude_decay, {q}, gamma1, ""});
    terms.push_back({TermKind::dephasing, {q}, gamma2, ""});
  }
  for (int q = 0; q < n; ++q) terms.push_back({TermKind::pauli_string, {q, (q + 1) % n}, gamma3, "ZZ"});
  return make_model(n, std::move(terms), "virtual_zz");
}

}  // namespace rcsbench
