#include <gtest/gtest.h>

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

#include "rcsbench/density.h"
#include "rcsbench/noise.h"

using namespace rcsbench;

namespace {

CollapseTerm term(TermKind k, std::vector<int> support, double g, std::string pauli = "") {
  return CollapseTerm{k, std::move(support), g, std::move(pauli)};
}

// Independent tomography: push every |i><j| through the RK4 Lindblad solver,
// then project the Liouville matrix onto P_a (x) P_b^T.
CMatrix tomography_chi(const CollapseTerm& t) {
  const int k = static_cast<int>(t.support.size());
  const int d = 1 << k;
  CollapseTerm local = t;
  for (int i = 0; i < k; ++i) local.support[static_cast<size_t>(i)] = i;
  const NoiseModel m = make_model(k, {local});
  CMatrix S = CMatrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      DensityState r(k);
      r.at(static_cast<uint64_t>(i), static_cast<uint64_t>(j)) = 1;
      evolve_density(r, m, 1.0, LindbladIntegrator::rk4, 0.005);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) S(a * d + b, i * d + j) = r.at(static_cast<uint64_t>(a), static_cast<uint64_t>(b));
    }
  const int n4 = d * d;
  CMatrix chi(n4, n4);
  for (int a = 0; a < n4; ++a)
    for (int b = 0; b < n4; ++b) {
      const CMatrix basis = Eigen::kroneckerProduct(pauli_basis_element(k, a), pauli_basis_element(k, b).transpose());
      chi(a, b) = (basis.adjoint() * S).trace() / static_cast<double>(d * d);
    }
  return chi;
}

}  // namespace

TEST(Enr, TermValues) {
  EXPECT_DOUBLE_EQ(enr_of_term(term(TermKind::amplitude_decay, {0}, 0.1)), 0.05);
  EXPECT_DOUBLE_EQ(enr_of_term(term(TermKind::dephasing, {0}, 0.1)), 0.025);
  EXPECT_DOUBLE_EQ(enr_of_term(term(TermKind::corr_dephasing, {0, 1}, 0.16)), 0.03);
  EXPECT_DOUBLE_EQ(enr_of_term(term(TermKind::pauli_string, {0, 1}, 0.1, "XX")), 0.1);
}

TEST(Enr, TableModelsAtTwentyQubits) {
  const double g = 0.0025;
  std::vector<int> all(20);
  for (int q = 0; q < 20; ++q) all[static_cast<size_t>(q)] = q;
  const NoiseModel t1t2 = make_model(20, {term(TermKind::amplitude_decay, all, g), term(TermKind::dephasing, all, 2 * g)});
  EXPECT_NEAR(enr_of_model(t1t2), 0.05, 1e-15);
  std::vector<CollapseTerm> xs;
  for (int q = 0; q < 20; ++q) xs.push_back(term(TermKind::pauli_string, {q}, g, "X"));
  EXPECT_NEAR(enr_of_model(make_model(20, xs)), 0.05, 1e-15);
  for (const auto& name : {"t1t2", "pauli_x", "corr_xx", "weight_nm1"})
    EXPECT_NEAR(enr_of_model(*preset_model(name, 20, 0.05)), 0.05, 1e-14) << name;
  EXPECT_FALSE(preset_model("none", 20, 0.05).has_value());
}

TEST(Enr, ZeroRateAndAdditivity) {
  const NoiseModel z = make_model(3, {term(TermKind::pauli_string, {0}, 0.0, "X"), term(TermKind::dephasing, {1}, 0.0)});
  EXPECT_EQ(enr_of_model(z), 0.0);
  const NoiseModel m = make_model(3, {term(TermKind::pauli_string, {0, 2}, 0.03, "XZ"), term(TermKind::dephasing, {1}, 0.2),
                                      term(TermKind::corr_amplitude, {1, 2}, 0.1)});
  double sum = 0;
  for (const auto& t : m.terms) sum += enr_of_term(t);
  EXPECT_EQ(enr_of_model(m), sum);
}

TEST(Model, RejectsInvalidTerms) {
  EXPECT_THROW(make_model(2, {term(TermKind::dephasing, {2}, 0.1)}), std::invalid_argument);
  EXPECT_THROW(make_model(2, {term(TermKind::dephasing, {0}, -0.1)}), std::invalid_argument);
  EXPECT_THROW(make_model(2, {term(TermKind::corr_dephasing, {0, 0}, 0.1)}), std::invalid_argument);
  EXPECT_THROW(make_model(2, {term(TermKind::pauli_string, {0, 1}, 0.1, "X")}), std::invalid_argument);
  EXPECT_THROW(make_model(2, {}), std::invalid_argument);
}

TEST(ProcessMatrixTest, DephasingFirstOrder) {
  const auto chi = first_order_process_matrix(term(TermKind::dephasing, {0}, 0.08));
  const std::vector<double> want{1 - 0.02, 0, 0, 0.02};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) EXPECT_NEAR(std::abs(chi.chi(a, b) - Complex(a == b ? want[a] : 0)), 0, 1e-15);
}

TEST(ProcessMatrixTest, PauliStringIsDiagonalWithEnrGamma) {
  const auto chi = first_order_process_matrix(term(TermKind::pauli_string, {0}, 0.03, "X"));
  EXPECT_NEAR(chi.chi(0, 0).real(), 0.97, 1e-15);
  EXPECT_NEAR(chi.chi(1, 1).real(), 0.03, 1e-15);
  const auto chi3 = first_order_process_matrix(term(TermKind::pauli_string, {0, 1, 2}, 0.05, "XYZ"));
  EXPECT_NEAR(chi3.enr(), 0.05, 1e-15);
  EXPECT_EQ((chi3.chi - diagonalize_channel(chi3).chi).norm(), 0.0);
}

TEST(ProcessMatrixTest, AmplitudeDecaySymbolicExpansion) {
  // sigma = (X + iY)/2, sigma^dag sigma = (I - Z)/2.
  const double g = 1e-3;
  const auto chi = first_order_process_matrix(term(TermKind::amplitude_decay, {0}, g));
  CMatrix want = CMatrix::Zero(4, 4);
  want(0, 0) = 1 - g / 2;
  want(1, 1) = want(2, 2) = g / 4;
  want(1, 2) = Complex(0, -g / 4);
  want(2, 1) = Complex(0, g / 4);
  want(0, 3) = want(3, 0) = g / 4;
  EXPECT_LE((chi.chi - want).cwiseAbs().maxCoeff(), 1e-15);
  // Unit-time tomography agrees to second order.
  EXPECT_LE((tomography_chi(term(TermKind::amplitude_decay, {0}, g)) - want).cwiseAbs().maxCoeff(), 2 * g * g);
}

TEST(ProcessMatrixTest, FirstOrderMatchesTomographyForAllKinds) {
  const double g = 1e-3;
  for (const auto& t : {term(TermKind::dephasing, {0}, g), term(TermKind::pauli_string, {0, 1}, g, "YZ"),
                        term(TermKind::corr_amplitude, {0, 1}, g), term(TermKind::corr_dephasing, {0, 1, 2}, g)}) {
    EXPECT_LE((tomography_chi(t) - first_order_process_matrix(t).chi).cwiseAbs().maxCoeff(), 2 * g * g)
        << to_string(t.kind);
  }
}

TEST(ProcessMatrixTest, ExactMatrixIsChannel) {
  for (const auto& t : {term(TermKind::amplitude_decay, {0}, 0.3), term(TermKind::corr_dephasing, {0, 1}, 0.2)}) {
    const auto chi = exact_process_matrix(t);
    EXPECT_TRUE(chi.is_channel());
    EXPECT_NEAR(chi.trace(), 1.0, 1e-12);
    EXPECT_LE((tomography_chi(t) - chi.chi).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(ProcessMatrixTest, SupportCappedAtThree) {
  EXPECT_THROW(first_order_process_matrix(term(TermKind::pauli_string, {0, 1, 2, 3}, 0.1, "XXXX")),
               std::invalid_argument);
}

TEST(Diagonalize, IdempotentAndEnrPreserving) {
  const auto chi = exact_process_matrix(term(TermKind::amplitude_decay, {0, 1}, 0.1));
  const auto d1 = diagonalize_channel(chi), d2 = diagonalize_channel(d1);
  EXPECT_EQ((d1.chi - d2.chi).norm(), 0.0);
  EXPECT_EQ(d1.enr(), chi.enr());
  EXPECT_TRUE(d1.is_channel());
  for (int a = 0; a < 16; ++a)
    for (int b = 0; b < 16; ++b)
      if (a != b) EXPECT_EQ(d1.chi(a, b), Complex(0));
  const auto diag = ProcessMatrix::pauli_channel(1, {0.9, 0.05, 0.03, 0.02});
  EXPECT_EQ((diagonalize_channel(diag).chi - diag.chi).norm(), 0.0);
}

TEST(Presets, CorrelatedDephasingRates) {
  const NoiseModel m = correlated_dephasing_model(10, 0.01, 0.02, 0.02);
  EXPECT_NEAR(enr_of_model(m), 10 * (0.005 + 0.005 + 0.02), 1e-14);
}
