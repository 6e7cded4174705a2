#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rcsbench/circuits.h"
#include "rcsbench/pauli.h"
#include "rcsbench/rng.h"
#include "rcsbench/statevec.h"

namespace rcsbench {

enum class EstimatorKind { F, uXEB, XEB, logXEB, HOG, DFE, sRB };

std::string to_string(EstimatorKind k);
EstimatorKind parse_estimator_kind(const std::string& s);

struct EstimatorValue {
  EstimatorKind kind = EstimatorKind::F;
  double value = 0;
  std::optional<double> stderr_;
};

struct IdealDistribution {
  int n = 0;
  std::vector<double> probs;
  double sum_p_sq = 0;

  static IdealDistribution from_state(const PureState& state);
  static IdealDistribution from_probs(int n, std::vector<double> probs);
  double dim() const { return static_cast<double>(probs.size()); }
};

constexpr double kEulerGamma = 0.57721566490153286061;

EstimatorValue xeb_samples(std::span<const uint64_t> samples, const IdealDistribution& ideal);
EstimatorValue uxeb_samples(std::span<const uint64_t> samples, const IdealDistribution& ideal);

EstimatorValue logxeb_samples(std::span<const uint64_t> samples, const IdealDistribution& ideal);
EstimatorValue hog_samples(std::span<const uint64_t> samples, const IdealDistribution& ideal);

// Sums that are linear in the noisy distribution q, so trajectory averages of
// these give the full-distribution estimators of the averaged q.
struct LinearSums {
  double q_total = 0;  // sum_x q(x)
  double pq = 0;       // sum_x p(x) q(x)
  double q_logp = 0;   // sum_x q(x) log p(x)
  double q_heavy = 0;  // sum_x q(x) 1[p(x) >= ln2 / D]

  void add_scaled(const LinearSums& o, double w);
};

// q given as nonnegative weights (e.g. |amplitude|^2 of an unnormalized state);
// normalized by its sum.
LinearSums linear_sums(std::span<const double> q, const IdealDistribution& ideal, bool need_log = true);
LinearSums linear_sums_from_amplitudes(const CVec& amps, const IdealDistribution& ideal, bool need_log = true);

double uxeb_from_sums(const LinearSums& s, const IdealDistribution& ideal);
double xeb_from_sums(const LinearSums& s, const IdealDistribution& ideal);
double logxeb_from_sums(const LinearSums& s, const IdealDistribution& ideal);
double hog_from_sums(const LinearSums& s, const IdealDistribution& ideal);

EstimatorValue uxeb_full(std::span<const double> q, const IdealDistribution& ideal);
EstimatorValue xeb_full(std::span<const double> q, const IdealDistribution& ideal);
EstimatorValue logxeb_full(std::span<const double> q, const IdealDistribution& ideal);
EstimatorValue hog_full(std::span<const double> q, const IdealDistribution& ideal);

constexpr int kMaxDfeQubits = 8;

// <psi|sigma_alpha|psi> for all 4^n Paulis, indexed by (x_mask << n) | z_mask.
std::vector<double> pauli_expectations_all(const PureState& psi);
PauliString pauli_from_index(int n, uint64_t index);

// Noisy expectation tr(sigma rho) for a Pauli label.
using PauliExpectation = std::function<double(const PauliString&)>;

// Direct fidelity estimation: draws K Paulis with probability gamma_alpha^2
// and averages gamma'_alpha / gamma_alpha. With shots_per_pauli > 0 the noisy
// expectation is replaced by a +-1 shot average.
EstimatorValue dfe(const PureState& ideal, const PauliExpectation& noisy, size_t K, size_t shots_per_pauli,
                   Rng& rng);

// F_sRB = prod_i (1 - e_i).
EstimatorValue srb_estimate(std::span<const double> error_rates);

using PairKey = std::pair<int, int>;  // (min, max) qubit indices
PairKey pair_key(int a, int b);
// Product over the circuit's two-qubit gates of (1 - e) looked up by pair.
EstimatorValue srb_estimate(const std::map<PairKey, double>& error_rates, const Circuit& circuit);

}  // namespace rcsbench
