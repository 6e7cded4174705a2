#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "rcsbench/circuits.h"

namespace rcsbench {

struct DepthPoint {
  int depth = 0;
  double mean = 0;
  std::optional<double> stderr_;
  int L = 0;
  int M = 0;  // samples or trajectories per circuit (0 when exact)
  std::vector<double> per_circuit;
  std::vector<double> within_var;
};

struct DecayFit {
  double A = 0;
  double lambda = 0;
  double sigma_A = 0;
  double sigma_lambda = 0;
  double cov_A_lambda = 0;
  std::vector<double> residuals;  // mean - model, per fitted point
  double residual_norm = 0;       // weighted when weights were used
  int d_min = 0;
  int d_max = 0;
  int n_points = 0;
  int iterations = 0;
  bool weighted = false;
};

// Weighted Levenberg-Marquardt on residuals r(x) with Jacobian dr/dx.
struct LmResult {
  Eigen::VectorXd x;
  Eigen::MatrixXd jtj_inverse;
  double rss = 0;
  int iterations = 0;
  bool converged = false;
};

using ResidualFn = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd& jac)>;

LmResult levenberg_marquardt(const ResidualFn& fn, Eigen::VectorXd x0, int max_iterations = 200,
                             double rtol = 1e-10);

// F = A exp(-lambda d) on points with d_min <= depth <= d_max. Weights are
// 1/stderr^2 when every point has a positive stderr; otherwise the fit is
// unweighted and the covariance is scaled by the residual variance.
DecayFit fit_exponential(const std::vector<DepthPoint>& points, std::optional<int> d_min = std::nullopt,
                         std::optional<int> d_max = std::nullopt);

DepthPoint aggregate_depth(int depth, const std::vector<double>& values,
                           const std::vector<double>& within_circuit_vars = {}, int M = 0);

double sample_variance(const std::vector<double>& v);
double mean_of(const std::vector<double>& v);

// Cross-circuit variance minus the mean within-circuit variance.
double varc_unbiased(const std::vector<double>& values, const std::vector<double>& within_circuit_vars);

struct AlCovarianceResult {
  int n = 0;
  int d = 0;
  int L = 0;
  double mean_sum = 0;       // E sum_l A_l
  double var_sum = 0;        // Var(sum_l A_l)
  double var_fidelity = 0;   // (n eps)^2 (1-eps)^{2nd-2} Var(sum_l A_l)
  std::vector<double> per_circuit_sum;
};

// Monte-Carlo Var(sum_{l<=d} A_l) with A_l = (1/n) sum_i |<psi_{i,l}|psi>|^2
// and X errors. K error positions are sampled per layer (all n when K <= 0 or
// K >= n). All requested depths share the same circuits.
std::vector<AlCovarianceResult> al_covariance_profile(int n, const std::vector<int>& depths, double eps, int L,
                                                      int K, GateSet gate_set, uint64_t seed, int threads = 1);
AlCovarianceResult al_covariance(int n, int d, double eps, int L, int K, GateSet gate_set, uint64_t seed,
                                 int threads = 1);

}  // namespace rcsbench
