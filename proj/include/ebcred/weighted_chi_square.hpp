#pragma once

#include <vector>

#include <Eigen/Core>

#include "ebcred/rng.hpp"

namespace ebcred {

/// Distribution of Q = sum_i w_i Z_i^2 for nonnegative weights w and
/// independent standard normal Z.
///
/// The CDF is evaluated by inverting the characteristic function (Imhof's
/// formula)
///
///   P(Q <= y) = 1/2 - (1/pi) int_0^inf sin(theta(u)) / (u rho(u)) du,
///   theta(u) = 1/2 sum_i atan(w_i u) - y u / 2,
///   rho(u)   = prod_i (1 + w_i^2 u^2)^{1/4},
///
/// with composite Gauss-Legendre quadrature. The range is cut at the first U
/// with 1 / (pi s(U) rho(U)) below tolerance, s(U) = 1/2 sum_i z_i^2/(1+z_i^2),
/// z_i = w_i U, which bounds the neglected tail. At each node, terms with
/// w_i u < 0.1 or > 10 are summed through precomputed power sums, so only the
/// weights near 1/u are evaluated one by one.
class WeightedChiSquare {
 public:
  explicit WeightedChiSquare(const Eigen::Ref<const Eigen::VectorXd>& weights,
                             double cdf_tol = 1e-8);

  double mean() const { return mean_; }
  double variance() const { return variance_; }
  /// Upper end of the integration range, in units of 1 / max weight.
  double cutoff() const { return upper_; }

  double cdf(double y) const;

  /// Root of cdf(y) = prob, found by Brent iteration inside the Cantelli
  /// bracket [mean - k_lo sd, mean + k_hi sd].
  double quantile(double prob) const;

 private:
  static constexpr int kSeries = 5;

  double integral(double y) const;
  // theta(u) without the -y u / 2 term, and log rho(u).
  void phase_and_log_rho(double u, double& phase, double& log_rho) const;
  double phase_slope(double u, double y) const;

  double scale_ = 0.0;       // largest weight; the integrand uses lambda = w / scale
  Eigen::ArrayXd lambda_;    // descending
  // suffix_[k][j] = sum_{i >= j} lambda_i^(k+1), k = 0..9
  std::vector<std::vector<double>> suffix_;
  // prefix_[k][j] = sum_{i < j} lambda_i^-(k+1), k = 0..9, and prefix_log_[j] = sum_{i<j} log lambda_i
  std::vector<std::vector<double>> prefix_;
  std::vector<double> prefix_log_;
  double sum_lambda_ = 0.0;
  double upper_ = 0.0;
  bool capped_ = false;      // cut-off limited by cost, tail handled asymptotically
  double mean_ = 0.0;
  double variance_ = 0.0;
  double cdf_tol_;
};

/// Plain Monte Carlo quantile of sum_i w_i Z_i^2 from `draws` samples.
double monte_carlo_quantile(const Eigen::Ref<const Eigen::VectorXd>& weights, double prob,
                            long draws, Seed seed);

}  // namespace ebcred
