#pragma once

#include <vector>

#include "ebcred/sequence_model.hpp"
#include "ebcred/truth_sequence.hpp"

namespace ebcred {

/// h_n(alpha; theta0) as a callable, prepared once for a truth and model.
///
///   h_n(alpha) = (1+2a+2p) / (n^{1/(1+2a+2p)} log n)
///                * sum_i n^2 i^{1+2a} (log i) theta_i^2 / (i^{1+2a+2p} + n)^2
///
/// The sum runs over the stored coefficients; tail_bound() bounds the rest.
class HFunction {
 public:
  HFunction(const TruthSequence& theta0, const ModelConfig& cfg);

  double operator()(double alpha) const;
  /// Upper bound on the contribution of coordinates beyond the stored ones.
  double tail_bound(double alpha) const;

 private:
  double prefactor(double alpha) const;

  double n_;
  double p_;
  Eigen::ArrayXd log_i_;     // nonzero coordinates only
  Eigen::ArrayXd weight_;    // n i^{-2p} log(i) theta_i^2
  Eigen::ArrayXd suffix_;    // suffix sums of weight_
  Index stored_ = 0;
  double tail_amplitude_ = 0.0;
  double tail_exponent_ = 1.0;
};

double h_n(double alpha, const TruthSequence& theta0, const ModelConfig& cfg);

struct AlphaBounds {
  double lower = 0.0;
  double upper = 0.0;
  /// The defining sets were empty (lower falls back to A, upper to 0).
  bool lower_empty = false;
  bool upper_empty = false;
  double lower_threshold = 0.0;  // 1 / (16 C^8)
  double upper_threshold = 0.0;  // 8 C^8
};

/// lower = inf{alpha in [0,A]: h_n >= 1/(16 C^8)}, upper = sup{alpha in [0,A]: h_n <= 8 C^8},
/// from a uniform scan refined by bisection on the bracketing cell.
AlphaBounds alpha_bounds(const TruthSequence& theta0, const ModelConfig& cfg, int scan_points = 2001);

struct BiasVariance {
  double bias_sq = 0.0;
  double var_sq = 0.0;
};

/// Squared bias ||E theta_hat_alpha - theta0||^2 and E||theta_hat_alpha - E theta_hat_alpha||^2
/// of the posterior mean, over the model truncation.
BiasVariance bias_variance(double alpha, const TruthSequence& theta0, const SequenceModel& model);
BiasVariance bias_variance(double alpha, const TruthSequence& theta0, const ModelConfig& cfg);

struct OracleRisk {
  double risk = 0.0;
  double alpha = 0.0;
};

/// min over alpha in [0,A] of bias_sq + var_sq (smallest minimizer on ties).
OracleRisk oracle_risk(const TruthSequence& theta0, const SequenceModel& model, int grid_points = 2001);
OracleRisk oracle_risk(const TruthSequence& theta0, const ModelConfig& cfg, int grid_points = 2001);

struct MinimaxRisk {
  double risk = 0.0;
  /// Bound on the omitted coordinates beyond the truncation.
  double tail_bound = 0.0;
};

/// sum_i M_i s_i^2 / (M_i + s_i^2), M_i = M i^{-1-2 beta}, s_i^2 = kappa_i^-2 / n.
MinimaxRisk minimax_linear_risk(double beta, double M, const SequenceModel& model);
MinimaxRisk minimax_linear_risk(double beta, double M, const ModelConfig& cfg);

struct DiagnosticsReport {
  std::vector<double> alpha_grid;
  std::vector<double> h;
  std::vector<double> bias_sq;
  std::vector<double> var_sq;
  double alpha_lower = 0.0;
  double alpha_upper = 0.0;
  bool lower_empty = false;
  bool upper_empty = false;
  double lower_threshold = 0.0;
  double upper_threshold = 0.0;
  /// The bounds cover all of [0, A] and carry no information.
  bool bounds_vacuous = false;
  double h_tail_bound = 0.0;  // max over the grid
  double oracle_risk = 0.0;
  double oracle_alpha = 0.0;
  double minimax_beta = 0.0;
  double minimax_M = 0.0;
  double minimax_linear = 0.0;

  bool operator==(const DiagnosticsReport&) const = default;
};

DiagnosticsReport diagnose(const TruthSequence& theta0, const SequenceModel& model, double beta, double M,
                           int grid_points = 2001);

}  // namespace ebcred
