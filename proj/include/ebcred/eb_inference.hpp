#pragma once

#include <utility>
#include <vector>

#include "ebcred/sequence_model.hpp"

namespace ebcred {

/// Coordinatewise Gaussian posterior under the prior N(0, i^{-1-2 alpha}).
struct PosteriorSummary {
  double alpha = 0.0;
  Vector mean;
  Vector var;
};

struct EBFit {
  double alpha_hat = 0.0;
  double loglik_at_hat = 0.0;
  /// (alpha, l_n(alpha)) on the search grid, filled on request.
  std::vector<std::pair<double, double>> profile;
};

/// Search settings for the marginal-likelihood maximizer.
struct AlphaSearch {
  int grid_points = 513;
  double alpha_tol = 1e-6;
  bool keep_profile = false;
};

/// l_n(alpha) = -1/2 sum_i [log(1 + u_i) - n x_i^2 u_i / (1 + u_i)],
/// u_i = n / (i^{1+2 alpha} kappa_i^-2), summed over the truncation.
double log_marginal_likelihood(double alpha, const Observation& obs, const SequenceModel& model);
double log_marginal_likelihood(double alpha, const Observation& obs, const ModelConfig& cfg);

/// d l_n / d alpha.
double score(double alpha, const Observation& obs, const SequenceModel& model);
double score(double alpha, const Observation& obs, const ModelConfig& cfg);

/// Maximizer of l_n over [0, A]: uniform grid, then golden-section refinement.
/// Equal grid maxima resolve to the smallest alpha.
EBFit estimate_alpha(const Observation& obs, const SequenceModel& model, const AlphaSearch& search = {});
EBFit estimate_alpha(const Observation& obs, const ModelConfig& cfg, const AlphaSearch& search = {});

PosteriorSummary posterior(double alpha, const Observation& obs, const SequenceModel& model);
PosteriorSummary posterior(double alpha, const Observation& obs, const ModelConfig& cfg);

/// estimate_alpha followed by posterior at alpha_hat.
std::pair<EBFit, PosteriorSummary> empirical_bayes_posterior(const Observation& obs,
                                                             const SequenceModel& model,
                                                             const AlphaSearch& search = {});
std::pair<EBFit, PosteriorSummary> empirical_bayes_posterior(const Observation& obs,
                                                             const ModelConfig& cfg,
                                                             const AlphaSearch& search = {});

}  // namespace ebcred
