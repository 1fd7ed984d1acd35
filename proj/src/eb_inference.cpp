#include "ebcred/eb_inference.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ebcred/errors.hpp"
#include "ebcred/numeric.hpp"

namespace ebcred {

namespace {

void check_alpha(double alpha, const char* what) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    std::ostringstream os;
    os << what << ": alpha must be a finite nonnegative real (got " << alpha << ")";
    throw PreconditionError(os.str());
  }
}

void check_observation(const Observation& obs, const SequenceModel& model) {
  if (obs.x.size() != model.size())
    throw PreconditionError("observation length does not match the model truncation");
}

// Per-observation data shared by every alpha: n x_i^2 and the suffix sums
// sum_{j >= i} (1 + n x_j^2), which bound the terms not yet summed.
struct LikelihoodData {
  Eigen::ArrayXd nx2;
  Eigen::ArrayXd suffix;

  LikelihoodData(const Observation& obs, const SequenceModel& model) {
    check_observation(obs, model);
    nx2 = model.n() * obs.x.array().square();
    const Index size = nx2.size();
    suffix.resize(size + 1);
    suffix[size] = 0.0;
    for (Index i = size - 1; i >= 0; --i) suffix[i] = suffix[i + 1] + 1.0 + nx2[i];
  }
};

constexpr double kTailTol = 1e-13;
constexpr double kSeriesBelow = 1e-3;

// -2 l_n(alpha) = sum log(1 + u) - n x^2 u / (1 + u). Terms are bounded by
// u (1 + n x^2), so the walk stops once the unvisited ones sum below kTailTol.
double minus_two_loglik(double alpha, const SequenceModel& model, const LikelihoodData& data) {
  double total = 0.0;
  model.for_each_block(
      alpha,
      [&](Index offset, const auto& u) {
        const Index len = u.size();
        const auto nx2 = data.nx2.segment(offset, len);
        const Index head = std::partition_point(u.data(), u.data() + len, [](double v) { return v >= kSeriesBelow; }) -
                           u.data();
        if (head > 0) {
          const auto uh = u.head(head);
          total += (uh.log1p() - nx2.head(head) * uh / (1.0 + uh)).sum();
        }
        if (head < len) {
          // sum_k (-1)^{k+1} u^k (1/k - n x^2), truncated after u^6
          const auto ut = u.tail(len - head);
          const auto t = nx2.tail(len - head);
          Eigen::ArrayXd acc = 1.0 / 6.0 - t;
          acc = (1.0 / 5.0 - t) - ut * acc;
          acc = (1.0 / 4.0 - t) - ut * acc;
          acc = (1.0 / 3.0 - t) - ut * acc;
          acc = (1.0 / 2.0 - t) - ut * acc;
          acc = (1.0 - t) - ut * acc;
          total += (ut * acc).sum();
        }
      },
      [&](Index next, double last_u) { return last_u * data.suffix[next] < kTailTol; });
  return total;
}

double loglik(double alpha, const SequenceModel& model, const LikelihoodData& data) {
  const double value = -0.5 * minus_two_loglik(alpha, model, data);
  if (!std::isfinite(value)) throw NumericalError("log marginal likelihood is not finite");
  return value;
}

}  // namespace

double log_marginal_likelihood(double alpha, const Observation& obs, const SequenceModel& model) {
  check_alpha(alpha, "log_marginal_likelihood");
  return loglik(alpha, model, LikelihoodData(obs, model));
}

double score(double alpha, const Observation& obs, const SequenceModel& model) {
  check_alpha(alpha, "score");
  const LikelihoodData data(obs, model);
  const Eigen::ArrayXd& log_i = model.log_index();
  const double log_max = log_i[log_i.size() - 1];
  double total = 0.0;
  model.for_each_block(
      alpha,
      [&](Index offset, const auto& u) {
        const Index len = u.size();
        const auto shrink = u / (1.0 + u);
        total += (log_i.segment(offset, len) * shrink * (1.0 - data.nx2.segment(offset, len) / (1.0 + u))).sum();
      },
      [&](Index next, double last_u) { return log_max * last_u * data.suffix[next] < kTailTol; });
  return total;
}

EBFit estimate_alpha(const Observation& obs, const SequenceModel& model, const AlphaSearch& search) {
  const LikelihoodData data(obs, model);
  EBFit fit;
  auto objective = [&](double alpha) {
    const double value = loglik(alpha, model, data);
    if (search.keep_profile) fit.profile.emplace_back(alpha, value);
    return value;
  };
  const auto best = numeric::maximize_on_grid(objective, 0.0, model.config().A, search.grid_points,
                                              search.alpha_tol);
  if (search.keep_profile) fit.profile.resize(static_cast<std::size_t>(search.grid_points));
  fit.alpha_hat = best.arg;
  fit.loglik_at_hat = best.value;
  return fit;
}

PosteriorSummary posterior(double alpha, const Observation& obs, const SequenceModel& model) {
  check_alpha(alpha, "posterior");
  check_observation(obs, model);
  const Eigen::ArrayXd u = model.precision_ratio(alpha);
  const Eigen::ArrayXd shrink = u / (1.0 + u);
  PosteriorSummary post;
  post.alpha = alpha;
  post.mean = (shrink * obs.x.array() / model.kappa().array()).matrix();
  post.var = model.posterior_variance(alpha).matrix();
  return post;
}

std::pair<EBFit, PosteriorSummary> empirical_bayes_posterior(const Observation& obs,
                                                             const SequenceModel& model,
                                                             const AlphaSearch& search) {
  EBFit fit = estimate_alpha(obs, model, search);
  PosteriorSummary post = posterior(fit.alpha_hat, obs, model);
  return {std::move(fit), std::move(post)};
}

double log_marginal_likelihood(double alpha, const Observation& obs, const ModelConfig& cfg) {
  return log_marginal_likelihood(alpha, obs, SequenceModel(cfg));
}
double score(double alpha, const Observation& obs, const ModelConfig& cfg) {
  return score(alpha, obs, SequenceModel(cfg));
}
EBFit estimate_alpha(const Observation& obs, const ModelConfig& cfg, const AlphaSearch& search) {
  return estimate_alpha(obs, SequenceModel(cfg), search);
}
PosteriorSummary posterior(double alpha, const Observation& obs, const ModelConfig& cfg) {
  return posterior(alpha, obs, SequenceModel(cfg));
}
std::pair<EBFit, PosteriorSummary> empirical_bayes_posterior(const Observation& obs,
                                                             const ModelConfig& cfg,
                                                             const AlphaSearch& search) {
  return empirical_bayes_posterior(obs, SequenceModel(cfg), search);
}

}  // namespace ebcred
