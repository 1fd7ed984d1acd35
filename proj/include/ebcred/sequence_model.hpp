#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Core>

#include "ebcred/rng.hpp"
#include "ebcred/truth_sequence.hpp"

namespace ebcred {

/// Singular values kappa_i of the forward operator.
///
/// power_law: kappa_i = i^-p exactly, certified envelope constant C (>= 1).
/// volterra:  kappa_i = 1 / ((i - 1/2) pi), certified with p = 1, C = pi.
class KappaSpec {
 public:
  enum class Kind { power_law, volterra };

  static KappaSpec power_law(double p, double C = 1.0);
  static KappaSpec volterra();

  Kind kind() const { return kind_; }
  double p() const { return p_; }
  /// Constant C of the envelope C^-2 i^-2p <= kappa_i^2 <= C^2 i^-2p.
  double envelope_constant() const { return C_; }

  /// kappa_i for i >= 1; DomainError for i = 0.
  double operator()(Index i) const;
  /// kappa_1, ..., kappa_count.
  Vector values(Index count) const;

  std::string name() const;

  bool operator==(const KappaSpec&) const = default;

 private:
  KappaSpec(Kind kind, double p, double C) : kind_(kind), p_(p), C_(C) {}

  Kind kind_ = Kind::power_law;
  double p_ = 0.0;
  double C_ = 1.0;
};

inline double make_kappa(const KappaSpec& spec, Index i) { return spec(i); }

/// Default series truncation: 10 effective dimensions n^{1/(1+2p)} (at least
/// 1000), the margin capped at 1e5 coordinates but never below n^{1/(1+2p)}.
Index default_truncation(double n, double p);

struct ModelConfig {
  double n = 1.0;
  KappaSpec kappa = KappaSpec::power_law(0.0);
  /// Upper end of the hyperparameter range [0, A].
  double A = 5.0;
  /// Credible sets have posterior mass 1 - gamma.
  double gamma = 0.05;
  /// Series truncation I_max; 0 selects default_truncation().
  Index trunc = 0;

  /// Copy with trunc resolved and all invariants checked (ConfigError).
  ModelConfig resolved() const;
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

/// A resolved ModelConfig together with per-coordinate quantities that every
/// likelihood, posterior and radius evaluation needs. Immutable and cheap to
/// share across threads.
class SequenceModel {
 public:
  explicit SequenceModel(const ModelConfig& cfg);

  const ModelConfig& config() const { return cfg_; }
  Index size() const { return cfg_.trunc; }
  double n() const { return cfg_.n; }

  const Vector& kappa() const { return kappa_; }
  /// log i for i = 1..I_max.
  const Eigen::ArrayXd& log_index() const { return log_i_; }

  /// u_i(alpha) = n / (i^{1+2 alpha} kappa_i^-2), the data-to-prior precision
  /// ratio of coordinate i. Every conjugate quantity is a rational function of it.
  Eigen::ArrayXd precision_ratio(double alpha) const;

  /// Posterior variances kappa_i^-2 / (i^{1+2 alpha} kappa_i^-2 + n); these are
  /// also the weights of the chi-square sum defining the credible radius.
  Eigen::ArrayXd posterior_variance(double alpha) const;

  const Eigen::ArrayXd& kappa_inv_sq() const { return kappa_inv_sq_; }

  /// Walks u_i(alpha) in blocks: body(offset, u) sees coordinates offset+1 ..
  /// offset+u.size(). After each block, stop(next_offset, last_u) may end the
  /// walk early. u_i is nonincreasing in i for every supported kappa, so last_u
  /// bounds every coordinate not yet visited.
  template <class Body, class Stop>
  void for_each_block(double alpha, Body&& body, Stop&& stop) const {
    constexpr Index kBlock = 2048;
    const double log_n = std::log(cfg_.n);
    const double slope = 1.0 + 2.0 * alpha;
    Eigen::ArrayXd u(kBlock);
    for (Index start = 0; start < size(); start += kBlock) {
      const Index len = std::min(kBlock, size() - start);
      u.head(len) = (log_n - slope * log_i_.segment(start, len) - log_kappa_inv_sq_.segment(start, len)).exp();
      body(start, u.head(len));
      if (start + len < size() && stop(start + len, u[len - 1])) return;
    }
  }

 private:
  ModelConfig cfg_;
  Vector kappa_;
  Eigen::ArrayXd log_i_;
  Eigen::ArrayXd log_kappa_inv_sq_;
  Eigen::ArrayXd kappa_inv_sq_;
};

struct Observation {
  Vector x;
  double n = 1.0;
  KappaSpec kappa = KappaSpec::power_law(0.0);
};

/// X_i = kappa_i theta_i + n^-1/2 Z_i, i = 1..I_max, Z from NormalStream(seed).
Observation synthesize(const TruthSequence& theta0, const SequenceModel& model, Seed seed);
Observation synthesize(const TruthSequence& theta0, const ModelConfig& cfg, Seed seed);

}  // namespace ebcred
