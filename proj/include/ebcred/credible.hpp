#pragma once

#include <iosfwd>
#include <optional>

#include "ebcred/eb_inference.hpp"
#include "ebcred/rng.hpp"
#include "ebcred/truth_sequence.hpp"

namespace ebcred {

/// Radius r with P(sum_i s_i Z_i^2 <= r^2) = 1 - gamma, where s_i are the
/// posterior variances at alpha. Infinite at alpha = 0.
double radius(double alpha, const SequenceModel& model);
double radius(double alpha, const ModelConfig& cfg);

/// l2 ball around the empirical Bayes posterior mean with radius L * r(alpha_hat).
struct CredibleBall {
  Vector center;
  double radius = 0.0;
  double L = 1.0;
  double gamma = 0.05;
  double alpha_used = 0.0;

  double effective_radius() const { return L * radius; }
};

CredibleBall credible_ball(const Observation& obs, const SequenceModel& model, double L = 1.0);
CredibleBall credible_ball(const Observation& obs, const ModelConfig& cfg, double L = 1.0);

/// Upper bound on ||theta - center||^2 over the full sequence: exact over
/// stored coordinates, tail coordinates through the tail descriptor.
double distance_sq(const CredibleBall& ball, const TruthSequence& theta);

/// ||theta - center|| <= L * radius, using distance_sq.
bool contains(const CredibleBall& ball, const TruthSequence& theta);

/// Pointwise band from posterior draws, displayed in the cosine basis
/// e_i(t) = sqrt(2) cos(pi (i - 1/2) t) of the Volterra operator.
struct BandSummary {
  Vector t;
  Vector mean;
  Vector lower;
  Vector upper;
  std::optional<Vector> truth;
  double alpha_hat = 0.0;
  Index kept = 0;
};

struct BandSettings {
  Index draws = 2000;
  double keep = 0.95;
  Vector grid = Vector::LinSpaced(201, 0.0, 1.0);
};

/// Draws from the empirical Bayes posterior, keeps the `keep` fraction closest
/// to the posterior mean in l2, and returns the pointwise envelope of the kept
/// draws on the grid. UnsupportedError unless the model is Volterra.
BandSummary sample_band(const Observation& obs, const SequenceModel& model, const BandSettings& settings,
                        Seed seed, const TruthSequence* truth = nullptr);

/// sum_i coeffs_i sqrt(2) cos(pi (i - 1/2) t) at each grid point.
Vector cosine_synthesis(const Vector& coeffs, const Vector& grid);

/// CSV with header `t,truth,mean,lower,upper`; truth is blank when absent.
void write_band_csv(std::ostream& os, const BandSummary& band);

}  // namespace ebcred
