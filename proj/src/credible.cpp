#include "ebcred/credible.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>

#include "ebcred/errors.hpp"
#include "ebcred/weighted_chi_square.hpp"

namespace ebcred {

double radius(double alpha, const SequenceModel& model) {
  if (!(alpha >= 0.0)) throw PreconditionError("radius: alpha must be nonnegative");
  const double gamma = model.config().gamma;
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("radius: gamma must lie in (0,1)");
  if (alpha == 0.0) return std::numeric_limits<double>::infinity();
  const Eigen::VectorXd weights = model.posterior_variance(alpha).matrix();
  const WeightedChiSquare dist(weights);
  return std::sqrt(dist.quantile(1.0 - gamma));
}

double radius(double alpha, const ModelConfig& cfg) { return radius(alpha, SequenceModel(cfg)); }

CredibleBall credible_ball(const Observation& obs, const SequenceModel& model, double L) {
  if (!(L > 0.0)) throw PreconditionError("credible_ball: L must be positive");
  auto [fit, post] = empirical_bayes_posterior(obs, model);
  CredibleBall ball;
  ball.center = std::move(post.mean);
  ball.radius = radius(fit.alpha_hat, model);
  ball.L = L;
  ball.gamma = model.config().gamma;
  ball.alpha_used = fit.alpha_hat;
  return ball;
}

CredibleBall credible_ball(const Observation& obs, const ModelConfig& cfg, double L) {
  return credible_ball(obs, SequenceModel(cfg), L);
}

double distance_sq(const CredibleBall& ball, const TruthSequence& theta) {
  const Index len = ball.center.size();
  const Index T = theta.size();
  const Index common = std::min(len, T);
  double d2 = (theta.coeffs().head(common) - ball.center.head(common)).squaredNorm();
  // Center coordinates past the stored truth.
  const TailDescriptor& tail = theta.tail();
  for (Index i = common; i < len; ++i) {
    const double c = ball.center[i];
    if (tail.is_zero()) {
      d2 += c * c;
    } else if (tail.exact) {
      const double diff = tail.value(i + 1) - c;
      d2 += diff * diff;
    } else {
      const double worst = std::abs(c) + tail.envelope(i + 1);
      d2 += worst * worst;
    }
  }
  // Truth coordinates past the center (center is zero there), then the tail.
  if (T > len) d2 += theta.coeffs().tail(T - len).squaredNorm();
  d2 += tail.norm_sq_beyond(std::max(len, T));
  return d2;
}

bool contains(const CredibleBall& ball, const TruthSequence& theta) {
  if (std::isinf(ball.radius)) return true;
  const double r = ball.effective_radius();
  return distance_sq(ball, theta) <= r * r;
}

Vector cosine_synthesis(const Vector& coeffs, const Vector& grid) {
  Vector out(grid.size());
  for (Index g = 0; g < grid.size(); ++g) {
    double acc = 0.0;
    for (Index i = 0; i < coeffs.size(); ++i)
      acc += coeffs[i] * std::cos(std::numbers::pi * (static_cast<double>(i) + 0.5) * grid[g]);
    out[g] = std::numbers::sqrt2 * acc;
  }
  return out;
}

BandSummary sample_band(const Observation& obs, const SequenceModel& model, const BandSettings& settings,
                        Seed seed, const TruthSequence* truth) {
  if (model.config().kappa.kind() != KappaSpec::Kind::volterra)
    throw UnsupportedError("sample_band: function-space bands need the Volterra cosine basis");
  if (settings.draws < 1) throw PreconditionError("sample_band: draws must be positive");
  if (!(settings.keep > 0.0 && settings.keep <= 1.0))
    throw PreconditionError("sample_band: keep must lie in (0,1]");

  const auto [fit, post] = empirical_bayes_posterior(obs, model);
  const Index size = post.mean.size();
  const Index draws = settings.draws;
  const Vector sd = post.var.cwiseSqrt();

  // Draw d uses its own substream so kept draws can be regenerated without
  // holding all deviations in memory.
  auto deviation = [&](Index d, Eigen::Ref<Vector> out) {
    NormalStream normals(substream_seed(seed, static_cast<std::uint64_t>(d), StreamTag::posterior));
    for (Index i = 0; i < size; ++i) out[i] = sd[i] * normals();
  };
  Vector scratch(size);
  Vector dist2(draws);
  for (Index d = 0; d < draws; ++d) {
    deviation(d, scratch);
    dist2[d] = scratch.squaredNorm();
  }
  std::vector<Index> order(static_cast<std::size_t>(draws));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return dist2[a] < dist2[b]; });
  const auto kept = std::clamp<Index>(
      static_cast<Index>(std::llround(settings.keep * static_cast<double>(draws))), 1, draws);

  const Vector& t = settings.grid;
  Eigen::MatrixXd basis(t.size(), size);
  for (Index g = 0; g < t.size(); ++g)
    for (Index i = 0; i < size; ++i)
      basis(g, i) = std::numbers::sqrt2 * std::cos(std::numbers::pi * (static_cast<double>(i) + 0.5) * t[g]);

  Vector lo = Vector::Constant(t.size(), std::numeric_limits<double>::infinity());
  Vector hi = Vector::Constant(t.size(), -std::numeric_limits<double>::infinity());
  constexpr Index kBlock = 128;
  Eigen::MatrixXd block(size, kBlock);
  for (Index start = 0; start < kept; start += kBlock) {
    const Index cols = std::min(kBlock, kept - start);
    for (Index k = 0; k < cols; ++k) deviation(order[static_cast<std::size_t>(start + k)], block.col(k));
    const Eigen::MatrixXd curves = basis * block.leftCols(cols);
    lo = lo.cwiseMin(curves.rowwise().minCoeff());
    hi = hi.cwiseMax(curves.rowwise().maxCoeff());
  }

  BandSummary band;
  band.t = t;
  band.mean = basis * post.mean;
  band.lower = band.mean + lo;
  band.upper = band.mean + hi;
  if (truth) band.truth = basis * truth->head(size);
  band.alpha_hat = fit.alpha_hat;
  band.kept = kept;
  return band;
}

void write_band_csv(std::ostream& os, const BandSummary& band) {
  const auto old_precision = os.precision(17);
  os << "t,truth,mean,lower,upper\n";
  for (Index g = 0; g < band.t.size(); ++g) {
    os << band.t[g] << ',';
    if (band.truth) os << (*band.truth)[g];
    os << ',' << band.mean[g] << ',' << band.lower[g] << ',' << band.upper[g] << '\n';
  }
  os.precision(old_precision);
}

}  // namespace ebcred
