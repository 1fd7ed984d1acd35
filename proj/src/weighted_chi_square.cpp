#include "ebcred/weighted_chi_square.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "ebcred/errors.hpp"
#include "ebcred/numeric.hpp"

namespace ebcred {

namespace {

constexpr double kSmall = 0.1;    // lambda u below this: power series
constexpr double kLarge = 10.0;   // lambda u above this: inverse power series
constexpr double kMaxUpper = 1e4; // in units of 1 / largest weight
constexpr double kRadiansPerPanel = 4.0;
constexpr int kOrder = 10;

const numeric::GaussLegendre& rule() {
  static const numeric::GaussLegendre r = numeric::gauss_legendre(kOrder);
  return r;
}

}  // namespace

WeightedChiSquare::WeightedChiSquare(const Eigen::Ref<const Eigen::VectorXd>& weights, double cdf_tol)
    : cdf_tol_(cdf_tol) {
  if (!weights.allFinite() || (weights.array() < 0.0).any())
    throw PreconditionError("weighted chi-square: weights must be finite and nonnegative");
  mean_ = weights.sum();
  variance_ = 2.0 * weights.squaredNorm();
  scale_ = weights.size() > 0 ? weights.maxCoeff() : 0.0;
  if (scale_ <= 0.0) return;

  std::vector<double> lambda;
  lambda.reserve(static_cast<std::size_t>(weights.size()));
  for (Eigen::Index i = 0; i < weights.size(); ++i)
    if (weights[i] > 0.0) lambda.push_back(weights[i] / scale_);
  std::sort(lambda.begin(), lambda.end(), std::greater<>());
  lambda_ = Eigen::Map<const Eigen::ArrayXd>(lambda.data(), static_cast<Eigen::Index>(lambda.size()));
  sum_lambda_ = lambda_.sum();

  // Tail bound: for u >= U, (1 + z^2 (u/U)^2) / (1 + z^2) >= (u/U)^{2c} with
  // c = z^2 / (1 + z^2), so rho(u) >= rho(U) (u/U)^s and the neglected integral
  // is at most 1 / (pi s rho(U)).
  const double tol = 0.25 * cdf_tol_;
  auto tail_bound = [&](double U) {
    const Eigen::ArrayXd z2 = (lambda_ * U).square();
    const double s = 0.5 * (z2 / (1.0 + z2)).sum();
    const double log_rho = 0.25 * z2.log1p().sum();
    return std::exp(-log_rho) / (std::numbers::pi * s);
  };
  double hi = 1.0;
  while (tail_bound(hi) > tol && hi < kMaxUpper) hi *= 2.0;
  if (tail_bound(hi) > tol) {
    upper_ = kMaxUpper;
    capped_ = true;
  } else {
    double lo = hi / 2.0;
    if (tail_bound(lo) <= tol) lo = 0.0;
    for (int it = 0; it < 40 && hi - lo > 1e-3 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (tail_bound(mid) <= tol ? hi : lo) = mid;
    }
    upper_ = hi;
  }

  const std::size_t m = lambda.size();
  suffix_.assign(2 * kSeries, std::vector<double>(m + 1, 0.0));
  for (std::size_t j = m; j-- > 0;) {
    double power = lambda[j];
    for (int k = 0; k < 2 * kSeries; ++k) {
      suffix_[k][j] = suffix_[k][j + 1] + power;
      power *= lambda[j];
    }
  }
  // Only weights with lambda * upper > kLarge ever use the inverse series.
  std::size_t large = 0;
  while (large < m && lambda[large] * upper_ > kLarge) ++large;
  prefix_.assign(2 * kSeries, std::vector<double>(large + 1, 0.0));
  prefix_log_.assign(large + 1, 0.0);
  for (std::size_t j = 0; j < large; ++j) {
    const double inv = 1.0 / lambda[j];
    double power = inv;
    for (int k = 0; k < 2 * kSeries; ++k) {
      prefix_[k][j + 1] = prefix_[k][j] + power;
      power *= inv;
    }
    prefix_log_[j + 1] = prefix_log_[j] + std::log(lambda[j]);
  }
}

void WeightedChiSquare::phase_and_log_rho(double u, double& phase, double& log_rho) const {
  const auto m = static_cast<std::size_t>(lambda_.size());
  const double* first = lambda_.data();
  // lambda_ is descending: [0, a) has lambda u > kLarge, [b, m) has lambda u < kSmall.
  const auto a = static_cast<std::size_t>(
      std::partition_point(first, first + m, [&](double l) { return l * u > kLarge; }) - first);
  const auto b = static_cast<std::size_t>(
      std::partition_point(first, first + m, [&](double l) { return l * u >= kSmall; }) - first);

  double atan_sum = 0.0;
  double log_sum = 0.0;
  for (std::size_t j = a; j < b; ++j) {
    const double z = lambda_[static_cast<Eigen::Index>(j)] * u;
    atan_sum += std::atan(z);
    log_sum += std::log1p(z * z);
  }
  // atan z = z - z^3/3 + z^5/5 - ...; log(1 + z^2) = z^2 - z^4/2 + z^6/3 - ...
  if (b < m) {
    double upow = u;
    const double u2 = u * u;
    for (int k = 0; k < kSeries; ++k) {
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      atan_sum += sign * upow * suffix_[2 * k][b] / (2 * k + 1);
      log_sum += sign * upow * u * suffix_[2 * k + 1][b] / (k + 1);
      upow *= u2;
    }
  }
  // atan z = pi/2 - 1/z + 1/(3 z^3) - ...; log(1 + z^2) = 2 log z + 1/z^2 - 1/(2 z^4) + ...
  if (a > 0) {
    const double inv_u = 1.0 / u;
    const double inv_u2 = inv_u * inv_u;
    double ipow = inv_u;
    atan_sum += static_cast<double>(a) * (std::numbers::pi / 2.0);
    log_sum += 2.0 * (prefix_log_[a] + static_cast<double>(a) * std::log(u));
    for (int k = 0; k < kSeries; ++k) {
      const double sign = (k % 2 == 0) ? -1.0 : 1.0;
      atan_sum += sign * ipow * prefix_[2 * k][a] / (2 * k + 1);
      log_sum -= sign * ipow * inv_u * prefix_[2 * k + 1][a] / (k + 1);
      ipow *= inv_u2;
    }
  }
  phase = 0.5 * atan_sum;
  log_rho = 0.25 * log_sum;
}

double WeightedChiSquare::phase_slope(double u, double y) const {
  return 0.5 * (lambda_ / (1.0 + (lambda_ * u).square())).sum() - 0.5 * y;
}

double WeightedChiSquare::integral(double y) const {
  const auto& gl = rule();
  // Phase speed is at most (sum lambda + y) / 2.
  const double max_speed = std::max(0.5 * (sum_lambda_ + y), 1e-12);
  const double panels = std::ceil(upper_ / std::min(1.0, kRadiansPerPanel / max_speed));
  const double width = upper_ / panels;
  double total = 0.0;
  const auto count = static_cast<long>(panels);
  for (long k = 0; k < count; ++k) {
    const double mid = (static_cast<double>(k) + 0.5) * width;
    double panel = 0.0;
    for (int j = 0; j < kOrder; ++j) {
      const double u = mid + 0.5 * width * gl.nodes[j];
      double phase, log_rho;
      phase_and_log_rho(u, phase, log_rho);
      panel += gl.weights[j] * std::sin(phase - 0.5 * y * u) / (u * std::exp(log_rho));
    }
    total += 0.5 * width * panel;
  }
  if (capped_) {
    // int_U^inf sin(theta) a du ~ cos(theta(U)) a(U) / theta'(U) for slowly varying a.
    const double slope = phase_slope(upper_, y);
    double phase, log_rho;
    phase_and_log_rho(upper_, phase, log_rho);
    if (std::abs(slope) > 1e-12)
      total += std::cos(phase - 0.5 * y * upper_) / (upper_ * std::exp(log_rho)) / slope;
  }
  return total;
}

double WeightedChiSquare::cdf(double y) const {
  if (scale_ <= 0.0) return y >= 0.0 ? 1.0 : 0.0;
  if (y <= 0.0) return 0.0;
  const double value = 0.5 - integral(y / scale_) / std::numbers::pi;
  if (!std::isfinite(value)) throw NumericalError("weighted chi-square: non-finite CDF");
  return std::clamp(value, 0.0, 1.0);
}

double WeightedChiSquare::quantile(double prob) const {
  if (!(prob > 0.0 && prob < 1.0)) throw PreconditionError("quantile: probability must lie in (0,1)");
  if (scale_ <= 0.0) return 0.0;
  const double sd = std::sqrt(variance_);
  const double k_lo = 1.05 * std::sqrt(1.0 / prob - 1.0);
  const double k_hi = 1.05 * std::sqrt(1.0 / (1.0 - prob) - 1.0);
  double lo = std::max(0.0, mean_ - k_lo * sd);
  double hi = mean_ + k_hi * sd;
  auto f = [&](double y) { return cdf(y) - prob; };
  double f_lo = lo > 0.0 ? f(lo) : -prob;
  double f_hi = f(hi);
  for (int expand = 0; f_lo > 0.0 && expand < 60; ++expand) {
    lo *= 0.5;
    f_lo = f(lo);
  }
  for (int expand = 0; f_hi < 0.0 && expand < 60; ++expand) {
    hi += sd;
    f_hi = f(hi);
  }
  if (f_lo > 0.0 || f_hi < 0.0) throw NumericalError("weighted chi-square: quantile bracket failed");
  return numeric::brent_root(f, lo, hi, 1e-12 * hi);
}

double monte_carlo_quantile(const Eigen::Ref<const Eigen::VectorXd>& weights, double prob, long draws,
                            Seed seed) {
  if (!(prob > 0.0 && prob < 1.0)) throw PreconditionError("quantile: probability must lie in (0,1)");
  if (draws < 1) throw PreconditionError("monte_carlo_quantile: draws must be positive");
  NormalStream normals(seed);
  std::vector<double> samples(static_cast<std::size_t>(draws));
  for (auto& s : samples) {
    double q = 0.0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
      const double z = normals();
      q += weights[i] * z * z;
    }
    s = q;
  }
  const auto k = static_cast<std::size_t>(std::ceil(prob * static_cast<double>(draws))) - 1;
  std::nth_element(samples.begin(), samples.begin() + static_cast<long>(k), samples.end());
  return samples[k];
}

}  // namespace ebcred
