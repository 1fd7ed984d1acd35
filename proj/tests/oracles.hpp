#pragma once

// Reference computations written straight from the model formulas, kept apart
// from the library so that tests compare two independent routes.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

inline long double volterra_kappa(long i) { return 1.0L / ((i - 0.5L) * std::numbers::pi_v<long double>); }

/// -(1/2) sum [log(1 + n / (i^{1+2a} k^-2)) - n^2 x^2 / (i^{1+2a} k^-2 + n)]
template <class Kappa>
long double loglik(double alpha, const std::vector<double>& x, double n, Kappa kappa) {
  long double total = 0.0L;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const long i = static_cast<long>(k) + 1;
    const long double k2 = 1.0L / (kappa(i) * kappa(i));
    const long double prec = std::pow(static_cast<long double>(i), 1.0L + 2.0L * alpha) * k2;
    const long double nn = n;
    total += std::log1p(nn / prec) - nn * nn * x[k] * x[k] / (prec + nn);
  }
  return -0.5L * total;
}

/// loglik(a1) - loglik(a2), differenced term by term so large
/// alpha-free terms cancel exactly.
template <class Kappa>
long double loglik_difference(double a1, double a2, const std::vector<double>& x, double n, Kappa kappa) {
  const long double nn = n;
  auto term = [&](long double i, long double k2, long double alpha, long double x2) {
    const long double prec = std::pow(i, 1.0L + 2.0L * alpha) * k2;
    return std::log1p(nn / prec) - nn * nn * x2 / (prec + nn);
  };
  long double total = 0.0L;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const long i = static_cast<long>(k) + 1;
    const long double k2 = 1.0L / (kappa(i) * kappa(i));
    const long double x2 = static_cast<long double>(x[k]) * x[k];
    total += term(i, k2, a1, x2) - term(i, k2, a2, x2);
  }
  return -0.5L * total;
}

/// Quantile of sum w_i Z_i^2 by plain sampling with its own generator.
inline double mc_quantile(const std::vector<double>& w, double prob, long draws, unsigned long seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  std::vector<double> sums(static_cast<std::size_t>(draws));
  for (auto& s : sums) {
    double acc = 0.0;
    for (double wi : w) {
      const double g = z(gen);
      acc += wi * g * g;
    }
    s = acc;
  }
  const auto k = static_cast<std::size_t>(std::ceil(prob * draws)) - 1;
  std::nth_element(sums.begin(), sums.begin() + k, sums.end());
  return sums[k];
}

/// Like mc_quantile but only the `top` largest weights are sampled exactly; the
/// rest is replaced by a normal with matching mean and variance.
inline double mc_quantile_split(std::vector<double> w, double prob, long draws, unsigned long seed,
                                std::size_t top = 64) {
  std::sort(w.begin(), w.end(), std::greater<>());
  top = std::min(top, w.size());
  double rest_mean = 0.0, rest_var = 0.0;
  for (std::size_t k = top; k < w.size(); ++k) {
    rest_mean += w[k];
    rest_var += 2.0 * w[k] * w[k];
  }
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  std::vector<double> sums(static_cast<std::size_t>(draws));
  for (auto& s : sums) {
    double acc = rest_mean + std::sqrt(rest_var) * z(gen);
    for (std::size_t k = 0; k < top; ++k) {
      const double g = z(gen);
      acc += w[k] * g * g;
    }
    s = acc;
  }
  const auto k = static_cast<std::size_t>(std::ceil(prob * draws)) - 1;
  std::nth_element(sums.begin(), sums.begin() + k, sums.end());
  return sums[k];
}

}  // namespace oracle
