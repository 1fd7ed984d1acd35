#pragma once

// One-dimensional search and quadrature helpers shared by the inference,
// credible-set and diagnostics modules.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include "ebcred/errors.hpp"

namespace ebcred::numeric {

struct GridOptimum {
  double arg = 0.0;
  double value = 0.0;
};

/// Uniform grid of `points` values on [lo, hi], endpoints included.
inline std::vector<double> uniform_grid(double lo, double hi, int points) {
  if (points < 2) throw PreconditionError("uniform_grid: need at least 2 points");
  std::vector<double> grid(static_cast<std::size_t>(points));
  const double step = (hi - lo) / (points - 1);
  for (int k = 0; k < points; ++k) grid[k] = lo + step * k;
  grid.back() = hi;
  return grid;
}

/// Golden-section search for a maximum of `f` on [a, b] until the bracket is
/// shorter than `xtol`. Returns the best point seen, endpoints excluded.
template <class F>
GridOptimum golden_section_max(F&& f, double a, double b, double xtol) {
  constexpr double inv_phi = 0.6180339887498949;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > xtol) {
    // ">=" keeps the left point on ties so the search drifts toward smaller args.
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? GridOptimum{c, fc} : GridOptimum{d, fd};
}

/// Global maximum of `f` over [lo, hi]: scan a uniform grid, then refine around
/// the best grid point by golden section to `xtol`. Ties on the grid resolve to
/// the smallest argument; the refined point replaces the grid point only when
/// it is strictly better.
template <class F>
GridOptimum maximize_on_grid(F&& f, double lo, double hi, int points, double xtol) {
  const auto grid = uniform_grid(lo, hi, points);
  std::size_t best = 0;
  double best_value = f(grid[0]);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double v = f(grid[k]);
    if (v > best_value) {
      best = k;
      best_value = v;
    }
  }
  GridOptimum out{grid[best], best_value};
  const double left = grid[best == 0 ? 0 : best - 1];
  const double right = grid[std::min(best + 1, grid.size() - 1)];
  if (right - left > xtol) {
    const auto refined = golden_section_max(f, left, right, xtol);
    if (refined.value > out.value) out = refined;
  }
  return out;
}

/// Brent's bracketing root finder. Requires f(a) and f(b) of opposite sign
/// (or one of them zero).
template <class F>
double brent_root(F&& f, double a, double b, double xtol, int max_iter = 200) {
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0)) throw NumericalError("brent_root: root not bracketed");
  double c = a, fc = fa, d = b - a, e = d;
  for (int iter = 0; iter < max_iter; ++iter) {
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * 2.220446049250313e-16 * std::abs(b) + 0.5 * xtol;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) return b;
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = d;
      }
    } else {
      d = m;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol ? d : (m > 0 ? tol : -tol);
    fb = f(b);
  }
  throw NumericalError("brent_root: no convergence");
}

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussLegendre gauss_legendre(int order) {
  GaussLegendre rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const double pi = 3.14159265358979323846;
  for (int k = 0; k < (order + 1) / 2; ++k) {
    double x = std::cos(pi * (k + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= order; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      if (order == 1) p0 = 1.0;
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[k] = -x;
    rule.weights[k] = w;
    rule.nodes[order - 1 - k] = x;
    rule.weights[order - 1 - k] = w;
  }
  return rule;
}

/// Runs body(k) for k in [0, count) on up to `threads` workers. Each index is
/// processed exactly once; the first exception thrown is rethrown here.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t k = 0; k < count; ++k) body(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= count) return;
      try {
        body(k);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned n = std::min<unsigned>(threads, static_cast<unsigned>(count));
  pool.reserve(n);
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace ebcred::numeric
