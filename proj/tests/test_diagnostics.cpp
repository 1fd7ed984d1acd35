#include <doctest.h>

#include <cmath>

#include "ebcred/diagnostics.hpp"
#include "ebcred/eb_inference.hpp"
#include "ebcred/errors.hpp"
#include "ebcred/truths.hpp"

using namespace ebcred;

namespace {

ModelConfig power_model(double n, double p, double C = 1.0) {
  ModelConfig cfg;
  cfg.n = n;
  cfg.kappa = KappaSpec::power_law(p, C);
  return cfg.resolved();
}

}  // namespace

TEST_CASE("h_n vanishes for trivial truths") {
  const auto cfg = power_model(1e4, 1.0);
  Vector c = Vector::Zero(100);
  c[0] = 3.0;
  const TruthSequence first_only(c, TailDescriptor::zero(), "first");
  for (double a : {0.0, 1.0, 3.0}) {
    CHECK(h_n(a, first_only, cfg) == 0.0);
    CHECK(h_n(a, make_zero_truth(100), cfg) == 0.0);
  }
  CHECK_THROWS_AS(h_n(1.0, first_only, power_model(1.0, 1.0)), PreconditionError);
}

TEST_CASE("h_n matches the defining sum") {
  const auto cfg = power_model(1e5, 1.0);
  const auto truth = make_selfsim_truth(cfg.trunc);
  for (double a : {0.25, 1.0, 2.5}) {
    const double d = 1 + 2 * a + 2;
    long double s = 0.0L;
    for (Index i = 2; i <= cfg.trunc; ++i) {
      const long double ii = i, th = truth(i);
      const long double den = std::pow(ii, (long double)d) + cfg.n;
      s += (long double)cfg.n * cfg.n * std::pow(ii, 1.0L + 2 * a) * std::log(ii) * th * th / (den * den);
    }
    const double expected = d / (std::pow(cfg.n, 1 / d) * std::log(cfg.n)) * static_cast<double>(s);
    CHECK(h_n(a, truth, cfg) == doctest::Approx(expected).epsilon(1e-10));
    CHECK(HFunction(truth, cfg).tail_bound(a) >= 0.0);
    CHECK(HFunction(truth, cfg).tail_bound(a) < 1e-6 * expected);
  }
}

TEST_CASE("h_n lower bound for a self-similar truth") {
  const double beta = 1.0, M = 1.0, eps = 0.05, rho = 2.0, p = 1.0;
  const Index N0 = 2;
  const auto cfg = power_model(1e6, p);
  const auto truth = make_selfsim_truth(cfg.trunc);
  REQUIRE(is_in_class(truth, SelfSimilar{beta, M, eps, N0, rho}).verdict == Verdict::holds);
  for (double a = 0.0; a <= 5.0; a += 0.05) {
    const double d = 1 + 2 * a + 2 * p;
    if (std::pow(cfg.n, 1 / d) < N0) continue;
    const double bound = eps * M * std::pow(cfg.n, (2 * a - 2 * beta) / d) / std::pow(std::pow(rho, d) + 1, 2);
    CHECK(h_n(a, truth, cfg) >= bound);
  }
}

TEST_CASE("alpha bounds: zero truth and thresholds") {
  const auto cfg = power_model(1e4, 1.0, 2.0);
  const auto b = alpha_bounds(make_zero_truth(cfg.trunc), cfg);
  CHECK(b.lower == cfg.A);
  CHECK(b.upper == cfg.A);
  CHECK(b.lower_empty);
  CHECK_FALSE(b.upper_empty);
  CHECK(b.lower_threshold == doctest::Approx(1.0 / (16.0 * 256.0)));
  CHECK(b.upper_threshold == doctest::Approx(8.0 * 256.0));
}

TEST_CASE("alpha bounds: bracketing and grid halving") {
  const auto cfg = power_model(1e6, 0.5);
  const auto truth = make_selfsim_truth(cfg.trunc);
  const HFunction h(truth, cfg);
  const auto coarse = alpha_bounds(truth, cfg, 2001);
  const auto fine = alpha_bounds(truth, cfg, 4001);
  const double step = cfg.A / 2000.0;
  CHECK(std::abs(coarse.lower - fine.lower) < step);
  CHECK(std::abs(coarse.upper - fine.upper) < step);
  CHECK(coarse.lower <= coarse.upper);
  CHECK(h(coarse.lower) >= coarse.lower_threshold);
  CHECK(h(coarse.upper) <= coarse.upper_threshold);
  for (double a = 0.0; a < coarse.lower - step; a += step / 2) CHECK(h(a) < coarse.lower_threshold);
  for (double a = coarse.upper + step; a <= cfg.A; a += step / 2) CHECK(h(a) > coarse.upper_threshold);
}

TEST_CASE("bias and variance") {
  const auto cfg = power_model(1e4, 1.0);
  const SequenceModel model(cfg);
  const auto truth = make_selfsim_truth(cfg.trunc);
  CHECK(bias_variance(1.0, make_zero_truth(cfg.trunc), model).bias_sq == 0.0);
  double prev_bias = -1.0, prev_var = INFINITY;
  for (double a = 0.0; a <= 5.0; a += 0.05) {
    const auto bv = bias_variance(a, truth, model);
    CHECK(bv.bias_sq >= prev_bias);
    CHECK(bv.var_sq < prev_var);
    prev_bias = bv.bias_sq;
    prev_var = bv.var_sq;
  }
}

TEST_CASE("bias and variance against replicated posterior means") {
  const auto cfg = power_model(1e4, 1.0);
  const SequenceModel model(cfg);
  const auto truth = make_selfsim_truth(cfg.trunc);
  const int R = 200;
  for (double a : {0.5, 3.0}) {
    std::vector<Vector> means;
    Vector avg = Vector::Zero(cfg.trunc);
    for (int r = 0; r < R; ++r) {
      means.push_back(posterior(a, synthesize(truth, model, substream_seed(31, r)), model).mean);
      avg += means.back() / R;
    }
    double spread = 0.0;
    for (const auto& m : means) spread += (m - avg).squaredNorm() / (R - 1);
    const auto bv = bias_variance(a, truth, model);
    CHECK(spread == doctest::Approx(bv.var_sq).epsilon(0.05));
    // the averaged mean carries var_sq / R of its own noise
    CHECK((avg - truth.coeffs()).squaredNorm() == doctest::Approx(bv.bias_sq + bv.var_sq / R).epsilon(0.05));
  }
}

TEST_CASE("oracle risk") {
  const auto cfg = power_model(1e4, 1.0);
  const auto zero = oracle_risk(make_zero_truth(cfg.trunc), cfg);
  CHECK(zero.alpha == cfg.A);
  const auto vol = [] {
    ModelConfig c;
    c.n = 1e6;
    c.kappa = KappaSpec::volterra();
    return c.resolved();
  }();
  const SequenceModel model(vol);
  const auto truth = make_selfsim_truth(vol.trunc);
  const auto best = oracle_risk(truth, model);
  for (double a = 0.0; a <= vol.A; a += 0.01) {
    const auto bv = bias_variance(a, truth, model);
    CHECK(best.risk <= bv.bias_sq + bv.var_sq + 1e-15);
  }
  const double scaled = best.risk / std::pow(vol.n, -2.0 / 5.0);
  CHECK(scaled >= 0.5);
  CHECK(scaled <= 20.0);
  const auto halved = oracle_risk(truth, model, 4001);
  CHECK(std::abs(halved.alpha - best.alpha) < vol.A / 2000.0);
}

TEST_CASE("minimax linear risk") {
  ModelConfig one;
  one.n = 1.0;
  one.kappa = KappaSpec::power_law(0.0);
  one.trunc = 1;
  CHECK(minimax_linear_risk(1.0, 1.0, one).risk == doctest::Approx(0.5));
  const double beta = 1.0, p = 1.0, d = 1 + 2 * beta + 2 * p;
  const auto r1 = minimax_linear_risk(beta, 1.0, power_model(1e6, p)).risk;
  const auto r2 = minimax_linear_risk(beta, 1.0, power_model(2e6, p)).risk;
  CHECK(r2 / r1 == doctest::Approx(std::pow(2.0, -2 * beta / d)).epsilon(0.03));
  const double base = r1 / std::pow(1.0, (1 + 2 * p) / d);
  for (double M : {4.0, 16.0}) {
    const double scaled = minimax_linear_risk(beta, M, power_model(1e6, p)).risk / std::pow(M, (1 + 2 * p) / d);
    CHECK(scaled == doctest::Approx(base).epsilon(0.1));
  }
  CHECK_THROWS_AS(minimax_linear_risk(0.0, 1.0, one), PreconditionError);
}

TEST_CASE("diagnose report is consistent") {
  const auto cfg = power_model(1e6, 0.5);
  const SequenceModel model(cfg);
  const auto truth = make_selfsim_truth(cfg.trunc);
  const auto report = diagnose(truth, model, 1.0, 1.0, 201);
  CHECK(report.alpha_grid.size() == 201);
  CHECK(report.h.size() == 201);
  CHECK(report.bias_sq.size() == 201);
  CHECK(report.alpha_lower <= report.alpha_upper);
  CHECK(report == diagnose(truth, model, 1.0, 1.0, 201));
  CHECK(report.minimax_linear == minimax_linear_risk(1.0, 1.0, model).risk);
}
