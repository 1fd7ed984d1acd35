#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "ebcred/credible.hpp"
#include "ebcred/errors.hpp"
#include "ebcred/truths.hpp"
#include "ebcred/weighted_chi_square.hpp"
#include "oracles.hpp"

using namespace ebcred;

namespace {

ModelConfig volterra(double n) {
  ModelConfig cfg;
  cfg.n = n;
  cfg.kappa = KappaSpec::volterra();
  return cfg.resolved();
}

}  // namespace

TEST_CASE("weighted chi-square: single weight against sampling") {
  const WeightedChiSquare chi(Vector::Ones(1));
  const double median = chi.quantile(0.5);
  CHECK(median == doctest::Approx(0.45493642).epsilon(1e-6));
  std::mt19937_64 gen(1);
  std::normal_distribution<double> z;
  std::vector<double> draws(10'000'000);
  for (auto& d : draws) {
    const double g = z(gen);
    d = g * g;
  }
  std::nth_element(draws.begin(), draws.begin() + draws.size() / 2, draws.end());
  CHECK(std::abs(median - draws[draws.size() / 2]) <= 1e-3);
}

TEST_CASE("weighted chi-square: closed forms") {
  CHECK(WeightedChiSquare(Vector::Ones(1)).quantile(0.95) == doctest::Approx(3.84145882).epsilon(1e-6));
  CHECK(WeightedChiSquare(Vector::Ones(5)).quantile(0.95) == doctest::Approx(11.07049769).epsilon(1e-6));
  const WeightedChiSquare two(Vector::Ones(2));
  for (double y : {0.5, 2.0, 7.0}) CHECK(two.cdf(y) == doctest::Approx(1.0 - std::exp(-y / 2)).epsilon(1e-7));
  const Vector w = Vector::LinSpaced(10, 1.0, 0.1);
  const WeightedChiSquare chi(w);
  CHECK(chi.mean() == doctest::Approx(w.sum()));
  CHECK(chi.variance() == doctest::Approx(2.0 * w.squaredNorm()));
}

TEST_CASE("weighted chi-square: decaying weights against sampling") {
  std::vector<double> w;
  for (int i = 1; i <= 400; ++i) w.push_back(std::pow(i, -2.0));
  Vector wv = Eigen::Map<Vector>(w.data(), w.size());
  const double q = WeightedChiSquare(wv).quantile(0.95);
  CHECK(q == doctest::Approx(oracle::mc_quantile(w, 0.95, 200000, 8)).epsilon(0.01));
  CHECK(monte_carlo_quantile(wv, 0.95, 200000, 8) == doctest::Approx(q).epsilon(0.01));
}

TEST_CASE("radius: infinite at alpha zero, finite otherwise") {
  const auto cfg = volterra(1e4);
  CHECK(std::isinf(radius(0.0, cfg)));
  CHECK(std::isfinite(radius(1e-3, cfg)));
  auto bad = cfg;
  bad.gamma = 1.5;
  CHECK_THROWS_AS(radius(1.0, bad), ConfigError);
}

TEST_CASE("radius: single coordinate median") {
  ModelConfig cfg;
  cfg.n = 1.0;
  cfg.kappa = KappaSpec::power_law(0.0);
  cfg.trunc = 1;
  cfg.gamma = 0.5;
  // s_1 = 1 / (1 + 1) for n = 1; scale so that the weight is one
  const double r = radius(1.0, cfg);
  CHECK(r * r / 0.5 == doctest::Approx(0.45493642).epsilon(1e-5));
}

TEST_CASE("radius nonincreasing in alpha and in n") {
  for (double n : {1e2, 1e4, 1e6}) {
    const SequenceModel model(volterra(n));
    double prev = INFINITY;
    for (double a = 0.05; a <= 5.0; a += 0.05) {
      const double r = radius(a, model);
      CHECK(r <= prev * (1 + 1e-9));
      prev = r;
    }
  }
  for (double a : {0.5, 1.0, 2.0}) {
    double prev = INFINITY;
    for (double n : {1e2, 1e3, 1e4, 1e5, 1e6}) {
      ModelConfig cfg = volterra(1e6);
      cfg.n = n;
      const double r = radius(a, cfg);
      CHECK(r <= prev);
      prev = r;
    }
  }
}

TEST_CASE("credible ball: posterior mass equals 1 - gamma") {
  const auto cfg = volterra(1e6);
  const SequenceModel model(cfg);
  const auto truth = make_selfsim_truth(cfg.trunc);
  const CredibleBall ball = credible_ball(synthesize(truth, model, 5), model);
  const Eigen::ArrayXd s = model.posterior_variance(ball.alpha_used);
  std::mt19937_64 gen(17);
  std::normal_distribution<double> z;
  const int draws = 100000;
  int inside = 0;
  for (int d = 0; d < draws; ++d) {
    double acc = 0.0;
    for (Index i = 0; i < s.size(); ++i) {
      const double g = z(gen);
      acc += s[i] * g * g;
    }
    inside += acc <= ball.radius * ball.radius ? 1 : 0;
  }
  CHECK(std::abs(static_cast<double>(inside) / draws - 0.95) <= 0.005);
}

TEST_CASE("credible ball: L scales the effective radius only") {
  const auto cfg = volterra(1e4);
  const Observation obs = synthesize(make_selfsim_truth(cfg.trunc), cfg, 3);
  const CredibleBall one = credible_ball(obs, cfg, 1.0);
  const CredibleBall two = credible_ball(obs, cfg, 2.0);
  CHECK(one.radius == two.radius);
  CHECK(two.effective_radius() == doctest::Approx(2.0 * one.effective_radius()));
  CHECK(one.gamma == cfg.gamma);
  CHECK_THROWS_AS(credible_ball(obs, cfg, 0.0), PreconditionError);
}

TEST_CASE("contains: center, infinite radius, just outside") {
  const auto cfg = volterra(1e4);
  const Observation obs = synthesize(make_selfsim_truth(cfg.trunc), cfg, 4);
  CredibleBall ball = credible_ball(obs, cfg, 1.5);
  const TruthSequence at_center(ball.center, TailDescriptor::zero(), "center");
  CHECK(contains(ball, at_center));
  Vector shifted = ball.center;
  shifted[0] += 1.01 * ball.effective_radius();
  CHECK_FALSE(contains(ball, TruthSequence(shifted, TailDescriptor::zero(), "out")));
  shifted[0] = ball.center[0] + 0.99 * ball.effective_radius();
  CHECK(contains(ball, TruthSequence(shifted, TailDescriptor::zero(), "in")));
  ball.alpha_used = 0.0;
  ball.radius = std::numeric_limits<double>::infinity();
  CHECK(contains(ball, make_bad_truth(cfg.trunc)));
}

TEST_CASE("contains: tail norm is added beyond the center") {
  Vector c = Vector::Zero(10);
  CredibleBall ball{c, 0.1, 1.0, 0.05, 1.0};
  const auto tail = TailDescriptor::power_law(1.0, 1.0, true);
  const TruthSequence theta(Vector::Zero(10), tail, "tail");
  CHECK(distance_sq(ball, theta) == doctest::Approx(tail.norm_sq_beyond(10)));
  CHECK_FALSE(contains(ball, theta));  // tail norm^2 is about 0.1 > 0.01
}

TEST_CASE("containment is monotone in L") {
  const auto cfg = volterra(1e4);
  const SequenceModel model(cfg);
  const auto truth = make_bad_truth(cfg.trunc);
  for (Seed s = 0; s < 20; ++s) {
    const Observation obs = synthesize(truth, model, s);
    bool prev = false;
    for (double L : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
      const bool in = contains(credible_ball(obs, model, L), truth);
      CHECK((!prev || in));
      prev = in;
    }
  }
}

TEST_CASE("sample_band: kept count and envelope") {
  const auto cfg = volterra(1e4);
  const SequenceModel model(cfg);
  const auto truth = make_selfsim_truth(cfg.trunc);
  const Observation obs = synthesize(truth, model, 1);
  BandSettings settings;
  const BandSummary band = sample_band(obs, model, settings, 2, &truth);
  CHECK(band.kept == 1900);
  CHECK(band.t.size() == 201);
  REQUIRE(band.truth.has_value());
  CHECK((band.lower.array() <= band.upper.array()).all());

  settings.keep = 1.0;
  settings.draws = 300;
  const BandSummary all = sample_band(obs, model, settings, 2);
  CHECK(all.kept == 300);
  CHECK_FALSE(all.truth.has_value());
  CHECK((all.lower.array() <= all.mean.array() + 1e-12).all());
  CHECK((all.mean.array() <= all.upper.array() + 1e-12).all());
}

TEST_CASE("sample_band: deterministic and rejects non-Volterra models") {
  const auto cfg = volterra(1e4);
  const Observation obs = synthesize(make_selfsim_truth(cfg.trunc), cfg, 1);
  BandSettings settings;
  settings.draws = 200;
  const SequenceModel model(cfg);
  const BandSummary a = sample_band(obs, model, settings, 9);
  const BandSummary b = sample_band(obs, model, settings, 9);
  CHECK(a.lower == b.lower);
  CHECK(a.upper == b.upper);
  ModelConfig other;
  other.n = 1e4;
  other.kappa = KappaSpec::power_law(1.0);
  other = other.resolved();
  const Observation obs2 = synthesize(make_selfsim_truth(other.trunc), other, 1);
  CHECK_THROWS_AS(sample_band(obs2, SequenceModel(other), settings, 1), UnsupportedError);
}

TEST_CASE("sample_band: width shrinks at the rate") {
  BandSettings settings;
  settings.draws = 400;
  settings.grid = Vector::Constant(1, 0.5);
  auto width = [&](double n) {
    const SequenceModel model(volterra(n));
    const auto truth = make_selfsim_truth(model.size());
    double total = 0.0;
    for (Seed s = 0; s < 3; ++s) {
      const BandSummary band = sample_band(synthesize(truth, model, s), model, settings, 100 + s);
      total += band.upper[0] - band.lower[0];
    }
    return total / 3.0;
  };
  const double ratio = width(1e10) / width(1e4);
  const double expected = std::pow(1e6, -1.0 / 5.0);
  CHECK(ratio >= expected / 2.0);
  CHECK(ratio <= expected * 2.0);
}

TEST_CASE("cosine synthesis and band CSV") {
  const Vector grid = Vector::LinSpaced(3, 0.0, 1.0);
  Vector c = Vector::Zero(2);
  c[0] = 1.0;
  const Vector f = cosine_synthesis(c, grid);
  CHECK(f[0] == doctest::Approx(std::sqrt(2.0)));
  CHECK(f[1] == doctest::Approx(std::sqrt(2.0) * std::cos(M_PI * 0.25)));
  BandSummary band;
  band.t = grid;
  band.mean = band.lower = band.upper = f;
  band.truth = f;
  std::ostringstream os;
  write_band_csv(os, band);
  CHECK(os.str().substr(0, os.str().find('\n')) == "t,truth,mean,lower,upper");
}
