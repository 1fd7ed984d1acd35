#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ebcred/errors.hpp"
#include "ebcred/truths.hpp"

using namespace ebcred;

TEST_CASE("self-similar truth coefficients") {
  const auto t = make_selfsim_truth(100);
  CHECK(t(1) == 0.0);
  CHECK(t(2) == doctest::Approx(0.32149).epsilon(1e-5));
  CHECK(t(37) == doctest::Approx(std::pow(37.0, -1.5) * std::sin(37.0)));
  CHECK(t.tail().kind == TailDescriptor::Kind::power_law);
  CHECK(t.tail().exponent == 1.5);
  CHECK(t.first_coordinate_is_zero());
  double sup = 0.0;
  for (Index i = 1; i <= t.size(); ++i) sup = std::max(sup, std::pow(i, 3.0) * t(i) * t(i));
  CHECK(sup <= 1.0);
  CHECK(is_in_class(t, Hyperrectangle{1.0, 1.0}).verdict == Verdict::holds);
}

TEST_CASE("bad truth coefficients") {
  const auto t = make_bad_truth(1000);
  CHECK(t(1) == 8.0);
  CHECK(t(3) == 2.0);
  CHECK(t(50) == -2.0);
  CHECK(t(100) == 0.0);
  CHECK(t(300) == 0.0);
  CHECK(t(2) == 0.0);
  CHECK(t.tail().is_zero());
  CHECK(t(5000) == 0.0);
  const auto conv = make_bad_truth(1000, FirstCoordinate::convention);
  CHECK(conv(1) == 0.0);
  CHECK(conv(3) == 2.0);
  CHECK(conv.label() != t.label());
  CHECK_THROWS_AS(make_bad_truth(10), PreconditionError);
}

TEST_CASE("counterexample truth: bands and gaps") {
  const double beta = 1.0, M = 2.0, p = 1.0;
  const double d = 1 + 2 * beta + 2 * p;
  const std::vector<double> rho{3.0, 4.0};
  const std::vector<double> n{1e5, 1e5 * std::pow(2 * 16.0, d) * 10};
  const auto t = make_counterexample_truth(beta, M, rho, n, p, 20000);
  const double N1 = std::pow(n[0], 1 / d), N2 = std::pow(n[1], 1 / d);
  for (Index i = static_cast<Index>(std::ceil(N1)); i <= static_cast<Index>(std::floor(2 * N1)); ++i)
    CHECK(t(i) == doctest::Approx(std::sqrt(M) * std::pow(static_cast<double>(i), -0.5 - beta)));
  for (Index i = static_cast<Index>(std::ceil(N1 / 3)); i < N1; ++i) CHECK(t(i) == 0.0);
  for (Index i = static_cast<Index>(std::floor(2 * N1)) + 1; i <= 3 * N1; ++i) CHECK(t(i) == 0.0);
  CHECK(t(static_cast<Index>(std::floor(3 * N1)) + 1) != 0.0);
  CHECK(t(1) == 0.0);
  CHECK(is_in_class(t, Hyperrectangle{beta, M}).verdict == Verdict::holds);
  // the polished-tail check fails at the start of each of the first two gaps
  for (auto [N, r] : {std::pair{N1, 3.0}, std::pair{N2, 4.0}}) {
    const Index start = static_cast<Index>(std::ceil(N / r));
    if (2 * start > t.size()) continue;
    const auto check = is_in_class(t, PolishedTail{100.0, start, 2.0});
    CHECK(check.verdict == Verdict::fails);
    CHECK(check.witness == start);
  }
}

TEST_CASE("counterexample truth: growth condition names the index") {
  try {
    make_counterexample_truth(1.0, 1.0, {2.0, 2.0, 2.0}, {1e3, 1e20, 1e21}, 1.0, 100);
    FAIL("expected a precondition error");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("j = 2") != std::string::npos);
  }
}

TEST_CASE("polished tail: i^-1 sequence passes, zero and certificates") {
  const auto t = make_power_truth(1.0, 1.0, 4000);
  const auto check = is_in_class(t, PolishedTail{3.0, 2, 2.0});
  CHECK(check.verdict == Verdict::holds);
  CHECK(check.checked_up_to >= 1000);
  CHECK(is_in_class(t, PolishedTail{3.0, 2, 2.0}) == check);
  CHECK(is_in_class(t, PolishedTail{1.5, 2, 2.0}).verdict == Verdict::fails);
}

TEST_CASE("self-similar check") {
  CHECK(is_in_class(make_zero_truth(100), SelfSimilar{1.0, 1.0, 0.1, 2, 2.0}).verdict == Verdict::fails);
  const auto p = make_power_truth(1.0, 1.5, 4000);  // theta_i^2 = i^-3: beta = 1, M = 1
  CHECK(is_in_class(p, SelfSimilar{1.0, 1.0, 0.1, 2, 2.0}).verdict == Verdict::holds);
  // self-similar sequences are polished with L0 = 1/eps
  CHECK(is_in_class(p, PolishedTail{10.0, 2, 2.0}).verdict == Verdict::holds);
}

TEST_CASE("sobolev, C00 and supersmooth checks") {
  const auto p = make_power_truth(1.0, 2.0, 1000);  // theta_i = i^-2
  CHECK(is_in_class(p, Sobolev{1.0, 1.0}).verdict == Verdict::holds);
  CHECK(is_in_class(p, Sobolev{2.0, 1.0}).verdict != Verdict::holds);
  CHECK(is_in_class(make_bad_truth(100, FirstCoordinate::convention), CZeroZero{100, 10.0}).verdict ==
        Verdict::holds);
  CHECK(is_in_class(make_bad_truth(100, FirstCoordinate::convention), CZeroZero{10, 10.0}).verdict ==
        Verdict::fails);
  CHECK(is_in_class(p, CZeroZero{10, 10.0}).verdict == Verdict::undecidable);
  Vector c = Vector::Zero(50);
  for (Index i = 2; i <= 50; ++i) c[i - 1] = std::exp(-static_cast<double>(i));
  const TruthSequence ss(c, TailDescriptor::zero(), "exp");
  CHECK(is_in_class(ss, SuperSmooth{1.0, 1.0, 1.0}).verdict == Verdict::holds);
  CHECK(is_in_class(p, SuperSmooth{1.0, 1.0, 1.0}).verdict != Verdict::holds);
}

TEST_CASE("hyperrectangle monotone in beta") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    Vector c = Vector::Zero(200);
    for (Index i = 2; i <= 200; ++i) c[i - 1] = u(gen) * std::pow(static_cast<double>(i), -2.0);
    const TruthSequence t(c, TailDescriptor::zero(), "random");
    for (double b : {0.5, 1.0, 1.5})
      if (is_in_class(t, Hyperrectangle{b, 1.0}))
        CHECK(is_in_class(t, Hyperrectangle{b - 0.25, 1.0}).verdict == Verdict::holds);
  }
}

TEST_CASE("prior draw: variance, determinism, first coordinate") {
  const double alpha = 1.0;
  const int R = 10000;
  double s2 = 0.0, s10 = 0.0, s100 = 0.0;
  for (int r = 0; r < R; ++r) {
    const auto d = prior_draw(alpha, 128, substream_seed(3, r, StreamTag::prior));
    REQUIRE(d(1) == 0.0);
    s2 += d(2) * d(2);
    s10 += d(10) * d(10);
    s100 += d(100) * d(100);
  }
  CHECK(s2 / R == doctest::Approx(std::pow(2.0, -3.0)).epsilon(0.05));
  CHECK(s10 / R == doctest::Approx(std::pow(10.0, -3.0)).epsilon(0.05));
  CHECK(s100 / R == doctest::Approx(std::pow(100.0, -3.0)).epsilon(0.05));
  CHECK(prior_draw(alpha, 64, 5) == prior_draw(alpha, 64, 5));
  CHECK(prior_draw(alpha, 64, 5).tail().is_zero());
  CHECK_THROWS_AS(prior_draw(0.0, 64, 5), PreconditionError);
}

TEST_CASE("truth CSV round trip") {
  for (const auto& t : {make_selfsim_truth(40), make_bad_truth(60), make_zero_truth(3)}) {
    std::stringstream ss;
    write_truth_csv(ss, t);
    CHECK(read_truth_csv(ss) == t);
  }
  std::stringstream broken("i,theta\n1,abc\n");
  CHECK_THROWS(read_truth_csv(broken));
}
