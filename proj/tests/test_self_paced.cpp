#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "sppll/rng.hpp"
#include "sppll/self_paced.hpp"
#include "support/oracles.hpp"

using namespace sppll;

TEST_CASE("zero-loss samples are fully admitted") {
  const Vector v = update_weights(Vector::Zero(4), 0.7);
  CHECK((v.array() == 1.0).all());
}

TEST_CASE("losses above the pace threshold are excluded") {
  Vector losses(3);
  losses << 0.8, 0.61, 1.0;
  const Vector v = update_weights(losses, 0.6);
  CHECK((v.array() == 0.0).all());
}

TEST_CASE("intermediate losses get the linear weight") {
  Vector losses(1);
  losses << 0.3;
  const Vector v = update_weights(losses, 0.6);
  CHECK(v(0) == doctest::Approx(0.5));
}

TEST_CASE("pace penalty values") {
  CHECK(regularizer_value(Vector::Ones(5), 0.8) == doctest::Approx(-5 * 0.4));
  CHECK(regularizer_value(Vector::Zero(5), 0.8) == doctest::Approx(0.0));
  Vector v(1);
  v << 0.5;
  CHECK(regularizer_value(v, 0.6) == doctest::Approx(0.3 * (0.25 - 1.0)));
}

TEST_CASE("closed form matches dense grid search") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    const double loss = uniform_unit(rng);          // clamped losses live in [0,1]
    const double lambda = 0.05 + uniform_unit(rng); // (0.05, 1.05)
    Vector one(1);
    one << loss;
    const double got = update_weights(one, lambda)(0);
    const double want = testsupport::grid_min_pace_weight(loss, lambda);
    CHECK(std::abs(got - want) < 1e-3);
    CHECK(testsupport::pace_objective(got, loss, lambda) <=
          testsupport::pace_objective(want, loss, lambda) + 1e-6);
  }
}

TEST_CASE("weights are monotone in the threshold and the loss, and stay in range") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10000; ++trial) {
    const double l1 = uniform_unit(rng);
    const double l2 = uniform_unit(rng);
    const double a = 0.01 + uniform_unit(rng);
    const double b = 0.01 + uniform_unit(rng);
    Vector x(1);

    x << l1;
    const double v_small = update_weights(x, std::min(a, b))(0);
    const double v_large = update_weights(x, std::max(a, b))(0);
    CHECK(v_small <= v_large);

    x << std::min(l1, l2);
    const double v_easy = update_weights(x, a)(0);
    x << std::max(l1, l2);
    const double v_hard = update_weights(x, a)(0);
    CHECK(v_easy >= v_hard);

    CHECK(v_small >= 0.0);
    CHECK(v_large <= 1.0);
  }
}

TEST_CASE("a threshold above every clamped loss admits every sample") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    Vector losses(8);
    for (int i = 0; i < 8; ++i) losses(i) = uniform_unit(rng);
    const double lambda = 1.0 + 1e-9 + uniform_unit(rng);
    CHECK((update_weights(losses, lambda).array() > 0.0).all());
  }
}

TEST_CASE("invalid inputs are rejected") {
  CHECK_THROWS_AS(update_weights(Vector::Zero(1), 0.0), NonPositiveLambda);
  CHECK_THROWS_AS(update_weights(Vector::Zero(1), -1.0), NonPositiveLambda);
  CHECK_THROWS_AS(regularizer_value(Vector::Ones(1), 0.0), NonPositiveLambda);
  Vector bad(1);
  bad << -0.5;
  CHECK_THROWS_AS(update_weights(bad, 0.5), Error);
}

TEST_CASE("pace schedule counts stages of the growth loop") {
  PaceSchedule s;
  CHECK(s.stage_count() == 11);  // 0.6 * 1.05^k <= 1 holds for k = 0..10
  s.lambda0 = 2.0;
  CHECK(s.stage_count() == 1);  // degenerate: starts above lambda_max
  s = PaceSchedule{1.0, 2.0, 1.0};
  CHECK(s.stage_count() == 1);
}
