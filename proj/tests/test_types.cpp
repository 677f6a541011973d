#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <limits>

#include "sppll/types.hpp"

using namespace sppll;

namespace {

PartialLabelDataset tiny_dataset() {
  PartialLabelDataset ds;
  ds.q = 4;
  ds.features.resize(6, 2);
  ds.features << 0.0, 1.0, 1.0, 0.0, 0.5, 0.5, -1.0, 2.0, 3.0, -3.0, 0.25, 0.75;
  ds.candidates = {{1}, {2, 3}, {1, 4}, {2}, {3}, {1, 2, 3, 4}};
  ds.truth = std::vector<int>{1, 2, 4, 2, 3, 3};
  return ds;
}

}  // namespace

TEST_CASE("validate accepts a well-formed dataset") {
  CHECK_FALSE(validate(tiny_dataset()).has_value());
}

TEST_CASE("validate reports an empty candidate set with its instance") {
  auto ds = tiny_dataset();
  ds.candidates[3].clear();
  const auto issue = validate(ds);
  REQUIRE(issue.has_value());
  CHECK(issue->kind == ValidationErrorKind::EmptyCandidateSet);
  CHECK(issue->instance == 3);
}

TEST_CASE("validate accepts the fully supervised case") {
  PartialLabelDataset ds;
  ds.q = 3;
  ds.features = Matrix::Random(5, 2);
  ds.truth = std::vector<int>{1, 3, 2, 2, 1};
  for (int t : *ds.truth) ds.candidates.push_back({t});
  CHECK_FALSE(validate(ds).has_value());
  CHECK(ds.supervised());
}

TEST_CASE("validate reports truth outside the candidate set") {
  auto ds = tiny_dataset();
  (*ds.truth)[5] = 2;
  ds.candidates[5] = {1, 3};
  const auto issue = validate(ds);
  REQUIRE(issue.has_value());
  CHECK(issue->kind == ValidationErrorKind::TruthNotInCandidates);
  CHECK(issue->instance == 5);
}

TEST_CASE("validate reports out-of-range and unsorted candidate labels") {
  auto ds = tiny_dataset();
  ds.candidates[2] = {1, 7};
  auto issue = validate(ds);
  REQUIRE(issue.has_value());
  CHECK(issue->kind == ValidationErrorKind::LabelOutOfRange);
  CHECK(issue->instance == 2);

  ds = tiny_dataset();
  ds.candidates[1] = {3, 2};
  ds.truth.reset();
  issue = validate(ds);
  REQUIRE(issue.has_value());
  CHECK(issue->kind == ValidationErrorKind::LabelOutOfRange);
}

TEST_CASE("validate reports non-finite features with instance and column") {
  auto ds = tiny_dataset();
  ds.features(4, 1) = std::numeric_limits<double>::quiet_NaN();
  const auto issue = validate(ds);
  REQUIRE(issue.has_value());
  CHECK(issue->kind == ValidationErrorKind::NonFiniteFeature);
  CHECK(issue->instance == 4);
  CHECK(issue->feature == 1);
}

TEST_CASE("config validation enforces the schedule invariants") {
  TrainConfig cfg;
  CHECK_NOTHROW(cfg.validate_or_throw());

  cfg.C_init = 0.0;
  CHECK_THROWS_AS(cfg.validate_or_throw(), ConfigError);
  cfg = TrainConfig{};
  cfg.C_init = 2.0;
  cfg.C_max = 1.0;
  CHECK_THROWS_AS(cfg.validate_or_throw(), ConfigError);
  cfg = TrainConfig{};
  cfg.mu = 1.0;
  CHECK_THROWS_AS(cfg.validate_or_throw(), ConfigError);
  cfg = TrainConfig{};
  cfg.Delta = 0.0;
  CHECK_THROWS_AS(cfg.validate_or_throw(), ConfigError);

  // lambda0 above lambda_max is a legal degenerate schedule (single stage).
  cfg = TrainConfig{};
  cfg.lambda0 = 2.0;
  cfg.lambda_max = 1.0;
  CHECK_NOTHROW(cfg.validate_or_throw());
}
