#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>

#include "sppll/baselines.hpp"
#include "sppll/rng.hpp"
#include "support/blobs.hpp"

using namespace sppll;

namespace {

PartialLabelDataset line_dataset(const std::vector<double>& xs,
                                 const std::vector<std::vector<int>>& sets, int q) {
  PartialLabelDataset ds;
  ds.q = q;
  ds.features.resize(static_cast<Eigen::Index>(xs.size()), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) ds.features(static_cast<Eigen::Index>(i), 0) = xs[i];
  ds.candidates = sets;
  return ds;
}

}  // namespace

TEST_CASE("k=1 returns the single neighbour's candidate") {
  const auto ds = line_dataset({0.0, 5.0}, {{3}, {1}}, 3);
  const auto index = build_knn_index(ds, 1);
  Vector x(1);
  x << 0.4;
  CHECK(plknn_predict(index, x) == 3);
}

TEST_CASE("k=3 counts candidate votes") {
  const auto ds = line_dataset({0.0, 0.1, 0.2, 9.0}, {{1, 2}, {2}, {2, 3}, {1}}, 3);
  const auto index = build_knn_index(ds, 3);
  Vector x(1);
  x << 0.1;
  CHECK(plknn_predict(index, x) == 2);  // three votes for class 2
}

TEST_CASE("tied votes go to the smaller class index") {
  const auto ds = line_dataset({0.0, 0.1, 0.2}, {{1, 2}, {1, 2}, {1, 2}}, 2);
  const auto index = build_knn_index(ds, 3);
  Vector x(1);
  x << 0.0;
  CHECK(plknn_predict(index, x) == 1);
}

TEST_CASE("prediction lies in the union of neighbour candidate sets") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 5 + static_cast<int>(uniform_below(rng, 20));
    const int q = 2 + static_cast<int>(uniform_below(rng, 5));
    PartialLabelDataset ds;
    ds.q = q;
    ds.features.resize(n, 2);
    for (int i = 0; i < n; ++i) {
      ds.features(i, 0) = uniform_unit(rng) * 10;
      ds.features(i, 1) = uniform_unit(rng) * 10;
      std::vector<int> set;
      for (int label = 1; label <= q; ++label) {
        if (uniform_unit(rng) < 0.5) set.push_back(label);
      }
      if (set.empty()) set.push_back(1 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(q))));
      ds.candidates.push_back(std::move(set));
    }
    const int k = 1 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(n)));
    const auto index = build_knn_index(ds, k);

    Vector x(2);
    x << uniform_unit(rng) * 10, uniform_unit(rng) * 10;
    const int pred = plknn_predict(index, x);
    CHECK(pred >= 1);
    CHECK(pred <= q);

    // The winner must be a candidate of at least one neighbour; with k = n
    // the union spans all instances.
    if (k == n) {
      std::set<int> all;
      for (const auto& set : ds.candidates) all.insert(set.begin(), set.end());
      CHECK(all.count(pred) == 1);
    }
  }
}

TEST_CASE("knn index construction rejects bad k") {
  const auto ds = line_dataset({0.0, 1.0}, {{1}, {2}}, 2);
  CHECK_THROWS_AS(build_knn_index(ds, 0), Error);
  CHECK_THROWS_AS(build_knn_index(ds, 3), TooFewInstances);
}

TEST_CASE("knn separates clean blobs") {
  const auto ds = testsupport::make_blobs(90, 2, 3, 5);
  const auto index = build_knn_index(ds, 10);
  int hits = 0;
  for (int i = 0; i < ds.n(); ++i) {
    if (plknn_predict(index, ds.features.row(i).transpose()) ==
        (*ds.truth)[static_cast<std::size_t>(i)]) {
      ++hits;
    }
  }
  CHECK(static_cast<double>(hits) / ds.n() > 0.85);
}
