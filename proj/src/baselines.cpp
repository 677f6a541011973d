#include "sppll/baselines.hpp"

#include <algorithm>
#include <numeric>

namespace sppll {

KnnIndex build_knn_index(const PartialLabelDataset& train, int k) {
  validate_or_throw(train);
  if (k < 1) throw Error("k must be positive");
  if (k > train.n()) throw TooFewInstances("k exceeds the number of training instances");
  return KnnIndex{train.features, train.candidates, train.q, k};
}

int plknn_predict(const KnnIndex& index, const Eigen::Ref<const Vector>& x) {
  const int n = static_cast<int>(index.features.rows());
  if (x.size() != index.features.cols()) {
    throw DimensionMismatch("feature size does not match index");
  }

  const Vector dist = (index.features.rowwise() - x.transpose()).rowwise().squaredNorm();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + index.k, order.end(), [&](int a, int b) {
    if (dist(a) != dist(b)) return dist(a) < dist(b);
    return a < b;
  });

  std::vector<int> votes(static_cast<std::size_t>(index.q), 0);
  for (int r = 0; r < index.k; ++r) {
    for (int label : index.candidates[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])]) {
      votes[static_cast<std::size_t>(label - 1)] += 1;
    }
  }
  int best = 0;
  for (int p = 1; p < index.q; ++p) {
    if (votes[static_cast<std::size_t>(p)] > votes[static_cast<std::size_t>(best)]) best = p;
  }
  return best + 1;
}

FitResult m3pl_fit(const PartialLabelDataset& dataset, const TrainConfig& config) {
  TrainConfig cfg = config;
  cfg.self_paced = false;
  return fit(dataset, cfg);
}

}  // namespace sppll
