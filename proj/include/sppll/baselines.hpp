#pragma once

#include "sppll/trainer.hpp"
#include "sppll/types.hpp"

namespace sppll {

/// Nearest-neighbour index over training instances; immutable after build.
struct KnnIndex {
  Matrix features;
  std::vector<std::vector<int>> candidates;
  int q = 0;
  int k = 0;
};

KnnIndex build_knn_index(const PartialLabelDataset& train, int k);

/// Votes of the k nearest training instances (squared Euclidean distance,
/// ties toward the smaller instance index): returns the class contained in
/// the most neighbour candidate sets, ties toward the smaller class index.
int plknn_predict(const KnnIndex& index, const Eigen::Ref<const Vector>& x);

/// Ablation of the self-paced trainer: weights pinned to one and a single
/// pace stage per C stage; otherwise identical schedules.
FitResult m3pl_fit(const PartialLabelDataset& dataset, const TrainConfig& config);

}  // namespace sppll
