#pragma once

#include "sppll/types.hpp"

namespace sppll {

/// Margin diagnostics for one (instance, label) pair. xi is the gap between
/// the scored label and the best other label; hinge = max(0, 1 - xi);
/// clamped = min(1, hinge) keeps per-sample losses in [0,1].
struct MarginReport {
  double score_true = 0;
  double score_best_other = 0;
  double xi = 0;
  double hinge = 0;
  double clamped = 0;
};

MarginReport margin_report(const LinearModel& model, const Eigen::Ref<const Vector>& x, int y);

/// Class scores for every instance: scores(i, p-1) = w_p . x_i + b_p.
Matrix decision_scores(const LinearModel& model, const Matrix& X);

/// Clamped loss of the assigned label per instance, from a precomputed score
/// matrix (n x q).
Vector clamped_losses_from_scores(const Matrix& scores, const std::vector<int>& y);

/// Clamped loss of assigning each class to each instance, as a q x n matrix,
/// from a precomputed score matrix (n x q).
Matrix clamped_loss_matrix_from_scores(const Matrix& scores);

}  // namespace sppll
