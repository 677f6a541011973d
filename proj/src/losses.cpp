#include "sppll/losses.hpp"

#include <algorithm>
#include <limits>

namespace sppll {

namespace {

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

}  // namespace

MarginReport margin_report(const LinearModel& model, const Eigen::Ref<const Vector>& x, int y) {
  if (x.size() != model.d()) throw DimensionMismatch("feature size does not match model");
  if (y < 1 || y > model.q()) throw DimensionMismatch("label out of range");

  const Vector scores = model.weights * x + model.biases;
  MarginReport r;
  r.score_true = scores(y - 1);
  r.score_best_other = -std::numeric_limits<double>::infinity();
  for (int m = 0; m < model.q(); ++m) {
    if (m == y - 1) continue;
    r.score_best_other = std::max(r.score_best_other, scores(m));
  }
  r.xi = r.score_true - r.score_best_other;
  r.hinge = std::max(0.0, 1.0 - r.xi);
  r.clamped = clamp01(r.hinge);
  return r;
}

Matrix decision_scores(const LinearModel& model, const Matrix& X) {
  if (X.cols() != model.d()) throw DimensionMismatch("feature size does not match model");
  return (X * model.weights.transpose()).rowwise() + model.biases.transpose();
}

Vector clamped_losses_from_scores(const Matrix& scores, const std::vector<int>& y) {
  const int n = static_cast<int>(scores.rows());
  const int q = static_cast<int>(scores.cols());
  if (static_cast<int>(y.size()) != n) throw DimensionMismatch("label count mismatch");

  Vector out(n);
  for (int i = 0; i < n; ++i) {
    const int yi = y[static_cast<std::size_t>(i)] - 1;
    if (yi < 0 || yi >= q) throw DimensionMismatch("label out of range");
    double best_other = -std::numeric_limits<double>::infinity();
    for (int m = 0; m < q; ++m) {
      if (m != yi) best_other = std::max(best_other, scores(i, m));
    }
    out(i) = clamp01(1.0 - (scores(i, yi) - best_other));
  }
  return out;
}

Matrix clamped_loss_matrix_from_scores(const Matrix& scores) {
  const int n = static_cast<int>(scores.rows());
  const int q = static_cast<int>(scores.cols());
  Matrix out(q, n);
  for (int i = 0; i < n; ++i) {
    // Top two scores give max over "all other classes" for every class at once.
    double top1 = -std::numeric_limits<double>::infinity();
    double top2 = -std::numeric_limits<double>::infinity();
    int arg1 = 0;
    for (int m = 0; m < q; ++m) {
      const double s = scores(i, m);
      if (s > top1) {
        top2 = top1;
        top1 = s;
        arg1 = m;
      } else if (s > top2) {
        top2 = s;
      }
    }
    for (int m = 0; m < q; ++m) {
      const double best_other = (m == arg1) ? top2 : top1;
      out(m, i) = clamp01(1.0 - (scores(i, m) - best_other));
    }
  }
  return out;
}

}  // namespace sppll
