#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sppll/types.hpp"

namespace sppll {

struct SolverStatus {
  double objective = 0;       // primal value of the solved (bias-augmented) problem
  int iterations = 0;         // completed sweeps
  double kkt_violation = 0;   // max per-instance violation at termination
  bool converged = false;     // kkt_violation <= svm_tol
  std::vector<double> sweep_dual_objectives;  // dual value after each sweep; non-increasing
};

/// Dual variables of a previous solve, reusable as a warm start. Rows whose
/// label changed or whose cap shrank below the held dual mass are reset.
struct DualState {
  Matrix alpha;             // n x q
  std::vector<int> labels;  // 1-based labels the alphas were fit against
};

struct McSvmResult {
  LinearModel model;
  SolverStatus status;
  DualState state;
};

/// Weighted multi-class maximum-margin training: minimizes
///   C * sum_i v_i * max(0, 1 - margin_i) + 0.5 * sum_p (|w_p|^2 + b_p^2)
/// over the per-class hyperplanes, where margin_i is the score gap between
/// the assigned label and the best other label. Solved in the dual, one
/// instance block at a time (Crammer-Singer style); the weight v_i enters as
/// the per-instance cap C*v_i, and instances with v_i = 0 are never touched.
///
/// Biases are trained as an extra feature of constant value 1, so they are
/// regularized together with the weights.
McSvmResult train_weighted_mcsvm(const Matrix& X, const std::vector<int>& y, int q,
                                 const Vector& v, double C, const TrainConfig& config,
                                 const DualState* warm = nullptr);

/// Unweighted convenience wrapper (v = all ones).
McSvmResult train_mcsvm(const Matrix& X, const std::vector<int>& y, int q, double C,
                        const TrainConfig& config);

/// argmax_p (w_p . x + b_p), ties broken toward the smaller class index.
int predict(const LinearModel& model, const Eigen::Ref<const Vector>& x);

std::vector<int> predict_all(const LinearModel& model, const Matrix& X);

// Model serialization: {"q":..,"d":..,"weights":[row-major q*d],"biases":[q],
// "meta":{"C":..,"seed":..,"solver":"cs-dual",...}}. Reals round-trip exactly.
nlohmann::ordered_json model_to_json(const LinearModel& model, nlohmann::ordered_json meta);
LinearModel model_from_json(const nlohmann::json& j, nlohmann::json* meta_out = nullptr);
void save_model(const LinearModel& model, const nlohmann::ordered_json& meta,
                const std::string& path);
LinearModel load_model(const std::string& path, nlohmann::json* meta_out = nullptr);

}  // namespace sppll
