#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sppll/data_io.hpp"
#include "sppll/margin_solver.hpp"
#include "sppll/types.hpp"

namespace sppll {

/// One record per (C, lambda) stage of training.
struct StageRecord {
  double C = 0;
  double lambda = 0;
  double ofv = 0;                  // objective value at the end of the stage's inner loop
  int inner_iterations = 0;        // alternating iterations run in this stage
  double admitted_fraction = 0;    // share of v_i > 0 after the stage's weight update
  int assignment_violations = 0;   // non-candidate assignments at stage end
  bool cap_hit = false;            // inner loop stopped by the iteration cap
  bool step_rejected = false;      // final margin step raised the objective and was reverted
  std::vector<double> inner_ofvs;  // objective at stage start and after each accepted iteration
};

struct TrainTrace {
  std::vector<StageRecord> stages;
  int solver_nonconverged = 0;  // margin-solver calls that exhausted their sweep budget
};

/// The three objective terms: C-weighted clamped losses, the quadratic model
/// regularizer (weights and biases), and the pace penalty.
struct ObjectiveTerms {
  double weighted_loss = 0;
  double regularizer = 0;
  double pace_penalty = 0;
  double total() const { return weighted_loss + regularizer + pace_penalty; }
};

ObjectiveTerms objective_terms(const LinearModel& model, const PartialLabelDataset& dataset,
                               const Assignment& y, const Vector& v, double C, double lambda);
double objective_value(const LinearModel& model, const PartialLabelDataset& dataset,
                       const Assignment& y, const Vector& v, double C, double lambda);

/// Per-feature affine map fitted on training data; applied before training
/// and folded back into the returned model.
struct Standardization {
  Vector mean;
  Vector scale;
};

struct FitResult {
  LinearModel model;  // in the original (unstandardized) feature space
  TrainTrace trace;
  std::optional<Standardization> standardization;
};

/// Full training loop: class quotas and an initial balanced assignment, then
/// an outer schedule growing C by (1+Delta) up to C_max (one final pass at
/// C_max), an inner pace curriculum growing lambda by mu up to lambda_max,
/// and innermost alternation between the weighted margin solver and the
/// balanced assignment until the objective improvement drops below delta_ofv
/// (hard-capped). After each pace stage the weights v are recomputed from the
/// current clamped losses. With config.self_paced = false, v stays at 1 and
/// each C stage runs exactly one pace stage.
FitResult fit(const PartialLabelDataset& dataset, const TrainConfig& config);

/// Fraction of instances whose prediction matches the ground truth.
double accuracy(const LinearModel& model, const PartialLabelDataset& dataset);

struct CvResult {
  double mean_accuracy = 0;
  double std_accuracy = 0;  // population standard deviation
  std::vector<double> fold_accuracies;
};

/// Deterministic stratified fold split: instances grouped by true label,
/// shuffled by the seeded generator, dealt round-robin.
std::vector<int> stratified_folds(const std::vector<int>& truth, int folds, std::uint64_t seed);

PartialLabelDataset subset_dataset(const PartialLabelDataset& dataset,
                                   const std::vector<int>& indices);

/// A fold trainer maps (training split, fold seed) to a predictor.
using Predictor = std::function<int(const Eigen::Ref<const Vector>&)>;
using FoldTrainer = std::function<Predictor(const PartialLabelDataset&, std::uint64_t)>;

/// Shared-fold cross-validation harness. Folds may run concurrently; per-fold
/// seeds derive from `seed` and the fold index, so results are independent of
/// scheduling.
CvResult cross_validate_with(const PartialLabelDataset& dataset, int folds, std::uint64_t seed,
                             const FoldTrainer& trainer, bool parallel = false);

/// Cross-validation of the self-paced trainer itself.
CvResult cross_validate(const PartialLabelDataset& dataset, int folds, const TrainConfig& config,
                        std::uint64_t seed, bool parallel = false);

/// One JSON object per stage record, newline-delimited.
std::string trace_to_jsonl(const TrainTrace& trace);

Standardization fit_standardization(const Matrix& X);
Matrix apply_standardization(const Standardization& s, const Matrix& X);

}  // namespace sppll
