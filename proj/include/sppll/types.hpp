#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sppll {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct CountMismatch : Error { using Error::Error; };
struct NotSupervised : Error { using Error::Error; };
struct RTooLarge : Error { using Error::Error; };
struct NonPositiveLambda : Error { using Error::Error; };
struct NoGroundTruth : Error { using Error::Error; };
struct TooFewInstances : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

struct ParseError : Error {
  ParseError(int line_, const std::string& reason)
      : Error("line " + std::to_string(line_) + ": " + reason), line(line_) {}
  int line;
};

/// Partially labeled training data: n instances with d features each, a
/// candidate label set per instance, and optionally the hidden ground truth
/// (used for evaluation only). Labels are 1-based throughout; candidate sets
/// are stored strictly increasing.
struct PartialLabelDataset {
  Matrix features;                           // n x d
  std::vector<std::vector<int>> candidates;  // per-instance subsets of {1..q}
  std::optional<std::vector<int>> truth;     // per-instance label in the candidate set
  int q = 0;

  int n() const { return static_cast<int>(features.rows()); }
  int d() const { return static_cast<int>(features.cols()); }

  // truth present and every candidate set is exactly {truth[i]}
  bool supervised() const;
};

enum class ValidationErrorKind {
  EmptyCandidateSet,
  LabelOutOfRange,
  TruthNotInCandidates,
  NonFiniteFeature,
};

struct ValidationIssue {
  ValidationErrorKind kind{};
  int instance = -1;  // 0-based index of the offending instance
  int feature = -1;   // 0-based column, NonFiniteFeature only
  std::string message() const;
};

/// nullopt iff every dataset invariant holds; otherwise the first violation
/// in instance order.
std::optional<ValidationIssue> validate(const PartialLabelDataset& dataset);

struct ValidationError : Error {
  explicit ValidationError(const ValidationIssue& issue_);
  ValidationIssue issue;
};

void validate_or_throw(const PartialLabelDataset& dataset);

/// Linear multi-class scorer: score of class p on x is weights.row(p-1)*x + biases[p-1].
struct LinearModel {
  Matrix weights;  // q x d, one row per class
  Vector biases;   // q

  int q() const { return static_cast<int>(weights.rows()); }
  int d() const { return static_cast<int>(weights.cols()); }
};

LinearModel zero_model(int q, int d);

/// Curriculum state: per-instance admission weights, the pace threshold, and
/// the current loss-term scale.
struct SelfPacedState {
  Vector v;           // entries in [0,1]
  double lambda = 0;  // > 0
  double C = 0;       // > 0
};

struct Assignment {
  std::vector<int> y;  // assigned labels, 1-based
  int violations = 0;  // instances whose assigned label is outside their candidate set
};

struct TrainConfig {
  double C_init = 0.01;
  double C_max = 10.0;
  double Delta = 0.5;       // loss-scale growth: C <- min((1+Delta)*C, C_max)
  double lambda0 = 0.6;
  double mu = 1.05;         // pace growth: lambda <- mu*lambda
  double lambda_max = 1.0;  // curriculum ends once lambda would exceed this
  double delta_ofv = 1e-3;  // inner loop stops when objective improves by less
  double bigM = 1e6;        // assignment cost of non-candidate cells
  double svm_tol = 1e-4;    // margin solver stopping tolerance (max KKT violation)
  int svm_max_iter = 1000;  // margin solver sweep budget
  std::uint64_t seed = 0;

  bool self_paced = true;              // false: weights pinned to 1, one pace stage per C stage
  bool standardize = true;             // z-score features with training statistics
  bool warm_start = true;              // reuse solver state across trainer iterations
  bool reset_pace_per_c_stage = true;  // restart lambda and v at every C stage
  int inner_max_iter = 50;             // hard cap on inner alternating iterations

  // lambda0 > lambda_max is allowed and degenerates to a single pace stage.
  void validate_or_throw() const;
};

}  // namespace sppll
