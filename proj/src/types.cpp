#include "sppll/types.hpp"

#include <algorithm>
#include <cmath>

namespace sppll {

bool PartialLabelDataset::supervised() const {
  if (!truth) return false;
  const auto& t = *truth;
  if (static_cast<int>(t.size()) != n()) return false;
  for (int i = 0; i < n(); ++i) {
    if (candidates[static_cast<std::size_t>(i)].size() != 1 ||
        candidates[static_cast<std::size_t>(i)][0] != t[static_cast<std::size_t>(i)]) {
      return false;
    }
  }
  return true;
}

std::string ValidationIssue::message() const {
  switch (kind) {
    case ValidationErrorKind::EmptyCandidateSet:
      return "empty candidate set at instance " + std::to_string(instance);
    case ValidationErrorKind::LabelOutOfRange:
      return "candidate label out of range at instance " + std::to_string(instance);
    case ValidationErrorKind::TruthNotInCandidates:
      return "true label not in candidate set at instance " + std::to_string(instance);
    case ValidationErrorKind::NonFiniteFeature:
      return "non-finite feature at instance " + std::to_string(instance) + ", column " +
             std::to_string(feature);
  }
  return "unknown validation issue";
}

ValidationError::ValidationError(const ValidationIssue& issue_)
    : Error(issue_.message()), issue(issue_) {}

std::optional<ValidationIssue> validate(const PartialLabelDataset& dataset) {
  const int n = dataset.n();
  if (static_cast<int>(dataset.candidates.size()) != n) {
    throw DimensionMismatch("candidate list size does not match feature rows");
  }
  if (dataset.truth && static_cast<int>(dataset.truth->size()) != n) {
    throw DimensionMismatch("truth size does not match feature rows");
  }
  if (dataset.q <= 0) throw DimensionMismatch("q must be positive");

  for (int i = 0; i < n; ++i) {
    const auto& set = dataset.candidates[static_cast<std::size_t>(i)];
    if (set.empty()) {
      return ValidationIssue{ValidationErrorKind::EmptyCandidateSet, i, -1};
    }
    int prev = 0;
    for (int label : set) {
      if (label < 1 || label > dataset.q || label <= prev) {
        return ValidationIssue{ValidationErrorKind::LabelOutOfRange, i, -1};
      }
      prev = label;
    }
    if (dataset.truth) {
      const int t = (*dataset.truth)[static_cast<std::size_t>(i)];
      if (!std::binary_search(set.begin(), set.end(), t)) {
        return ValidationIssue{ValidationErrorKind::TruthNotInCandidates, i, -1};
      }
    }
    for (int j = 0; j < dataset.d(); ++j) {
      if (!std::isfinite(dataset.features(i, j))) {
        return ValidationIssue{ValidationErrorKind::NonFiniteFeature, i, j};
      }
    }
  }
  return std::nullopt;
}

void validate_or_throw(const PartialLabelDataset& dataset) {
  if (auto issue = validate(dataset)) throw ValidationError(*issue);
}

LinearModel zero_model(int q, int d) {
  LinearModel m;
  m.weights = Matrix::Zero(q, d);
  m.biases = Vector::Zero(q);
  return m;
}

void TrainConfig::validate_or_throw() const {
  if (!(C_init > 0) || !(C_init <= C_max)) throw ConfigError("require 0 < C_init <= C_max");
  if (!(Delta > 0)) throw ConfigError("require Delta > 0");
  if (!(mu > 1)) throw ConfigError("require mu > 1");
  if (!(lambda0 > 0)) throw ConfigError("require lambda0 > 0");
  if (!(lambda_max > 0)) throw ConfigError("require lambda_max > 0");
  if (!(delta_ofv > 0)) throw ConfigError("require delta_ofv > 0");
  if (!(bigM > 1)) throw ConfigError("require bigM > 1");
  if (!(svm_tol > 0)) throw ConfigError("require svm_tol > 0");
  if (svm_max_iter < 1) throw ConfigError("require svm_max_iter >= 1");
  if (inner_max_iter < 1) throw ConfigError("require inner_max_iter >= 1");
}

}  // namespace sppll
