#include "sppll/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "sppll/label_assignment.hpp"
#include "sppll/losses.hpp"
#include "sppll/rng.hpp"
#include "sppll/self_paced.hpp"

namespace sppll {

namespace {

ObjectiveTerms objective_terms_impl(const Matrix& scores, const LinearModel& model,
                                    const std::vector<int>& y, const Vector& v, double C,
                                    double lambda) {
  ObjectiveTerms terms;
  const Vector losses = clamped_losses_from_scores(scores, y);
  terms.weighted_loss = C * v.dot(losses);
  terms.regularizer = 0.5 * (model.weights.squaredNorm() + model.biases.squaredNorm());
  terms.pace_penalty = regularizer_value(v, lambda);
  return terms;
}

}  // namespace

ObjectiveTerms objective_terms(const LinearModel& model, const PartialLabelDataset& dataset,
                               const Assignment& y, const Vector& v, double C, double lambda) {
  if (model.q() != dataset.q || model.d() != dataset.d()) {
    throw DimensionMismatch("model dimensions do not match dataset");
  }
  if (static_cast<int>(y.y.size()) != dataset.n() || v.size() != dataset.n()) {
    throw DimensionMismatch("assignment or weight size does not match dataset");
  }
  return objective_terms_impl(decision_scores(model, dataset.features), model, y.y, v, C, lambda);
}

double objective_value(const LinearModel& model, const PartialLabelDataset& dataset,
                       const Assignment& y, const Vector& v, double C, double lambda) {
  return objective_terms(model, dataset, y, v, C, lambda).total();
}

Standardization fit_standardization(const Matrix& X) {
  Standardization s;
  const double n = static_cast<double>(X.rows());
  s.mean = X.colwise().mean();
  s.scale = ((X.rowwise() - s.mean.transpose()).array().square().colwise().sum() / n)
                .sqrt()
                .transpose();
  for (Eigen::Index j = 0; j < s.scale.size(); ++j) {
    if (s.scale(j) < 1e-12) s.scale(j) = 1.0;
  }
  return s;
}

Matrix apply_standardization(const Standardization& s, const Matrix& X) {
  return (X.rowwise() - s.mean.transpose()).array().rowwise() / s.scale.transpose().array();
}

namespace {

// The initial balanced assignment is totally degenerate: every
// candidate-respecting assignment with the right quotas has the same total
// cost (each column's candidate cells are all 1/|S_i|). Seeded jitter far
// below any real cost difference picks a random optimal vertex; a structured
// tie-break here can produce an assignment whose hinge subgradients cancel,
// from which the margin solver cannot move.
Assignment initial_assignment(const PartialLabelDataset& dataset, const PriorCounts& counts,
                              const TrainConfig& config) {
  CostMatrix costs = init_cost_matrix(dataset, config.bigM);
  std::mt19937_64 rng(derive_seed(config.seed, 0xA11CE));
  for (int i = 0; i < dataset.n(); ++i) {
    for (int label : dataset.candidates[static_cast<std::size_t>(i)]) {
      costs.c(label - 1, i) += 1e-9 * uniform_unit(rng);
    }
  }
  return solve_assignment(costs, Vector::Ones(dataset.n()), counts);
}

// True when every column's candidate cells are (numerically) tied, i.e. the
// cost matrix carries no preference among candidate labels.
bool candidate_costs_tied(const CostMatrix& costs,
                          const std::vector<std::vector<int>>& candidates) {
  for (int i = 0; i < costs.n(); ++i) {
    const auto& set = candidates[static_cast<std::size_t>(i)];
    double lo = costs.c(set.front() - 1, i);
    double hi = lo;
    for (int label : set) {
      lo = std::min(lo, costs.c(label - 1, i));
      hi = std::max(hi, costs.c(label - 1, i));
    }
    if (hi - lo > 1e-12) return false;
  }
  return true;
}

LinearModel fold_back_standardization(const LinearModel& model, const Standardization& s) {
  LinearModel out = model;
  for (int p = 0; p < model.q(); ++p) {
    double shift = 0;
    for (int j = 0; j < model.d(); ++j) {
      out.weights(p, j) = model.weights(p, j) / s.scale(j);
      shift += model.weights(p, j) * s.mean(j) / s.scale(j);
    }
    out.biases(p) = model.biases(p) - shift;
  }
  return out;
}

}  // namespace

FitResult fit(const PartialLabelDataset& dataset, const TrainConfig& config) {
  validate_or_throw(dataset);
  config.validate_or_throw();

  const int n = dataset.n();
  const int q = dataset.q;

  FitResult result;
  Matrix X = dataset.features;
  if (config.standardize) {
    result.standardization = fit_standardization(X);
    X = apply_standardization(*result.standardization, X);
  }

  const PriorCounts counts = class_prior_counts(dataset);

  Vector v = Vector::Ones(n);
  double lambda = config.lambda0;
  double C = config.C_init;

  Assignment assign = initial_assignment(dataset, counts, config);
  LinearModel model = zero_model(q, dataset.d());

  DualState warm_state;
  bool have_warm = false;
  std::uint64_t solver_call = 0;

  do {
    C = std::min((1.0 + config.Delta) * C, config.C_max);
    if (config.self_paced && config.reset_pace_per_c_stage) {
      lambda = config.lambda0;
      v = Vector::Ones(n);
    }

    do {
      StageRecord record;
      record.C = C;
      record.lambda = lambda;

      Matrix scores = decision_scores(model, X);
      double ofv = objective_terms_impl(scores, model, assign.y, v, C, lambda).total();
      record.inner_ofvs.push_back(ofv);

      int iter = 0;
      while (true) {
        if (iter >= config.inner_max_iter) {
          record.cap_hit = true;
          break;
        }
        const double ofv_old = ofv;

        // The margin step minimizes the unclamped-hinge surrogate, so it can
        // raise the clamped objective; such a step is rejected and the
        // pre-step iterate kept (the improvement test below would terminate
        // the loop here regardless).
        const LinearModel model_before = model;
        const Assignment assign_before = assign;
        const DualState warm_before = warm_state;

        TrainConfig solver_cfg = config;
        solver_cfg.seed = derive_seed(config.seed, ++solver_call);
        McSvmResult solved = train_weighted_mcsvm(X, assign.y, q, v, C, solver_cfg,
                                                  have_warm ? &warm_state : nullptr);
        model = std::move(solved.model);
        warm_state = std::move(solved.state);
        have_warm = true;
        if (!solved.status.converged) result.trace.solver_nonconverged += 1;

        scores = decision_scores(model, X);
        const CostMatrix costs = cost_matrix_from_scores(scores, dataset.candidates, config.bigM);
        // An uninformative cost matrix ties every feasible assignment; keep
        // the incumbent (itself an optimum) rather than churning the labels.
        if (assign.violations != 0 || !candidate_costs_tied(costs, dataset.candidates)) {
          assign = solve_assignment(costs, v, counts);
        }

        ofv = objective_terms_impl(scores, model, assign.y, v, C, lambda).total();
        if (ofv > ofv_old + 1e-9 * (1.0 + std::abs(ofv_old))) {
          model = model_before;
          assign = assign_before;
          warm_state = warm_before;
          scores = decision_scores(model, X);
          ofv = ofv_old;
          record.step_rejected = true;
          break;
        }
        ++iter;
        record.inner_ofvs.push_back(ofv);
        if (ofv_old - ofv < config.delta_ofv) break;
      }
      record.inner_iterations = iter;
      record.ofv = ofv;
      record.assignment_violations = assign.violations;

      if (config.self_paced) {
        v = update_weights(clamped_losses_from_scores(scores, assign.y), lambda);
      }
      record.admitted_fraction =
          n > 0 ? static_cast<double>((v.array() > 0.0).count()) / static_cast<double>(n) : 0.0;
      result.trace.stages.push_back(std::move(record));

      if (config.self_paced) lambda *= config.mu;
    } while (config.self_paced && lambda <= config.lambda_max);

    if (config.self_paced && !config.reset_pace_per_c_stage) lambda = std::min(lambda, config.lambda_max);
  } while (C < config.C_max);

  result.model = result.standardization ? fold_back_standardization(model, *result.standardization)
                                        : std::move(model);
  return result;
}

double accuracy(const LinearModel& model, const PartialLabelDataset& dataset) {
  if (!dataset.truth) throw NoGroundTruth("accuracy requires ground truth");
  const std::vector<int> pred = predict_all(model, dataset.features);
  int hits = 0;
  for (int i = 0; i < dataset.n(); ++i) {
    if (pred[static_cast<std::size_t>(i)] == (*dataset.truth)[static_cast<std::size_t>(i)]) {
      ++hits;
    }
  }
  return dataset.n() > 0 ? static_cast<double>(hits) / dataset.n() : 0.0;
}

std::vector<int> stratified_folds(const std::vector<int>& truth, int folds, std::uint64_t seed) {
  if (folds < 2) throw ConfigError("folds must be >= 2");
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < static_cast<int>(truth.size()); ++i) {
    groups[truth[static_cast<std::size_t>(i)]].push_back(i);
  }
  std::mt19937_64 rng(splitmix64(seed));
  std::vector<int> fold_of(truth.size(), 0);
  int counter = 0;
  for (auto& [label, idx] : groups) {
    shuffle_in_place(rng, idx);
    for (int i : idx) fold_of[static_cast<std::size_t>(i)] = counter++ % folds;
  }
  return fold_of;
}

PartialLabelDataset subset_dataset(const PartialLabelDataset& dataset,
                                   const std::vector<int>& indices) {
  PartialLabelDataset out;
  out.q = dataset.q;
  out.features.resize(static_cast<Eigen::Index>(indices.size()), dataset.d());
  out.candidates.reserve(indices.size());
  std::vector<int> truth;
  if (dataset.truth) truth.reserve(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const int i = indices[k];
    out.features.row(static_cast<Eigen::Index>(k)) = dataset.features.row(i);
    out.candidates.push_back(dataset.candidates[static_cast<std::size_t>(i)]);
    if (dataset.truth) truth.push_back((*dataset.truth)[static_cast<std::size_t>(i)]);
  }
  if (dataset.truth) out.truth = std::move(truth);
  return out;
}

CvResult cross_validate_with(const PartialLabelDataset& dataset, int folds, std::uint64_t seed,
                             const FoldTrainer& trainer, bool parallel) {
  validate_or_throw(dataset);
  if (!dataset.truth) throw NoGroundTruth("cross-validation requires ground truth");
  if (folds < 2) throw ConfigError("folds must be >= 2");
  if (dataset.n() < folds) throw TooFewInstances("need at least as many instances as folds");

  const std::vector<int> fold_of = stratified_folds(*dataset.truth, folds, seed);

  const auto run_fold = [&](int f) {
    std::vector<int> train_idx, test_idx;
    for (int i = 0; i < dataset.n(); ++i) {
      (fold_of[static_cast<std::size_t>(i)] == f ? test_idx : train_idx).push_back(i);
    }
    const PartialLabelDataset train = subset_dataset(dataset, train_idx);
    const PartialLabelDataset test = subset_dataset(dataset, test_idx);
    const Predictor predictor = trainer(train, derive_seed(seed, static_cast<std::uint64_t>(f)));
    int hits = 0;
    for (int i = 0; i < test.n(); ++i) {
      if (predictor(test.features.row(i).transpose()) ==
          (*test.truth)[static_cast<std::size_t>(i)]) {
        ++hits;
      }
    }
    return test.n() > 0 ? static_cast<double>(hits) / test.n() : 0.0;
  };

  CvResult cv;
  cv.fold_accuracies.resize(static_cast<std::size_t>(folds));
  if (parallel) {
    std::vector<std::future<double>> futures;
    futures.reserve(static_cast<std::size_t>(folds));
    for (int f = 0; f < folds; ++f) {
      futures.push_back(std::async(std::launch::async, run_fold, f));
    }
    for (int f = 0; f < folds; ++f) {
      cv.fold_accuracies[static_cast<std::size_t>(f)] = futures[static_cast<std::size_t>(f)].get();
    }
  } else {
    for (int f = 0; f < folds; ++f) {
      cv.fold_accuracies[static_cast<std::size_t>(f)] = run_fold(f);
    }
  }

  const double mean = std::accumulate(cv.fold_accuracies.begin(), cv.fold_accuracies.end(), 0.0) /
                      static_cast<double>(folds);
  double var = 0;
  for (double a : cv.fold_accuracies) var += (a - mean) * (a - mean);
  cv.mean_accuracy = mean;
  cv.std_accuracy = std::sqrt(var / static_cast<double>(folds));
  return cv;
}

CvResult cross_validate(const PartialLabelDataset& dataset, int folds, const TrainConfig& config,
                        std::uint64_t seed, bool parallel) {
  const FoldTrainer trainer = [&config](const PartialLabelDataset& train, std::uint64_t fold_seed) {
    TrainConfig cfg = config;
    cfg.seed = fold_seed;
    FitResult fitted = fit(train, cfg);
    return Predictor([model = std::move(fitted.model)](const Eigen::Ref<const Vector>& x) {
      return predict(model, x);
    });
  };
  return cross_validate_with(dataset, folds, seed, trainer, parallel);
}

std::string trace_to_jsonl(const TrainTrace& trace) {
  std::ostringstream out;
  for (const StageRecord& s : trace.stages) {
    nlohmann::ordered_json j;
    j["C"] = s.C;
    j["lambda"] = s.lambda;
    j["ofv"] = s.ofv;
    j["inner_iterations"] = s.inner_iterations;
    j["admitted_fraction"] = s.admitted_fraction;
    j["assignment_violations"] = s.assignment_violations;
    j["cap_hit"] = s.cap_hit;
    j["step_rejected"] = s.step_rejected;
    j["inner_ofvs"] = s.inner_ofvs;
    out << j.dump() << '\n';
  }
  return out.str();
}

}  // namespace sppll
