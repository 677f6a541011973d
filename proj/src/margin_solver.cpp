#include "sppll/margin_solver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "sppll/rng.hpp"

namespace sppll {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAlphaEps = 1e-12;

// Exact minimizer of the per-instance dual block
//   min_a 0.5*A*sum_m a_m^2 + sum_m B_m a_m
//   s.t.  a_m <= cap for m == yi, a_m <= 0 otherwise, sum_m a_m = 0,
// by the sorted-threshold construction.
void solve_subproblem(const Eigen::VectorXd& B, double A, int yi, double cap,
                      std::vector<double>& scratch, Eigen::VectorXd& alpha_new) {
  const int q = static_cast<int>(B.size());
  scratch.assign(B.data(), B.data() + q);
  scratch[static_cast<std::size_t>(yi)] += A * cap;
  std::sort(scratch.begin(), scratch.end(), std::greater<double>());

  double beta = scratch[0] - A * cap;
  int r = 1;
  for (; r < q && beta < static_cast<double>(r) * scratch[static_cast<std::size_t>(r)]; ++r) {
    beta += scratch[static_cast<std::size_t>(r)];
  }
  beta /= static_cast<double>(r);

  for (int m = 0; m < q; ++m) {
    const double bound = (m == yi) ? cap : 0.0;
    alpha_new(m) = std::min(bound, (beta - B(m)) / A);
  }
}

}  // namespace

McSvmResult train_weighted_mcsvm(const Matrix& X, const std::vector<int>& y, int q,
                                 const Vector& v, double C, const TrainConfig& config,
                                 const DualState* warm) {
  const int n = static_cast<int>(X.rows());
  const int d = static_cast<int>(X.cols());
  if (static_cast<int>(y.size()) != n) throw DimensionMismatch("label count mismatch");
  if (static_cast<int>(v.size()) != n) throw DimensionMismatch("weight count mismatch");
  if (q < 1) throw DimensionMismatch("q must be positive");
  if (!(C > 0)) throw ConfigError("C must be positive");
  for (int i = 0; i < n; ++i) {
    if (y[static_cast<std::size_t>(i)] < 1 || y[static_cast<std::size_t>(i)] > q) {
      throw DimensionMismatch("label out of range");
    }
    if (!(v(i) >= 0.0 && v(i) <= 1.0)) throw Error("weights must lie in [0,1]");
  }

  // Bias as a constant feature; W is (d+1) x q with the bias row last.
  Matrix Xa(n, d + 1);
  Xa.leftCols(d) = X;
  Xa.col(d).setOnes();

  Vector caps(n);
  std::vector<int> active;
  active.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    caps(i) = C * v(i);
    if (caps(i) > 0) active.push_back(i);
  }

  Matrix alpha = Matrix::Zero(n, q);
  if (warm != nullptr && config.warm_start && warm->alpha.rows() == n && warm->alpha.cols() == q &&
      static_cast<int>(warm->labels.size()) == n) {
    for (int i : active) {
      const std::size_t si = static_cast<std::size_t>(i);
      if (warm->labels[si] == y[si] && warm->alpha(i, y[si] - 1) <= caps(i)) {
        alpha.row(i) = warm->alpha.row(i);
      }
    }
  }
  Matrix W = Xa.transpose() * alpha;  // (d+1) x q

  Vector qd(n);
  for (int i : active) qd(i) = Xa.row(i).squaredNorm();

  std::mt19937_64 rng(config.seed);
  std::vector<int> order = active;
  std::vector<double> scratch;
  Eigen::VectorXd g(q), alpha_new(q);

  SolverStatus status;
  status.sweep_dual_objectives.reserve(16);

  const auto dual_objective = [&]() {
    double val = 0.5 * W.squaredNorm();
    for (int i : active) val -= alpha(i, y[static_cast<std::size_t>(i)] - 1);
    return val;
  };

  bool converged = active.empty();
  double last_violation = 0.0;
  int sweeps = 0;
  while (!converged && sweeps < config.svm_max_iter) {
    shuffle_in_place(rng, order);
    double max_violation = 0.0;
    for (int i : order) {
      const int yi = y[static_cast<std::size_t>(i)] - 1;
      const double cap = caps(i);

      g.noalias() = W.transpose() * Xa.row(i).transpose();
      for (int m = 0; m < q; ++m) {
        if (m != yi) g(m) += 1.0;
      }

      double max_g = -kInf;
      double min_g = kInf;
      for (int m = 0; m < q; ++m) {
        max_g = std::max(max_g, g(m));
        const double bound = (m == yi) ? cap : 0.0;
        if (alpha(i, m) < bound) min_g = std::min(min_g, g(m));
      }
      const double violation = max_g - min_g;
      if (violation > max_violation) max_violation = violation;
      if (violation <= kAlphaEps) continue;

      const double A = qd(i);
      for (int m = 0; m < q; ++m) g(m) -= A * alpha(i, m);  // g now holds B
      solve_subproblem(g, A, yi, cap, scratch, alpha_new);

      for (int m = 0; m < q; ++m) {
        const double delta = alpha_new(m) - alpha(i, m);
        if (std::abs(delta) >= kAlphaEps) {
          W.col(m).noalias() += delta * Xa.row(i).transpose();
          alpha(i, m) = alpha_new(m);
        }
      }
    }
    ++sweeps;
    status.sweep_dual_objectives.push_back(dual_objective());
    last_violation = max_violation;
    if (max_violation <= config.svm_tol) converged = true;
  }

  status.iterations = sweeps;
  status.kkt_violation = last_violation;
  status.converged = converged;

  McSvmResult result;
  result.model.weights = W.topRows(d).transpose();
  result.model.biases = W.row(d).transpose();
  result.state.alpha = std::move(alpha);
  result.state.labels = y;

  // Primal value of the solved problem.
  double hinge_sum = 0.0;
  if (!active.empty()) {
    const Matrix scores = Xa * W;  // n x q
    for (int i : active) {
      const int yi = y[static_cast<std::size_t>(i)] - 1;
      double worst = 0.0;  // the zero branch of the hinge
      for (int m = 0; m < q; ++m) {
        if (m == yi) continue;
        worst = std::max(worst, 1.0 + scores(i, m) - scores(i, yi));
      }
      hinge_sum += v(i) * worst;
    }
  }
  status.objective = C * hinge_sum + 0.5 * W.squaredNorm();
  result.status = std::move(status);
  return result;
}

McSvmResult train_mcsvm(const Matrix& X, const std::vector<int>& y, int q, double C,
                        const TrainConfig& config) {
  return train_weighted_mcsvm(X, y, q, Vector::Ones(X.rows()), C, config);
}

int predict(const LinearModel& model, const Eigen::Ref<const Vector>& x) {
  if (x.size() != model.d()) throw DimensionMismatch("feature size does not match model");
  const Vector scores = model.weights * x + model.biases;
  int best = 0;
  for (int m = 1; m < model.q(); ++m) {
    if (scores(m) > scores(best)) best = m;
  }
  return best + 1;
}

std::vector<int> predict_all(const LinearModel& model, const Matrix& X) {
  if (X.cols() != model.d()) throw DimensionMismatch("feature size does not match model");
  const Matrix scores = (X * model.weights.transpose()).rowwise() + model.biases.transpose();
  std::vector<int> out(static_cast<std::size_t>(X.rows()));
  for (int i = 0; i < static_cast<int>(X.rows()); ++i) {
    int best = 0;
    for (int m = 1; m < model.q(); ++m) {
      if (scores(i, m) > scores(i, best)) best = m;
    }
    out[static_cast<std::size_t>(i)] = best + 1;
  }
  return out;
}

nlohmann::ordered_json model_to_json(const LinearModel& model, nlohmann::ordered_json meta) {
  nlohmann::ordered_json j;
  j["q"] = model.q();
  j["d"] = model.d();
  std::vector<double> w;
  w.reserve(static_cast<std::size_t>(model.q()) * static_cast<std::size_t>(model.d()));
  for (int p = 0; p < model.q(); ++p) {
    for (int k = 0; k < model.d(); ++k) w.push_back(model.weights(p, k));
  }
  j["weights"] = w;
  j["biases"] = std::vector<double>(model.biases.data(), model.biases.data() + model.q());
  if (!meta.contains("solver")) meta["solver"] = "cs-dual";
  j["meta"] = std::move(meta);
  return j;
}

LinearModel model_from_json(const nlohmann::json& j, nlohmann::json* meta_out) {
  const int q = j.at("q").get<int>();
  const int d = j.at("d").get<int>();
  const auto w = j.at("weights").get<std::vector<double>>();
  const auto b = j.at("biases").get<std::vector<double>>();
  if (static_cast<int>(w.size()) != q * d || static_cast<int>(b.size()) != q) {
    throw Error("model json has inconsistent dimensions");
  }
  LinearModel model = zero_model(q, d);
  for (int p = 0; p < q; ++p) {
    for (int k = 0; k < d; ++k) model.weights(p, k) = w[static_cast<std::size_t>(p * d + k)];
  }
  for (int p = 0; p < q; ++p) model.biases(p) = b[static_cast<std::size_t>(p)];
  if (meta_out != nullptr && j.contains("meta")) *meta_out = j.at("meta");
  return model;
}

void save_model(const LinearModel& model, const nlohmann::ordered_json& meta,
                const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << model_to_json(model, meta).dump(2) << '\n';
  if (!out) throw IoError("write to '" + path + "' failed");
}

LinearModel load_model(const std::string& path, nlohmann::json* meta_out) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  nlohmann::json j;
  in >> j;
  return model_from_json(j, meta_out);
}

}  // namespace sppll
