#include "sppll/self_paced.hpp"

#include <cmath>

namespace sppll {

void PaceSchedule::validate_or_throw() const {
  if (!(lambda0 > 0)) throw NonPositiveLambda("lambda0 must be positive");
  if (!(lambda_max > 0)) throw NonPositiveLambda("lambda_max must be positive");
  if (!(mu > 1)) throw ConfigError("mu must exceed 1");
}

int PaceSchedule::stage_count() const {
  validate_or_throw();
  int count = 0;
  double lambda = lambda0;
  do {
    ++count;
    lambda *= mu;
  } while (lambda <= lambda_max);
  return count;
}

Vector update_weights(const Vector& losses, double lambda) {
  if (!(lambda > 0)) throw NonPositiveLambda("lambda must be positive");
  Vector v(losses.size());
  for (Eigen::Index i = 0; i < losses.size(); ++i) {
    const double loss = losses(i);
    if (!(loss >= 0) || !std::isfinite(loss)) throw Error("losses must be finite and >= 0");
    v(i) = loss <= lambda ? 1.0 - loss / lambda : 0.0;
  }
  return v;
}

double regularizer_value(const Vector& v, double lambda) {
  if (!(lambda > 0)) throw NonPositiveLambda("lambda must be positive");
  double sum = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double vi = v(i);
    if (!(vi >= 0.0 && vi <= 1.0)) throw Error("weights must lie in [0,1]");
    sum += 0.5 * lambda * (vi * vi - 2.0 * vi);
  }
  return sum;
}

}  // namespace sppll
