#pragma once

#include "sppll/types.hpp"

namespace sppll {

/// Geometric pace schedule: lambda starts at lambda0 and grows by factor mu
/// after each stage; the curriculum runs while lambda <= lambda_max and always
/// executes at least one stage.
struct PaceSchedule {
  double lambda0 = 0.6;
  double mu = 1.05;
  double lambda_max = 1.0;

  void validate_or_throw() const;
  int stage_count() const;
};

/// Closed-form pace weights: v_i = 1 - L_i/lambda when L_i <= lambda, else 0.
/// Minimizes v*L + (lambda/2)(v^2 - 2v) over v in [0,1], elementwise.
Vector update_weights(const Vector& losses, double lambda);

/// Soft pace penalty sum_i (lambda/2)*(v_i^2 - 2 v_i).
double regularizer_value(const Vector& v, double lambda);

}  // namespace sppll
