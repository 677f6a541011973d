#pragma once

#include "sppll/data_io.hpp"
#include "sppll/types.hpp"

namespace sppll {

inline constexpr double kDefaultBigM = 1e6;

/// Per-(class, instance) assignment costs. Candidate cells hold a loss in
/// [0,1]; non-candidate cells hold exactly bigM.
struct CostMatrix {
  Matrix c;  // q x n
  double bigM = kDefaultBigM;

  int q() const { return static_cast<int>(c.rows()); }
  int n() const { return static_cast<int>(c.cols()); }
};

/// Model-free initialization: candidate cells get 1/|S_i|.
CostMatrix init_cost_matrix(const PartialLabelDataset& dataset, double bigM = kDefaultBigM);

/// Candidate cells get the clamped loss of assigning that class under the
/// current model.
CostMatrix build_cost_matrix(const LinearModel& model, const PartialLabelDataset& dataset,
                             double bigM = kDefaultBigM);

/// Same, from a precomputed n x q score matrix.
CostMatrix cost_matrix_from_scores(const Matrix& scores,
                                   const std::vector<std::vector<int>>& candidates, double bigM);

/// Minimize sum_i v_i * c(y_i, i) over assignments where every instance gets
/// exactly one class and class p gets exactly counts.n_p[p-1] instances.
///
/// Solved as a transportation problem by successive shortest augmenting paths
/// with node potentials; the optimum of the relaxation is attained at an
/// integral vertex and that is what is returned.
///
/// Costs are lexicographic: ties in the weighted objective are resolved by
/// the raw cell cost, so zero-weight instances (whose weighted cost vanishes
/// everywhere) still land on candidate cells whenever the quotas allow it.
/// Remaining ties prefer the smaller class index, then the smaller instance
/// index; instances are augmented in ascending order, so runs are
/// bit-reproducible.
Assignment solve_assignment(const CostMatrix& costs, const Vector& v, const PriorCounts& counts);

}  // namespace sppll
