#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sppll/types.hpp"

namespace sppll {

/// Per-class instance quotas derived from candidate-set frequencies. Always
/// sums to n.
struct PriorCounts {
  std::vector<int> n_p;  // one non-negative count per class

  int q() const { return static_cast<int>(n_p.size()); }
  long long total() const;
};

// PLC text format (UTF-8, LF line endings):
//   line 1:        n d q            space-separated positive integers
//   lines 2..n+1:  f1,f2,...,fd|l1,l2,...,lk[|t]
// Features are decimal reals (up to 17 significant digits). Candidate labels
// are 1-based and strictly increasing within a line. The optional trailing
// field t is the true label; either every line carries it or none does.

PartialLabelDataset parse_dataset(std::istream& in);
PartialLabelDataset load_dataset(const std::string& path);

void write_dataset(const PartialLabelDataset& dataset, std::ostream& out);
void save_dataset(const PartialLabelDataset& dataset, const std::string& path);

/// Synthetic candidate-set corruption of a fully supervised dataset:
/// round(p*n) instances, drawn uniformly without replacement, each receive r
/// distinct false labels drawn uniformly from the q-1 labels other than the
/// true one. All other instances keep their singleton sets; the truth column
/// is preserved.
///
/// Reproducibility contract: the generator is std::mt19937_64 seeded with
/// `seed`, consumed through rejection-sampled bounded draws; corrupted
/// instances are selected by a partial Fisher-Yates pass, then processed in
/// ascending instance order, each drawing its false labels by a partial
/// Fisher-Yates pass over the non-true labels in ascending label order.
PartialLabelDataset corrupt_labels(const PartialLabelDataset& supervised, double p, int r,
                                   std::uint64_t seed);

/// Class quotas: nhat_p = sum_i [p in S_i]/|S_i| is floored per class and the
/// leftover n - sum(floors) is distributed to the classes with the largest
/// fractional parts, ties broken toward the smaller class index. Fractional
/// parts are compared exactly (integer arithmetic over a common denominator)
/// whenever that fits 64 bits.
PriorCounts class_prior_counts(const PartialLabelDataset& dataset);

}  // namespace sppll
