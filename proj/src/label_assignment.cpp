#include "sppll/label_assignment.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <tuple>
#include <vector>

#include "sppll/losses.hpp"

namespace sppll {

CostMatrix init_cost_matrix(const PartialLabelDataset& dataset, double bigM) {
  validate_or_throw(dataset);
  CostMatrix cm;
  cm.bigM = bigM;
  cm.c = Matrix::Constant(dataset.q, dataset.n(), bigM);
  for (int i = 0; i < dataset.n(); ++i) {
    const auto& set = dataset.candidates[static_cast<std::size_t>(i)];
    const double share = 1.0 / static_cast<double>(set.size());
    for (int label : set) cm.c(label - 1, i) = share;
  }
  return cm;
}

CostMatrix cost_matrix_from_scores(const Matrix& scores,
                                   const std::vector<std::vector<int>>& candidates, double bigM) {
  const int n = static_cast<int>(scores.rows());
  const int q = static_cast<int>(scores.cols());
  if (static_cast<int>(candidates.size()) != n) {
    throw DimensionMismatch("candidate list size does not match score rows");
  }
  const Matrix losses = clamped_loss_matrix_from_scores(scores);
  CostMatrix cm;
  cm.bigM = bigM;
  cm.c = Matrix::Constant(q, n, bigM);
  for (int i = 0; i < n; ++i) {
    for (int label : candidates[static_cast<std::size_t>(i)]) {
      cm.c(label - 1, i) = losses(label - 1, i);
    }
  }
  return cm;
}

CostMatrix build_cost_matrix(const LinearModel& model, const PartialLabelDataset& dataset,
                             double bigM) {
  validate_or_throw(dataset);
  if (model.q() != dataset.q || model.d() != dataset.d()) {
    throw DimensionMismatch("model dimensions do not match dataset");
  }
  return cost_matrix_from_scores(decision_scores(model, dataset.features), dataset.candidates,
                                 bigM);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lexicographic edge cost: the weighted objective first, the raw cell cost as
// a tie-breaker. The secondary component keeps zero-weight instances on
// candidate cells (their weighted cost is zero everywhere, which would
// otherwise defeat the bigM masking).
struct LexCost {
  double primary = 0;
  double secondary = 0;
};

inline bool lex_less(const LexCost& x, const LexCost& y) {
  if (x.primary != y.primary) return x.primary < y.primary;
  return x.secondary < y.secondary;
}

inline LexCost lex_add(const LexCost& x, const LexCost& y) {
  return {x.primary + y.primary, x.secondary + y.secondary};
}

inline LexCost lex_sub(const LexCost& x, const LexCost& y) {
  return {x.primary - y.primary, x.secondary - y.secondary};
}

// Clamp lexicographically negative values (floating drift on tight edges).
inline LexCost lex_clamp(LexCost x) {
  if (x.primary < 0) x.primary = 0;
  if (x.primary == 0 && x.secondary < 0) x.secondary = 0;
  return x;
}

inline LexCost lex_min(const LexCost& x, const LexCost& y) { return lex_less(x, y) ? x : y; }

constexpr LexCost kLexInf{kInf, kInf};

// Heap entry ordered by distance, classes before instances on ties, then the
// smaller index; fixes the deterministic tie-break rule.
struct HeapEntry {
  LexCost dist;
  bool is_instance;
  int index;
  bool operator>(const HeapEntry& o) const {
    if (dist.primary != o.dist.primary) return dist.primary > o.dist.primary;
    if (dist.secondary != o.dist.secondary) return dist.secondary > o.dist.secondary;
    return std::tie(is_instance, index) > std::tie(o.is_instance, o.index);
  }
};

}  // namespace

Assignment solve_assignment(const CostMatrix& costs, const Vector& v, const PriorCounts& counts) {
  const int q = costs.q();
  const int n = costs.n();
  if (static_cast<int>(v.size()) != n) throw DimensionMismatch("weight vector size mismatch");
  if (counts.q() != q) throw DimensionMismatch("prior counts size mismatch");
  if (counts.total() != n) throw CountMismatch("class counts must sum to n");
  for (int i = 0; i < n; ++i) {
    if (!(v(i) >= 0.0 && v(i) <= 1.0)) throw Error("weights must lie in [0,1]");
  }

  // edge(i,p) = (v_i * c(p,i), c(p,i)), both components >= 0.
  const auto edge_cost = [&](int i, int p) {
    const double raw = costs.c(p, i);
    return LexCost{v(i) * raw, raw};
  };

  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  std::vector<int> remaining(counts.n_p.begin(), counts.n_p.end());
  std::vector<std::vector<int>> assigned(static_cast<std::size_t>(q));  // ascending instance ids

  std::vector<LexCost> pot_inst(static_cast<std::size_t>(n));
  std::vector<LexCost> pot_cls(static_cast<std::size_t>(q));

  std::vector<LexCost> dist_inst(static_cast<std::size_t>(n));
  std::vector<LexCost> dist_cls(static_cast<std::size_t>(q));
  std::vector<bool> done_inst(static_cast<std::size_t>(n));
  std::vector<bool> done_cls(static_cast<std::size_t>(q));
  std::vector<int> parent_cls(static_cast<std::size_t>(q));   // instance feeding each class
  std::vector<int> parent_inst(static_cast<std::size_t>(n));  // class feeding each instance

  for (int start = 0; start < n; ++start) {
    std::fill(dist_inst.begin(), dist_inst.end(), kLexInf);
    std::fill(dist_cls.begin(), dist_cls.end(), kLexInf);
    std::fill(done_inst.begin(), done_inst.end(), false);
    std::fill(done_cls.begin(), done_cls.end(), false);

    std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<HeapEntry>> heap;
    dist_inst[static_cast<std::size_t>(start)] = LexCost{0, 0};
    heap.push({LexCost{0, 0}, true, start});

    int target = -1;
    LexCost target_dist{0, 0};
    while (!heap.empty()) {
      const HeapEntry top = heap.top();
      heap.pop();
      if (top.is_instance) {
        const int j = top.index;
        if (done_inst[static_cast<std::size_t>(j)]) continue;
        done_inst[static_cast<std::size_t>(j)] = true;
        const LexCost dj = dist_inst[static_cast<std::size_t>(j)];
        for (int p = 0; p < q; ++p) {
          if (p == assign[static_cast<std::size_t>(j)] || done_cls[static_cast<std::size_t>(p)]) {
            continue;
          }
          const LexCost rc = lex_clamp(lex_sub(
              lex_add(edge_cost(j, p), pot_inst[static_cast<std::size_t>(j)]),
              pot_cls[static_cast<std::size_t>(p)]));
          const LexCost nd = lex_add(dj, rc);
          if (lex_less(nd, dist_cls[static_cast<std::size_t>(p)])) {
            dist_cls[static_cast<std::size_t>(p)] = nd;
            parent_cls[static_cast<std::size_t>(p)] = j;
            heap.push({nd, false, p});
          }
        }
      } else {
        const int p = top.index;
        if (done_cls[static_cast<std::size_t>(p)]) continue;
        done_cls[static_cast<std::size_t>(p)] = true;
        const LexCost dp = dist_cls[static_cast<std::size_t>(p)];
        if (remaining[static_cast<std::size_t>(p)] > 0) {
          target = p;
          target_dist = dp;
          break;
        }
        for (int j : assigned[static_cast<std::size_t>(p)]) {
          if (done_inst[static_cast<std::size_t>(j)]) continue;
          const LexCost rc = lex_clamp(lex_sub(
              lex_sub(pot_cls[static_cast<std::size_t>(p)], pot_inst[static_cast<std::size_t>(j)]),
              edge_cost(j, p)));
          const LexCost nd = lex_add(dp, rc);
          if (lex_less(nd, dist_inst[static_cast<std::size_t>(j)])) {
            dist_inst[static_cast<std::size_t>(j)] = nd;
            parent_inst[static_cast<std::size_t>(j)] = p;
            heap.push({nd, true, j});
          }
        }
      }
    }
    if (target < 0) throw Error("internal: assignment network has no augmenting path");

    for (int p = 0; p < q; ++p) {
      pot_cls[static_cast<std::size_t>(p)] = lex_add(
          pot_cls[static_cast<std::size_t>(p)], lex_min(dist_cls[static_cast<std::size_t>(p)], target_dist));
    }
    for (int j = 0; j < n; ++j) {
      pot_inst[static_cast<std::size_t>(j)] = lex_add(
          pot_inst[static_cast<std::size_t>(j)], lex_min(dist_inst[static_cast<std::size_t>(j)], target_dist));
    }

    // Walk the alternating path back to the start instance, reassigning.
    int p = target;
    while (true) {
      const int j = parent_cls[static_cast<std::size_t>(p)];
      const int old = assign[static_cast<std::size_t>(j)];
      if (old >= 0) {
        auto& lst = assigned[static_cast<std::size_t>(old)];
        lst.erase(std::lower_bound(lst.begin(), lst.end(), j));
      }
      assign[static_cast<std::size_t>(j)] = p;
      auto& lst = assigned[static_cast<std::size_t>(p)];
      lst.insert(std::upper_bound(lst.begin(), lst.end(), j), j);
      if (j == start) break;
      p = old;
    }
    remaining[static_cast<std::size_t>(target)] -= 1;
  }

  for (int p = 0; p < q; ++p) {
    if (remaining[static_cast<std::size_t>(p)] != 0 ||
        static_cast<int>(assigned[static_cast<std::size_t>(p)].size()) !=
            counts.n_p[static_cast<std::size_t>(p)]) {
      throw Error("internal: assignment marginals violated");
    }
  }

  Assignment result;
  result.y.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    result.y[static_cast<std::size_t>(i)] = assign[static_cast<std::size_t>(i)] + 1;
    if (costs.c(assign[static_cast<std::size_t>(i)], i) == costs.bigM) result.violations += 1;
  }
  return result;
}

}  // namespace sppll
