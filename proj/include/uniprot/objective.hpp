#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "uniprot/transport.hpp"
#include "uniprot/types.hpp"

namespace uniprot {

// The four set scores share one result shape. `coupling` carries the plan that
// attains the value when one exists; its rows follow the order of the queried
// index set.
enum class ObjectiveKind : std::uint8_t { l, g, h, f };

struct ObjectiveValue {
  ObjectiveKind which = ObjectiveKind::l;
  double value = 0.0;
  std::optional<Coupling> coupling;
};

// Per-column capacity left over for one more unit of source mass: each entry
// is max(0, k/n - column intake so far). Entropic plans can overshoot a column
// by solver tolerance; the overshoot is clamped to zero and the largest such
// clamp is reported.
struct CapacityVector {
  std::vector<double> b;
  double total = 0.0;
  double clamp_magnitude = 0.0;

  std::size_t size() const { return b.size(); }
};

// Row-wise spread statistics that lower-bound how well the capacity-fill
// score tracks the true marginal gain. block = floor(n/k); alpha_min/alpha_max
// are per-row averages of the block smallest/largest scores; alpha is the
// worst per-row ratio (0/0 counts as 1).
struct AlphaBound {
  std::vector<double> alpha_min;
  std::vector<double> alpha_max;
  double alpha = 1.0;
  std::size_t block = 0;
};

// Score and the unit-mass column allocation that realizes it.
struct GainResult {
  double value = 0.0;
  std::vector<double> v;
};

// Per-row descending column permutations, computed once and reused by every
// capacity-fill scoring call (ties ordered by lower column index).
struct SortedRows {
  std::vector<std::vector<int>> order;

  static SortedRows build(const SimilarityMatrix& S);
};

// Best-prototype assignment score: every target column sends all its mass to
// the highest-scoring selected row. Closed form; the coupling records that
// assignment (column ties go to the earliest row of P). Errors on empty P.
ObjectiveValue eval_l(const ProblemSpec& spec, const std::vector<int>& P);

// Balanced-transport score of the selected rows: one unit of mass per row,
// columns absorb |P|/n each. Empty P scores 0 by definition.
ObjectiveValue eval_h(const ProblemSpec& spec, const std::vector<int>& P);

// Per-prototype average of the balanced score: eval_h / |P|. Errors on empty P.
ObjectiveValue eval_g(const ProblemSpec& spec, const std::vector<int>& P);

// Capacity-relaxed score: one unit per selected row, columns capped at k/n,
// solved exact or entropic per cfg. Empty P scores 0; errors when |P| > k.
ObjectiveValue eval_f(const ProblemSpec& spec, const std::vector<int>& P,
                      const SolverConfig& cfg);

// f(P + {j}) - f(P), both sides evaluated with the same cfg.
// Errors when j is already selected or the budget is exhausted (|P| = k).
double exact_gain(const ProblemSpec& spec, const std::vector<int>& P, int j,
                  const SolverConfig& cfg);

// Capacity left per column after the plan gamma_P (pass nullptr for no rows
// selected yet): b_j = max(0, k/n - col_sums[j]).
CapacityVector remaining_capacity(std::size_t k, std::size_t n, const Coupling* gamma_P);

// Closed-form capacity fill: walk the row's columns in descending score order,
// granting each its remaining capacity until one unit of mass is placed.
// Requires b.total >= 1 - 1e-6; totals just below 1 are renormalized to 1
// (solver-tolerance slack), anything lower is an error.
GainResult approx_gain(std::span<const double> S_row, const CapacityVector& b);

// Same, with the row's descending column order precomputed (see SortedRows).
GainResult approx_gain_sorted(const double* S_row, const std::vector<int>& order_desc,
                              const CapacityVector& b);

// Worst-case ratio between the capacity-fill score and the true marginal gain,
// from per-row block statistics. Requires 1 <= k <= n.
AlphaBound alpha_bound(const SimilarityMatrix& S, std::size_t k);

}  // namespace uniprot
