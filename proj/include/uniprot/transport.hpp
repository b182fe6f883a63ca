#pragma once

#include <memory>
#include <vector>

#include "uniprot/types.hpp"

namespace uniprot {

// Result of one solver call. objective is always the linear score <S, gamma>;
// entropic runs exclude their entropy term from it. stabilization_shift is the
// largest rowwise shift applied before exponentiation in entropic mode (the
// shift cancels after row normalization, so it changes nothing but the
// floating-point range); 0 in exact mode.
struct TransportResult {
  Coupling coupling;
  double objective = 0.0;
  int iterations_used = 0;
  bool converged = false;
  double marginal_violation = 0.0;
  double stabilization_shift = 0.0;
};

// Iteration cap by active source size when SolverConfig.max_iter is 0.
int default_max_iter(std::size_t source_size);

// Balanced transport, maximizing <S, gamma> over gamma1 = mu, gamma^T 1 = nu.
// Exact via successive shortest augmenting paths with node potentials;
// intended for instances up to roughly 200x200.
TransportResult ot_exact(const Matrix& S_rows, const Marginal& mu, const Marginal& nu);

// Semi-relaxed partial transport: every active row ships exactly row_mass,
// column intake is capped by nu_cap. Solved by appending a slack source row
// with zero similarity and mass nu_cap.total - p*row_mass, solving the
// balanced problem, and dropping the slack row.
TransportResult pot_exact(const Matrix& S_rows, double row_mass, const Marginal& nu_cap);

// Entropic variants: alternating scaling on the kernel exp(S/lambda).
// pot_entropic alternates an exact row step with a column step that only ever
// scales columns down (factor min(1, cap/colsum)); ot_entropic is two-sided
// Sinkhorn. Reported objective excludes the entropy term.
TransportResult pot_entropic(const Matrix& S_rows, double row_mass, const Marginal& nu_cap,
                             const SolverConfig& cfg);
TransportResult ot_entropic(const Matrix& S_rows, const Marginal& mu, const Marginal& nu,
                            const SolverConfig& cfg);

// Prices f(P + {j}) for many candidate rows j against one solved base problem.
// The base is an exact partial-transport solve over the rows of P; each query
// clones that solved state, grants the new row its mass by unrouting the same
// amount from the slack row, and routes it with further shortest augmenting
// paths. Results match a from-scratch exact solve of P + {j} (same LP optimum,
// and the optimality invariant is maintained throughout), at a fraction of the
// cost. Queries are const and safe to issue concurrently.
class PotRowGainEvaluator {
 public:
  // S supplies candidate rows; P lists the base rows (may be empty); caps are
  // per-column capacities. Requires (|P|+1)*row_mass <= nu_cap.total + 1e-9.
  PotRowGainEvaluator(const SimilarityMatrix& S, const std::vector<int>& P,
                      double row_mass, const Marginal& nu_cap);
  ~PotRowGainEvaluator();
  PotRowGainEvaluator(PotRowGainEvaluator&&) noexcept;
  PotRowGainEvaluator& operator=(PotRowGainEvaluator&&) noexcept;

  // Objective of the base solve; equals pot_exact over P (0 for empty P).
  double base_objective() const;
  // Full base result (coupling over the rows of P in their given order).
  const TransportResult& base() const;
  // Exact objective of pot over P + {source_row}; source_row must not be in P.
  double objective_with_row(int source_row) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace uniprot
