#include "uniprot/objective.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>
#include <stdexcept>
#include <string>

#include "uniprot/kernels.hpp"

namespace uniprot {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Checks indices are in range and distinct; empty sets pass (callers that
// forbid them say so themselves).
void check_index_set(const std::vector<int>& P, std::size_t m, const char* who) {
  std::vector<char> seen(m, 0);
  for (int i : P) {
    require(i >= 0 && static_cast<std::size_t>(i) < m,
            std::string(who) + ": index out of range");
    require(!seen[i], std::string(who) + ": duplicate index");
    seen[i] = 1;
  }
}

Matrix gather_rows(const Matrix& s, const std::vector<int>& P) {
  Matrix out(P.size(), s.cols);
  for (std::size_t r = 0; r < P.size(); ++r)
    std::memcpy(out.row(r), s.row(static_cast<std::size_t>(P[r])),
                s.cols * sizeof(double));
  return out;
}

std::vector<int> descending_order(const double* row, std::size_t n) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [row](int a, int b) {
    if (row[a] != row[b]) return row[a] > row[b];
    return a < b;
  });
  return order;
}

}  // namespace

SortedRows SortedRows::build(const SimilarityMatrix& S) {
  SortedRows out;
  out.order.resize(S.m());
  for (std::size_t i = 0; i < S.m(); ++i) out.order[i] = descending_order(S.s.row(i), S.n());
  return out;
}

ObjectiveValue eval_l(const ProblemSpec& spec, const std::vector<int>& P) {
  spec.validate();
  require(!P.empty(), "best-prototype score needs a non-empty index set");
  check_index_set(P, spec.m(), "eval_l");
  const std::size_t n = spec.n();
  const auto& k = kernels::active();

  std::vector<double> colmax(spec.S.s.row(static_cast<std::size_t>(P[0])),
                             spec.S.s.row(static_cast<std::size_t>(P[0])) + n);
  for (std::size_t r = 1; r < P.size(); ++r)
    k.ewise_max(colmax.data(), spec.S.s.row(static_cast<std::size_t>(P[r])), n);

  ObjectiveValue out;
  out.which = ObjectiveKind::l;
  out.value = k.dot(colmax.data(), spec.target.mass.data(), n);

  Matrix plan(P.size(), n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t r = 0; r < P.size(); ++r) {
      if (spec.S.s(static_cast<std::size_t>(P[r]), j) == colmax[j]) {
        plan(r, j) = spec.target.mass[j];
        break;
      }
    }
  }
  out.coupling = Coupling::from_plan(std::move(plan));
  return out;
}

ObjectiveValue eval_h(const ProblemSpec& spec, const std::vector<int>& P) {
  spec.validate();
  check_index_set(P, spec.m(), "eval_h");
  ObjectiveValue out;
  out.which = ObjectiveKind::h;
  if (P.empty()) return out;  // defined as 0 with no plan

  const Matrix rows = gather_rows(spec.S.s, P);
  const Marginal mu = Marginal::from(std::vector<double>(P.size(), 1.0));
  const Marginal nu = uniform_marginal(spec.n(), static_cast<double>(P.size()));
  TransportResult res = ot_exact(rows, mu, nu);
  out.value = res.objective;
  out.coupling = std::move(res.coupling);
  return out;
}

ObjectiveValue eval_g(const ProblemSpec& spec, const std::vector<int>& P) {
  require(!P.empty(), "per-prototype average score is undefined for an empty set");
  ObjectiveValue h = eval_h(spec, P);
  ObjectiveValue out;
  out.which = ObjectiveKind::g;
  const double p = static_cast<double>(P.size());
  out.value = h.value / p;
  if (h.coupling) {
    Matrix plan = std::move(h.coupling->plan);
    kernels::active().scale(plan.data.data(), plan.data.data(), 1.0 / p,
                            plan.data.size());
    out.coupling = Coupling::from_plan(std::move(plan));
  }
  return out;
}

ObjectiveValue eval_f(const ProblemSpec& spec, const std::vector<int>& P,
                      const SolverConfig& cfg) {
  spec.validate();
  cfg.validate();
  check_index_set(P, spec.m(), "eval_f");
  require(P.size() <= spec.k, "capacity-relaxed score needs |P| <= k");
  ObjectiveValue out;
  out.which = ObjectiveKind::f;
  if (P.empty()) return out;  // defined as 0 with no plan

  const Matrix rows = gather_rows(spec.S.s, P);
  const Marginal cap = uniform_marginal(spec.n(), static_cast<double>(spec.k));
  TransportResult res = cfg.mode == SolverMode::exact
                            ? pot_exact(rows, 1.0, cap)
                            : pot_entropic(rows, 1.0, cap, cfg);
  out.value = res.objective;
  out.coupling = std::move(res.coupling);
  return out;
}

double exact_gain(const ProblemSpec& spec, const std::vector<int>& P, int j,
                  const SolverConfig& cfg) {
  require(P.size() < spec.k, "no budget left for another prototype");
  require(j >= 0 && static_cast<std::size_t>(j) < spec.m(),
          "candidate index out of range");
  require(std::find(P.begin(), P.end(), j) == P.end(),
          "candidate is already selected");
  std::vector<int> grown = P;
  grown.push_back(j);
  return eval_f(spec, grown, cfg).value - eval_f(spec, P, cfg).value;
}

CapacityVector remaining_capacity(std::size_t k, std::size_t n, const Coupling* gamma_P) {
  require(k >= 1 && n >= 1, "capacity needs k >= 1 and n >= 1");
  const double cap = static_cast<double>(k) / static_cast<double>(n);
  CapacityVector out;
  out.b.assign(n, cap);
  if (gamma_P != nullptr) {
    require(gamma_P->plan.cols == n, "plan column count does not match n");
    for (std::size_t jcol = 0; jcol < n; ++jcol) {
      const double rem = cap - gamma_P->col_sums[jcol];
      if (rem < 0.0) {
        out.clamp_magnitude = std::max(out.clamp_magnitude, -rem);
        out.b[jcol] = 0.0;
      } else {
        out.b[jcol] = rem;
      }
    }
  }
  out.total = kernels::active().sum(out.b.data(), n);
  return out;
}

GainResult approx_gain(std::span<const double> S_row, const CapacityVector& b) {
  require(S_row.size() == b.size(), "row length does not match capacity length");
  const std::vector<int> order = descending_order(S_row.data(), S_row.size());
  return approx_gain_sorted(S_row.data(), order, b);
}

GainResult approx_gain_sorted(const double* S_row, const std::vector<int>& order_desc,
                              const CapacityVector& b) {
  require(order_desc.size() == b.size(), "order length does not match capacity length");
  require(b.total >= 1.0 - 1e-6,
          "capacity total below one unit: the selection is already at budget "
          "or the coupling is corrupted");
  // Totals a hair under 1 are solver slack; stretch them to exactly one unit.
  const double scale = b.total < 1.0 ? 1.0 / b.total : 1.0;

  GainResult out;
  out.v.assign(b.size(), 0.0);
  double remaining = 1.0;
  for (int idx : order_desc) {
    const double cap = b.b[static_cast<std::size_t>(idx)] * scale;
    if (cap <= 0.0) continue;
    const double take = cap < remaining ? cap : remaining;
    out.v[static_cast<std::size_t>(idx)] = take;
    out.value += S_row[idx] * take;
    remaining -= take;
    if (remaining <= 0.0) break;
  }
  return out;
}

AlphaBound alpha_bound(const SimilarityMatrix& S, std::size_t k) {
  require(k >= 1, "alpha bound needs k >= 1");
  require(k <= S.n(), "alpha bound needs k <= n");
  AlphaBound out;
  out.block = S.n() / k;
  out.alpha_min.resize(S.m());
  out.alpha_max.resize(S.m());
  out.alpha = 1.0;

  std::vector<double> row(S.n());
  const double inv_block = 1.0 / static_cast<double>(out.block);
  for (std::size_t i = 0; i < S.m(); ++i) {
    std::memcpy(row.data(), S.s.row(i), S.n() * sizeof(double));
    std::sort(row.begin(), row.end());
    // Both blocks accumulate in ascending position order so that elementwise
    // domination carries over to the rounded sums (alpha_min <= alpha_max
    // holds exactly, even when the blocks overlap).
    double lo = 0.0, hi = 0.0;
    for (std::size_t t = 0; t < out.block; ++t) {
      lo += row[t];
      hi += row[S.n() - out.block + t];
    }
    out.alpha_min[i] = lo * inv_block;
    out.alpha_max[i] = hi * inv_block;
    const double ratio = out.alpha_max[i] == 0.0 ? 1.0 : out.alpha_min[i] / out.alpha_max[i];
    out.alpha = std::min(out.alpha, ratio);
  }
  return out;
}

}  // namespace uniprot
