#include "uniprot/selection.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

#include "uniprot/kernels.hpp"
#include "uniprot/objective.hpp"
#include "uniprot/rng.hpp"
#include "uniprot/transport.hpp"

namespace uniprot {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Ascending-index argmax with strict improvement; with contiguous ascending
// chunks merged in order, ties land on the lowest index no matter how many
// workers scored them.
template <typename ScoreFn>
std::pair<double, int> best_candidate(const std::vector<int>& candidates,
                                      const ScoreFn& score, int threads) {
  const std::size_t count = candidates.size();
  const std::size_t workers =
      std::min<std::size_t>(std::max(threads, 1), count);
  if (workers <= 1) {
    double best_gain = -std::numeric_limits<double>::infinity();
    int best = -1;
    for (int j : candidates) {
      const double g = score(j);
      if (g > best_gain) {
        best_gain = g;
        best = j;
      }
    }
    return {best_gain, best};
  }

  std::vector<double> gains(workers, -std::numeric_limits<double>::infinity());
  std::vector<int> picks(workers, -1);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const std::size_t lo = count * w / workers;
      const std::size_t hi = count * (w + 1) / workers;
      for (std::size_t t = lo; t < hi; ++t) {
        const double g = score(candidates[t]);
        if (g > gains[w]) {
          gains[w] = g;
          picks[w] = candidates[t];
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  double best_gain = -std::numeric_limits<double>::infinity();
  int best = -1;
  for (std::size_t w = 0; w < workers; ++w) {
    if (picks[w] >= 0 && gains[w] > best_gain) {
      best_gain = gains[w];
      best = picks[w];
    }
  }
  return {best_gain, best};
}

}  // namespace

const char* method_name(SelectionMethod m) {
  switch (m) {
    case SelectionMethod::uniprot_exact: return "uniprot_exact";
    case SelectionMethod::uniprot_approx: return "uniprot_approx";
    case SelectionMethod::uniprot_stochastic: return "uniprot_stochastic";
    case SelectionMethod::kmedoids: return "kmedoids";
    case SelectionMethod::random: return "random";
  }
  return "unknown";
}

SelectionMethod method_from_name(std::string_view name) {
  if (name == "uniprot_exact") return SelectionMethod::uniprot_exact;
  if (name == "uniprot_approx") return SelectionMethod::uniprot_approx;
  if (name == "uniprot_stochastic") return SelectionMethod::uniprot_stochastic;
  if (name == "kmedoids") return SelectionMethod::kmedoids;
  if (name == "random") return SelectionMethod::random;
  throw std::invalid_argument("unknown selection method: " + std::string(name));
}

std::size_t StochasticConfig::pool_size(std::size_t m, std::size_t k,
                                        std::size_t remaining) const {
  require(epsilon > 0.0 && epsilon < 1.0, "stochastic epsilon must be in (0,1)");
  const double raw = std::ceil(static_cast<double>(m) / static_cast<double>(k) *
                               std::log(1.0 / epsilon));
  std::size_t size = raw < 1.0 ? 1 : static_cast<std::size_t>(raw);
  if (size < 1) size = 1;
  return std::min(size, remaining);
}

Selection select_uniprot(const ProblemSpec& spec, const SolverConfig& cfg,
                         const UniprotOptions& opt) {
  spec.validate();
  cfg.validate();
  const std::size_t m = spec.m(), n = spec.n(), k = spec.k;
  const Marginal cap = uniform_marginal(n, static_cast<double>(k));
  const bool exact_solver = cfg.mode == SolverMode::exact;

  Selection out;
  out.method = opt.stochastic ? SelectionMethod::uniprot_stochastic
               : opt.gain == GainMode::exact ? SelectionMethod::uniprot_exact
                                             : SelectionMethod::uniprot_approx;
  out.indices.reserve(k);
  out.step_values.assign(k, 0.0);
  out.step_seconds.assign(k, 0.0);
  out.seed = opt.seed;

  std::optional<Rng> rng;
  if (opt.stochastic) {
    if (!out.seed) out.seed = 0;
    rng.emplace(*out.seed);
  }

  std::optional<SortedRows> sorted;
  if (opt.gain == GainMode::approx) sorted = SortedRows::build(spec.S);

  std::vector<char> selected(m, 0);
  for (std::size_t iter = 0; iter < k; ++iter) {
    const auto t0 = std::chrono::steady_clock::now();

    // Solve the partial-transport problem for the current picks. The exact
    // gain path keeps the solved state around to price candidates
    // incrementally; the others need the objective and (for closed-form
    // gains) the column intake so far.
    double f_current = 0.0;
    std::optional<PotRowGainEvaluator> evaluator;
    CapacityVector b;
    if (opt.gain == GainMode::exact && exact_solver) {
      evaluator.emplace(spec.S, out.indices, 1.0, cap);
      f_current = evaluator->base_objective();
    } else if (out.indices.empty()) {
      if (opt.gain == GainMode::approx) b = remaining_capacity(k, n, nullptr);
    } else {
      ObjectiveValue fv = eval_f(spec, out.indices, cfg);
      f_current = fv.value;
      if (opt.gain == GainMode::approx)
        b = remaining_capacity(k, n, fv.coupling ? &*fv.coupling : nullptr);
    }
    if (iter > 0) out.step_values[iter - 1] = f_current;

    std::vector<int> candidates;
    candidates.reserve(m - iter);
    for (std::size_t i = 0; i < m; ++i)
      if (!selected[i]) candidates.push_back(static_cast<int>(i));
    if (opt.stochastic) {
      const std::size_t pool =
          opt.stochastic->pool_size(m, k, candidates.size());
      for (std::size_t t = 0; t < pool; ++t) {
        const std::size_t r =
            t + static_cast<std::size_t>(rng->below(candidates.size() - t));
        std::swap(candidates[t], candidates[r]);
      }
      candidates.resize(pool);
      std::sort(candidates.begin(), candidates.end());
    }

    const auto score = [&](int j) -> double {
      if (opt.gain == GainMode::approx) {
        return approx_gain_sorted(spec.S.s.row(static_cast<std::size_t>(j)),
                                  sorted->order[static_cast<std::size_t>(j)], b)
            .value;
      }
      if (exact_solver) return evaluator->objective_with_row(j) - f_current;
      std::vector<int> grown = out.indices;
      grown.push_back(j);
      return eval_f(spec, grown, cfg).value - f_current;
    };

    const auto [gain, best] = best_candidate(candidates, score, opt.threads);
    (void)gain;  // zero gain is legal; the lowest-index candidate still wins
    out.indices.push_back(best);
    selected[static_cast<std::size_t>(best)] = 1;
    out.step_seconds[iter] = seconds_since(t0);
  }

  // One more solve prices the complete selection.
  const auto t0 = std::chrono::steady_clock::now();
  out.step_values[k - 1] = eval_f(spec, out.indices, cfg).value;
  out.step_seconds[k - 1] += seconds_since(t0);

  out.weights.assign(k, 1.0 / static_cast<double>(k));
  return out;
}

Selection select_kmedoids(const ProblemSpec& spec) {
  spec.validate();
  const std::size_t m = spec.m(), n = spec.n(), k = spec.k;
  const auto& kr = kernels::active();

  Selection out;
  out.method = SelectionMethod::kmedoids;
  out.indices.reserve(k);
  out.step_values.reserve(k);
  out.step_seconds.reserve(k);

  // Scores are nonnegative, so the empty selection covers every column at 0.
  std::vector<double> colmax(n, 0.0);
  std::vector<char> selected(m, 0);
  double running = 0.0;
  for (std::size_t iter = 0; iter < k; ++iter) {
    const auto t0 = std::chrono::steady_clock::now();
    double best_gain = -std::numeric_limits<double>::infinity();
    int best = -1;
    for (std::size_t i = 0; i < m; ++i) {
      if (selected[i]) continue;
      const double* row = spec.S.s.row(i);
      double gain = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double lift = row[j] - colmax[j];
        if (lift > 0.0) gain += spec.target.mass[j] * lift;
      }
      if (gain > best_gain) {
        best_gain = gain;
        best = static_cast<int>(i);
      }
    }
    out.indices.push_back(best);
    selected[static_cast<std::size_t>(best)] = 1;
    kr.ewise_max(colmax.data(), spec.S.s.row(static_cast<std::size_t>(best)), n);
    running += best_gain;
    out.step_values.push_back(running);
    out.step_seconds.push_back(seconds_since(t0));
  }

  // Weight = share of target mass each pick wins under the best-prototype
  // assignment; column ties go to the lowest selected index.
  out.weights.assign(k, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    int win_pos = -1;
    int win_idx = std::numeric_limits<int>::max();
    for (std::size_t r = 0; r < k; ++r) {
      const auto idx = static_cast<std::size_t>(out.indices[r]);
      if (spec.S.s(idx, j) == colmax[j] && out.indices[r] < win_idx) {
        win_idx = out.indices[r];
        win_pos = static_cast<int>(r);
      }
    }
    out.weights[static_cast<std::size_t>(win_pos)] += spec.target.mass[j];
  }
  return out;
}

Selection select_random(const ProblemSpec& spec, std::uint64_t seed) {
  spec.validate();
  const std::size_t m = spec.m(), k = spec.k;
  Rng rng(seed);
  std::vector<int> pool(m);
  for (std::size_t i = 0; i < m; ++i) pool[i] = static_cast<int>(i);
  for (std::size_t t = 0; t < k; ++t) {
    const std::size_t r = t + static_cast<std::size_t>(rng.below(m - t));
    std::swap(pool[t], pool[r]);
  }
  pool.resize(k);

  Selection out;
  out.method = SelectionMethod::random;
  out.indices = std::move(pool);
  out.weights.assign(k, 1.0 / static_cast<double>(k));
  out.seed = seed;
  return out;
}

}  // namespace uniprot
