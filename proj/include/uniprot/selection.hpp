#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "uniprot/types.hpp"

namespace uniprot {

enum class SelectionMethod : std::uint8_t {
  uniprot_exact,
  uniprot_approx,
  uniprot_stochastic,
  kmedoids,
  random,
};

const char* method_name(SelectionMethod m);
SelectionMethod method_from_name(std::string_view name);  // throws std::invalid_argument

// Outcome of one selection run. step_values[i] is the capacity-relaxed score
// of the first i+1 picks for the greedy methods (the best-prototype score for
// kmedoids); step_seconds[i] is that iteration's wall time.
struct Selection {
  SelectionMethod method = SelectionMethod::uniprot_approx;
  std::vector<int> indices;
  std::vector<double> step_values;
  std::vector<double> weights;
  std::optional<std::uint64_t> seed;
  std::vector<double> step_seconds;
};

enum class GainMode : std::uint8_t { exact, approx };

// Random-pool scoring: each iteration scores only ceil((m/k)*ln(1/epsilon))
// candidates drawn without replacement from the unselected ones.
struct StochasticConfig {
  double epsilon = 0.01;

  // Pool size for ground-set size m and budget k, capped at the number of
  // remaining candidates, never below 1.
  std::size_t pool_size(std::size_t m, std::size_t k, std::size_t remaining) const;
};

struct UniprotOptions {
  GainMode gain = GainMode::approx;
  std::optional<StochasticConfig> stochastic;
  std::optional<std::uint64_t> seed;  // used only when stochastic is set
  int threads = 1;                    // candidate scoring fan-out
};

// Greedy selection maximizing the capacity-relaxed score: k rounds, each
// solving the partial-transport problem for the current picks per cfg,
// scoring candidates by true or closed-form marginal gain, and appending the
// best (ties to the lowest index). Weights come out uniform at 1/k.
Selection select_uniprot(const ProblemSpec& spec, const SolverConfig& cfg,
                         const UniprotOptions& opt = {});

// Greedy best-prototype baseline (facility location on the score matrix) with
// running column-max acceleration. Weights are the per-prototype share of
// target mass under the best-prototype assignment (ties to the lowest
// selected index) and generally come out skewed.
Selection select_kmedoids(const ProblemSpec& spec);

// k distinct indices drawn uniformly without replacement; uniform weights.
Selection select_random(const ProblemSpec& spec, std::uint64_t seed);

}  // namespace uniprot
