#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "uniprot/objective.hpp"
#include "uniprot/types.hpp"

namespace uniprot {

// Named property suites, each turning one of the library's structural claims
// into a randomized, exhaustively checkable experiment.
enum class VerifySuite : std::uint8_t {
  lemma1,           // balanced score: non-negative, monotone, super-additive
  lemma2,           // relaxed score: monotone with diminishing gains
  lemma3,           // at full budget the relaxed and balanced optima coincide
  lemma4,           // exact-gain greedy reaches (1-1/e) of the brute-force optimum
  lemma5,           // closed-form-gain greedy reaches (1-e^-alpha) of the optimum
  gain_ratio,       // per-step closed-form/exact gain ratios stay in (0, 1]
  pot_ot_equality,  // capacity-relaxed transport equals balanced at equal mass
};

const char* suite_name(VerifySuite s);
VerifySuite suite_from_name(std::string_view name);  // throws std::invalid_argument

struct VerificationReport {
  VerifySuite suite = VerifySuite::lemma1;
  std::size_t trials = 0;
  std::size_t failures = 0;
  double worst_violation = 0.0;
  // First failing instance, serialized compactly; absent when failures = 0.
  std::optional<std::string> counterexample;
  // Populated by the gain_ratio suite only: per-step ratio statistics.
  double ratio_mean = 0.0;
  double ratio_min = 0.0;
  std::size_t ratio_count = 0;
};

// Size caps for randomly drawn instances; every trial draws m in [2, max_m],
// n in [2, max_n], k in [1, min(max_k, m, n)], scores uniform with a strictly
// positive floor, uniform target mass.
struct InstanceGenConfig {
  std::size_t max_m = 10;
  std::size_t max_n = 6;
  std::size_t max_k = 3;
};

// Exhaustive optimum over all subsets of size exactly k for the chosen score
// (relaxed and balanced scores use the exact solver; the averaged score is
// not supported). Ties resolve to the lexicographically smallest set.
// Requires choose(m, k) <= 1e6.
std::pair<std::vector<int>, double> brute_force_opt(const ProblemSpec& spec,
                                                    ObjectiveKind objective);

// Runs `trials` randomized checks of one suite. Failures are recorded in the
// report, never thrown; the run is deterministic given the seed.
VerificationReport run_suite(VerifySuite suite, std::size_t trials,
                             const InstanceGenConfig& gen, std::uint64_t seed);

}  // namespace uniprot
