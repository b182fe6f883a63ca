#include "uniprot/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "uniprot/rng.hpp"
#include "uniprot/selection.hpp"
#include "uniprot/transport.hpp"

namespace uniprot {

namespace {

constexpr double kTol = 1e-8;

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

std::string set_to_string(const std::vector<int>& P) {
  std::string out = "[";
  for (std::size_t i = 0; i < P.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(P[i]);
  }
  return out + "]";
}

std::string serialize_instance(const ProblemSpec& spec, std::size_t trial,
                               const std::string& detail) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "trial=" << trial << " m=" << spec.m() << " n=" << spec.n()
     << " k=" << spec.k << " " << detail << " S=[";
  for (std::size_t t = 0; t < spec.S.s.data.size(); ++t) {
    if (t) os << ",";
    os << spec.S.s.data[t];
  }
  os << "]";
  return os.str();
}

// Accumulates check outcomes; the first failing check pins the counterexample.
struct Recorder {
  VerificationReport rep;

  void check(double violation, double tol, const ProblemSpec& spec,
             std::size_t trial, const std::string& detail) {
    if (violation > rep.worst_violation) rep.worst_violation = violation;
    if (violation > tol) {
      ++rep.failures;
      if (!rep.counterexample)
        rep.counterexample = serialize_instance(spec, trial, detail);
    }
  }
};

ProblemSpec draw_instance(Rng& rng, const InstanceGenConfig& gen) {
  require(gen.max_m >= 2 && gen.max_n >= 2 && gen.max_k >= 1,
          "instance caps must allow m,n >= 2 and k >= 1");
  const std::size_t m = 2 + rng.below(gen.max_m - 1);
  const std::size_t n = 2 + rng.below(gen.max_n - 1);
  const std::size_t k_cap = std::min({gen.max_k, m, n});
  const std::size_t k = 1 + rng.below(k_cap);

  Matrix s(m, n);
  for (auto& x : s.data) {
    x = rng.uniform();
    if (x < 1e-3) x = 1e-3;
  }
  ProblemSpec spec;
  spec.S = SimilarityMatrix::from_raw(std::move(s));
  spec.target = uniform_marginal(n, 1.0);
  spec.k = k;
  return spec;
}

std::vector<int> random_permutation(Rng& rng, std::size_t m) {
  std::vector<int> perm(m);
  for (std::size_t i = 0; i < m; ++i) perm[i] = static_cast<int>(i);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(m - i));
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

std::vector<int> sorted_slice(const std::vector<int>& perm, std::size_t lo,
                              std::size_t hi) {
  std::vector<int> out(perm.begin() + static_cast<long>(lo),
                       perm.begin() + static_cast<long>(hi));
  std::sort(out.begin(), out.end());
  return out;
}

// Advances a lexicographic combination; returns false after the last one.
bool next_combination(std::vector<std::size_t>& comb, std::size_t m) {
  const std::size_t k = comb.size();
  std::size_t i = k;
  while (i > 0) {
    --i;
    if (comb[i] != i + m - k) {
      ++comb[i];
      for (std::size_t t = i + 1; t < k; ++t) comb[t] = comb[t - 1] + 1;
      return true;
    }
  }
  return false;
}

void run_lemma1(Rng& rng, std::size_t trials, const InstanceGenConfig& gen,
                Recorder& rec) {
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const ProblemSpec spec = draw_instance(rng, gen);
    const std::size_t m = spec.m();
    const auto perm = random_permutation(rng, m);

    // Nested pair P1 within P2 drawn from one shuffle.
    const std::size_t a = 1 + rng.below(std::min<std::size_t>(m, 3));
    const std::size_t extra = m > a ? 1 + rng.below(std::min<std::size_t>(m - a, 2)) : 0;
    const auto P1 = sorted_slice(perm, 0, a);
    const auto P2 = sorted_slice(perm, 0, a + extra);
    const double h1 = eval_h(spec, P1).value;
    const double h2 = eval_h(spec, P2).value;
    {
      std::ostringstream d;
      d << std::setprecision(17) << "check=nonneg P=" << set_to_string(P1)
        << " h=" << h1;
      rec.check(-h1, kTol, spec, trial, d.str());
    }
    {
      std::ostringstream d;
      d << std::setprecision(17) << "check=monotone P1=" << set_to_string(P1)
        << " P2=" << set_to_string(P2) << " h1=" << h1 << " h2=" << h2;
      rec.check(h1 - h2, kTol, spec, trial, d.str());
    }

    // Disjoint pair from a fresh shuffle.
    const auto perm2 = random_permutation(rng, m);
    const std::size_t s1 = 1 + rng.below(std::min<std::size_t>(m - 1, 3));
    const std::size_t s2 = 1 + rng.below(std::min<std::size_t>(m - s1, 3));
    const auto Q1 = sorted_slice(perm2, 0, s1);
    const auto Q2 = sorted_slice(perm2, s1, s1 + s2);
    std::vector<int> uni = Q1;
    uni.insert(uni.end(), Q2.begin(), Q2.end());
    std::sort(uni.begin(), uni.end());
    const double hu = eval_h(spec, uni).value;
    const double hq1 = eval_h(spec, Q1).value;
    const double hq2 = eval_h(spec, Q2).value;
    std::ostringstream d;
    d << std::setprecision(17) << "check=superadditive Q1=" << set_to_string(Q1)
      << " Q2=" << set_to_string(Q2) << " h(Q1)=" << hq1 << " h(Q2)=" << hq2
      << " h(union)=" << hu;
    rec.check(hq1 + hq2 - hu, kTol, spec, trial, d.str());
  }
}

void run_lemma2(Rng& rng, std::size_t trials, const InstanceGenConfig& gen,
                Recorder& rec) {
  const SolverConfig cfg = SolverConfig::exact_mode();
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const ProblemSpec spec = draw_instance(rng, gen);
    const std::size_t m = spec.m();
    const auto perm = random_permutation(rng, m);
    // Sizes keep |B| + 1 <= k so every evaluation stays within budget.
    const std::size_t bs = rng.below(spec.k);
    const std::size_t as = rng.below(bs + 1);
    const auto B = sorted_slice(perm, 0, bs);
    const std::vector<int> A(B.begin(), B.begin() + static_cast<long>(as));
    const int u = perm[bs];

    std::vector<int> Au = A, Bu = B;
    Au.push_back(u);
    Bu.push_back(u);
    const double fA = eval_f(spec, A, cfg).value;
    const double fB = eval_f(spec, B, cfg).value;
    const double fAu = eval_f(spec, Au, cfg).value;
    const double fBu = eval_f(spec, Bu, cfg).value;

    std::ostringstream base;
    base << std::setprecision(17) << "A=" << set_to_string(A)
         << " B=" << set_to_string(B) << " u=" << u << " fA=" << fA
         << " fB=" << fB << " fAu=" << fAu << " fBu=" << fBu;
    rec.check(-fAu, kTol, spec, trial, "check=nonneg " + base.str());
    rec.check(fA - fB, kTol, spec, trial, "check=monotone " + base.str());
    rec.check(fB - fBu, kTol, spec, trial, "check=monotone-u " + base.str());
    rec.check((fBu - fB) - (fAu - fA), kTol, spec, trial,
              "check=diminishing " + base.str());
  }
}

void run_lemma3(Rng& rng, std::size_t trials, const InstanceGenConfig& gen,
                Recorder& rec) {
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const ProblemSpec spec = draw_instance(rng, gen);
    const auto [Pf, vf] = brute_force_opt(spec, ObjectiveKind::f);
    const auto [Ph, vh] = brute_force_opt(spec, ObjectiveKind::h);
    const double h_of_Pf = eval_h(spec, Pf).value;
    const double f_of_Ph = eval_f(spec, Ph, SolverConfig::exact_mode()).value;

    std::ostringstream base;
    base << std::setprecision(17) << "Pf=" << set_to_string(Pf)
         << " Ph=" << set_to_string(Ph) << " vf=" << vf << " vh=" << vh;
    // Each objective's winner must also achieve the other's optimum.
    rec.check(vh - h_of_Pf, kTol, spec, trial, "check=f-set-wins-h " + base.str());
    rec.check(vf - f_of_Ph, kTol, spec, trial, "check=h-set-wins-f " + base.str());
    rec.check(std::fabs(vf - vh), kTol, spec, trial, "check=values-match " + base.str());
  }
}

void run_lemma4(Rng& rng, std::size_t trials, const InstanceGenConfig& gen,
                Recorder& rec) {
  const double floor_ratio = 1.0 - std::exp(-1.0);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const ProblemSpec spec = draw_instance(rng, gen);
    UniprotOptions opt;
    opt.gain = GainMode::exact;
    const Selection sel = select_uniprot(spec, SolverConfig::exact_mode(), opt);
    const double fhat = sel.step_values.back();
    const auto [best, optval] = brute_force_opt(spec, ObjectiveKind::f);
    std::ostringstream d;
    d << std::setprecision(17) << "check=greedy-floor picked="
      << set_to_string(sel.indices) << " fhat=" << fhat
      << " opt_set=" << set_to_string(best) << " opt=" << optval;
    rec.check(floor_ratio * optval - fhat, kTol, spec, trial, d.str());
  }
}

// Replays the chosen prefixes, comparing closed-form and true gains for every
// remaining candidate at every step.
void sandwich_over_prefixes(const ProblemSpec& spec, const Selection& sel,
                            const AlphaBound& bound, Recorder& rec,
                            std::size_t trial) {
  const SolverConfig cfg = SolverConfig::exact_mode();
  std::vector<int> prefix;
  for (int picked : sel.indices) {
    const ObjectiveValue base = eval_f(spec, prefix, cfg);
    const CapacityVector b = remaining_capacity(
        spec.k, spec.n(), base.coupling ? &*base.coupling : nullptr);
    for (int j = 0; j < static_cast<int>(spec.m()); ++j) {
      if (std::find(prefix.begin(), prefix.end(), j) != prefix.end()) continue;
      std::vector<double> row(spec.S.s.row(static_cast<std::size_t>(j)),
                              spec.S.s.row(static_cast<std::size_t>(j)) + spec.n());
      const double ap = approx_gain(row, b).value;
      const double ex = exact_gain(spec, prefix, j, cfg);
      const double ratio =
          bound.alpha_max[static_cast<std::size_t>(j)] == 0.0
              ? 1.0
              : bound.alpha_min[static_cast<std::size_t>(j)] /
                    bound.alpha_max[static_cast<std::size_t>(j)];
      std::ostringstream d;
      d << std::setprecision(17) << "prefix=" << set_to_string(prefix)
        << " j=" << j << " approx=" << ap << " exact=" << ex
        << " row_ratio=" << ratio;
      rec.check(ap - ex, 1e-9, spec, trial, "check=gain-upper " + d.str());
      rec.check(ratio * ex - ap, kTol, spec, trial, "check=gain-lower " + d.str());
    }
    prefix.push_back(picked);
  }
}

void run_lemma5(Rng& rng, std::size_t trials, const InstanceGenConfig& gen,
                Recorder& rec) {
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const ProblemSpec spec = draw_instance(rng, gen);
    UniprotOptions opt;
    opt.gain = GainMode::approx;
    const Selection sel = select_uniprot(spec, SolverConfig::exact_mode(), opt);
    const double fhat = sel.step_values.back();
    const AlphaBound bound = alpha_bound(spec.S, spec.k);
    const auto [best, optval] = brute_force_opt(spec, ObjectiveKind::f);
    const double floor_ratio = 1.0 - std::exp(-bound.alpha);
    std::ostringstream d;
    d << std::setprecision(17) << "check=greedy-floor picked="
      << set_to_string(sel.indices) << " fhat=" << fhat << " alpha=" << bound.alpha
      << " opt=" << optval;
    rec.check(floor_ratio * optval - fhat, kTol, spec, trial, d.str());
    sandwich_over_prefixes(spec, sel, bound, rec, trial);
  }
}

void run_gain_ratio(Rng& rng, std::size_t trials, const InstanceGenConfig& gen,
                    Recorder& rec) {
  const SolverConfig cfg = SolverConfig::exact_mode();
  double sum = 0.0;
  double mn = std::numeric_limits<double>::infinity();
  std::size_t count = 0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const ProblemSpec spec = draw_instance(rng, gen);
    UniprotOptions opt;
    opt.gain = GainMode::approx;
    const Selection sel = select_uniprot(spec, cfg, opt);
    std::vector<int> prefix;
    for (int picked : sel.indices) {
      const ObjectiveValue base = eval_f(spec, prefix, cfg);
      const CapacityVector b = remaining_capacity(
          spec.k, spec.n(), base.coupling ? &*base.coupling : nullptr);
      std::vector<double> row(spec.S.s.row(static_cast<std::size_t>(picked)),
                              spec.S.s.row(static_cast<std::size_t>(picked)) +
                                  spec.n());
      const double ap = approx_gain(row, b).value;
      const double ex = exact_gain(spec, prefix, picked, cfg);
      const double ratio = ex == 0.0 ? 1.0 : ap / ex;
      sum += ratio;
      mn = std::min(mn, ratio);
      ++count;
      std::ostringstream d;
      d << std::setprecision(17) << "check=ratio-cap prefix=" << set_to_string(prefix)
        << " picked=" << picked << " approx=" << ap << " exact=" << ex
        << " ratio=" << ratio;
      rec.check(ratio - 1.0, 1e-9, spec, trial, d.str());
      prefix.push_back(picked);
    }
  }
  rec.rep.ratio_count = count;
  rec.rep.ratio_mean = count ? sum / static_cast<double>(count) : 0.0;
  rec.rep.ratio_min = count ? mn : 0.0;
}

void run_pot_ot_equality(Rng& rng, std::size_t trials, const InstanceGenConfig& gen,
                         Recorder& rec) {
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const ProblemSpec spec = draw_instance(rng, gen);
    const std::size_t m = spec.m(), n = spec.n();
    // Random positive target masses totalling exactly the source mass.
    std::vector<double> nu(n);
    double total = 0.0;
    for (auto& x : nu) {
      x = 0.05 + rng.uniform();
      total += x;
    }
    for (auto& x : nu) x *= static_cast<double>(m) / total;
    const Marginal target = Marginal::from(nu);
    const Marginal mu = Marginal::from(std::vector<double>(m, 1.0));

    const double pot = pot_exact(spec.S.s, 1.0, target).objective;
    const double ot = ot_exact(spec.S.s, mu, target).objective;
    std::ostringstream d;
    d << std::setprecision(17) << "check=equal-mass pot=" << pot << " ot=" << ot;
    rec.check(std::fabs(pot - ot), kTol, spec, trial, d.str());
  }
}

}  // namespace

const char* suite_name(VerifySuite s) {
  switch (s) {
    case VerifySuite::lemma1: return "lemma1";
    case VerifySuite::lemma2: return "lemma2";
    case VerifySuite::lemma3: return "lemma3";
    case VerifySuite::lemma4: return "lemma4";
    case VerifySuite::lemma5: return "lemma5";
    case VerifySuite::gain_ratio: return "gain_ratio";
    case VerifySuite::pot_ot_equality: return "pot_ot_equality";
  }
  return "unknown";
}

VerifySuite suite_from_name(std::string_view name) {
  if (name == "lemma1") return VerifySuite::lemma1;
  if (name == "lemma2") return VerifySuite::lemma2;
  if (name == "lemma3") return VerifySuite::lemma3;
  if (name == "lemma4") return VerifySuite::lemma4;
  if (name == "lemma5") return VerifySuite::lemma5;
  if (name == "gain_ratio") return VerifySuite::gain_ratio;
  if (name == "pot_ot_equality") return VerifySuite::pot_ot_equality;
  throw std::invalid_argument("unknown verification suite: " + std::string(name));
}

std::pair<std::vector<int>, double> brute_force_opt(const ProblemSpec& spec,
                                                    ObjectiveKind objective) {
  spec.validate();
  require(objective == ObjectiveKind::f || objective == ObjectiveKind::h ||
              objective == ObjectiveKind::l,
          "exhaustive search supports the relaxed, balanced, and "
          "best-prototype scores only");
  const std::size_t m = spec.m(), k = spec.k;
  double combos = 1.0;
  for (std::size_t i = 1; i <= k; ++i)
    combos *= static_cast<double>(m - k + i) / static_cast<double>(i);
  require(combos <= 1e6, "subset count exceeds the enumeration guard");

  const SolverConfig cfg = SolverConfig::exact_mode();
  std::vector<std::size_t> comb(k);
  for (std::size_t i = 0; i < k; ++i) comb[i] = i;
  std::vector<int> best_set;
  double best = -std::numeric_limits<double>::infinity();
  do {
    std::vector<int> P(comb.begin(), comb.end());
    double v = 0.0;
    switch (objective) {
      case ObjectiveKind::f: v = eval_f(spec, P, cfg).value; break;
      case ObjectiveKind::h: v = eval_h(spec, P).value; break;
      default: v = eval_l(spec, P).value; break;
    }
    // Strict improvement keeps the lexicographically smallest tie.
    if (v > best) {
      best = v;
      best_set = std::move(P);
    }
  } while (next_combination(comb, m));
  return {best_set, best};
}

VerificationReport run_suite(VerifySuite suite, std::size_t trials,
                             const InstanceGenConfig& gen, std::uint64_t seed) {
  Recorder rec;
  rec.rep.suite = suite;
  rec.rep.trials = trials;
  if (trials == 0) return rec.rep;

  Rng rng(seed);
  switch (suite) {
    case VerifySuite::lemma1: run_lemma1(rng, trials, gen, rec); break;
    case VerifySuite::lemma2: run_lemma2(rng, trials, gen, rec); break;
    case VerifySuite::lemma3: run_lemma3(rng, trials, gen, rec); break;
    case VerifySuite::lemma4: run_lemma4(rng, trials, gen, rec); break;
    case VerifySuite::lemma5: run_lemma5(rng, trials, gen, rec); break;
    case VerifySuite::gain_ratio: run_gain_ratio(rng, trials, gen, rec); break;
    case VerifySuite::pot_ot_equality:
      run_pot_ot_equality(rng, trials, gen, rec);
      break;
  }
  return rec.rep;
}

}  // namespace uniprot
