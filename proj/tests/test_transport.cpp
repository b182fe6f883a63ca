#include <cmath>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "test_support.hpp"
#include "uniprot/transport.hpp"

using uniprot::Marginal;
using uniprot::Matrix;
using uniprot::SolverConfig;
using uniprot::TransportResult;

namespace {

Matrix mat(std::size_t r, std::size_t c, std::initializer_list<double> vals) {
  Matrix m(r, c);
  std::size_t i = 0;
  for (double v : vals) m.data[i++] = v;
  return m;
}

double recompute_objective(const Matrix& S, const TransportResult& r) {
  double acc = 0.0;
  for (std::size_t i = 0; i < S.rows; ++i)
    for (std::size_t j = 0; j < S.cols; ++j) acc += S(i, j) * r.coupling.plan(i, j);
  return acc;
}

}  // namespace

TEST_SUITE("transport") {

TEST_CASE("default iteration table") {
  CHECK(uniprot::default_max_iter(1) == 100);
  CHECK(uniprot::default_max_iter(200) == 100);
  CHECK(uniprot::default_max_iter(201) == 1000);
  CHECK(uniprot::default_max_iter(1000) == 1000);
  CHECK(uniprot::default_max_iter(4000) == 2000);
  CHECK(uniprot::default_max_iter(4001) == 4000);
}

TEST_CASE("ot_exact forced single cell") {
  auto r = uniprot::ot_exact(mat(1, 1, {1.0}), Marginal::from({1.0}), Marginal::from({1.0}));
  CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.coupling.plan(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.converged);
  CHECK(r.marginal_violation <= 1e-9);
}

TEST_CASE("ot_exact diagonal dominance") {
  auto r = uniprot::ot_exact(mat(2, 2, {2, 0, 0, 2}), Marginal::from({0.5, 0.5}),
                             Marginal::from({0.5, 0.5}));
  CHECK(r.objective == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.coupling.plan(0, 0) == doctest::Approx(0.5));
  CHECK(r.coupling.plan(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("ot_exact matches vertex enumeration on random instances") {
  testsup::TestRng rng(42);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t p = 2 + rng.below(3);  // up to 4
    const std::size_t n = 2 + rng.below(2);  // up to 3
    Matrix S = testsup::random_similarity(rng, p, n);
    auto mu = testsup::random_masses(rng, p, 1.0);
    auto nu = testsup::random_masses(rng, n, 1.0);
    auto r = uniprot::ot_exact(S, Marginal::from(mu), Marginal::from(nu));
    const double oracle = oracles::ot_vertex_enum_max(S, mu, nu);
    CHECK(r.objective == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(r.marginal_violation <= 1e-9);
    CHECK(recompute_objective(S, r) ==
          doctest::Approx(r.objective).epsilon(1e-9));
  }
}

TEST_CASE("ot_exact error cases") {
  CHECK_THROWS_AS(uniprot::ot_exact(mat(1, 1, {1.0}), Marginal::from({1.0}),
                                    Marginal::from({0.5})),
                  std::invalid_argument);
  CHECK_THROWS_AS(uniprot::ot_exact(Matrix(0, 3), Marginal{}, Marginal::from({1.0, 1.0, 1.0})),
                  std::invalid_argument);
}

TEST_CASE("pot_exact fills best column within caps") {
  auto r = uniprot::pot_exact(mat(1, 2, {3, 1}), 1.0, Marginal::from({1.0, 1.0}));
  CHECK(r.objective == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(r.coupling.plan(0, 0) == doctest::Approx(1.0));
  CHECK(r.coupling.plan(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("pot_exact caps force a matching") {
  auto r = uniprot::pot_exact(mat(2, 2, {3, 1, 1, 3}), 1.0, Marginal::from({1.0, 1.0}));
  CHECK(r.objective == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(r.coupling.plan(0, 0) == doctest::Approx(1.0));
  CHECK(r.coupling.plan(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("pot_exact matches the direct LP oracle") {
  testsup::TestRng rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t p = 1 + rng.below(3);  // up to 3
    const std::size_t n = 2 + rng.below(4);  // up to 5
    const std::size_t k = p + rng.below(3);  // k >= p so caps can take all mass
    Matrix S = testsup::random_similarity(rng, p, n);
    const double cap = static_cast<double>(k) / static_cast<double>(n);
    std::vector<double> caps(n, cap);
    if (static_cast<double>(p) > cap * static_cast<double>(n)) continue;
    auto r = uniprot::pot_exact(S, 1.0, Marginal::from(caps));
    const double oracle = oracles::pot_lp_max(S, 1.0, caps);
    CHECK(r.objective == doctest::Approx(oracle).epsilon(1e-9));
    // Feasibility: rows exact, columns within caps.
    for (std::size_t i = 0; i < p; ++i)
      CHECK(r.coupling.row_sums[i] == doctest::Approx(1.0).epsilon(1e-9));
    for (std::size_t j = 0; j < n; ++j) CHECK(r.coupling.col_sums[j] <= cap + 1e-9);
  }
}

TEST_CASE("pot_exact equals ot_exact at equal mass and dominates it with slack") {
  testsup::TestRng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t p = 2 + rng.below(3);
    const std::size_t n = 2 + rng.below(3);
    Matrix S = testsup::random_similarity(rng, p, n);
    auto nu = testsup::random_masses(rng, n, static_cast<double>(p));
    auto ot = uniprot::ot_exact(S, Marginal::from(std::vector<double>(p, 1.0)),
                                Marginal::from(nu));
    auto pot = uniprot::pot_exact(S, 1.0, Marginal::from(nu));
    CHECK(pot.objective == doctest::Approx(ot.objective).epsilon(1e-9));

    // Extra capacity can only help.
    auto nu_slack = nu;
    for (auto& x : nu_slack) x *= 1.7;
    auto pot2 = uniprot::pot_exact(S, 1.0, Marginal::from(nu_slack));
    CHECK(pot2.objective >= pot.objective - 1e-9);
  }
}

TEST_CASE("pot_exact rejects infeasible mass and empty set") {
  CHECK_THROWS_AS(uniprot::pot_exact(mat(2, 2, {1, 1, 1, 1}), 1.0,
                                     Marginal::from({0.5, 0.5})),
                  std::invalid_argument);
  CHECK_THROWS_AS(uniprot::pot_exact(Matrix(0, 2), 1.0, Marginal::from({1.0, 1.0})),
                  std::invalid_argument);
}

TEST_CASE("pot_exact is bitwise deterministic") {
  testsup::TestRng rng(5);
  Matrix S = testsup::random_similarity(rng, 4, 6);
  auto caps = testsup::random_masses(rng, 6, 5.0);
  auto a = uniprot::pot_exact(S, 1.0, Marginal::from(caps));
  auto b = uniprot::pot_exact(S, 1.0, Marginal::from(caps));
  REQUIRE(a.coupling.plan.data.size() == b.coupling.plan.data.size());
  CHECK(std::memcmp(a.coupling.plan.data.data(), b.coupling.plan.data.data(),
                    a.coupling.plan.data.size() * sizeof(double)) == 0);
  CHECK(a.objective == b.objective);
}

TEST_CASE("pot_entropic approaches the exact solution at small lambda") {
  auto r = uniprot::pot_entropic(mat(1, 2, {3, 1}), 1.0, Marginal::from({1.0, 1.0}),
                                 SolverConfig::entropic(0.01));
  CHECK(std::fabs(r.objective - 3.0) <= 0.05);
  CHECK(r.coupling.plan(0, 0) >= 0.95);
  CHECK(r.converged);
}

TEST_CASE("pot_entropic large lambda spreads mass") {
  // Identity-structured instance; with lambda >> S the kernel is nearly
  // uniform and the plan approaches the independent spread.
  auto exact = uniprot::pot_exact(mat(2, 2, {3, 1, 1, 3}), 1.0, Marginal::from({1.0, 1.0}));
  auto r = uniprot::pot_entropic(mat(2, 2, {3, 1, 1, 3}), 1.0, Marginal::from({1.0, 1.0}),
                                 SolverConfig::entropic(100.0));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(r.coupling.plan(i, j) == doctest::Approx(0.5).epsilon(0.05));
  CHECK(r.objective < exact.objective);
}

TEST_CASE("pot_entropic gap shrinks with lambda on most instances") {
  testsup::TestRng rng(91);
  int monotone = 0;
  const int trials = 20;
  for (int trial = 0; trial < trials; ++trial) {
    Matrix S = testsup::random_similarity(rng, 6, 10);
    const double cap = 8.0 / 10.0;  // k=8, n=10
    Marginal caps = Marginal::from(std::vector<double>(10, cap));
    const double exact = uniprot::pot_exact(S, 1.0, caps).objective;
    double prev_gap = -1.0;
    bool ok = true;
    for (double lambda : {0.1, 0.01, 0.001}) {
      // Fidelity probe: give the iteration room to converge at small lambda.
      auto r = uniprot::pot_entropic(S, 1.0, caps, SolverConfig::entropic(lambda, 20000));
      const double gap = exact - r.objective;
      CHECK(gap >= -1e-7);  // entropic never beats exact (sandwich)
      if (prev_gap >= 0.0 && gap > prev_gap + 1e-9) ok = false;
      prev_gap = gap;
    }
    monotone += ok ? 1 : 0;
  }
  CHECK(monotone >= trials * 9 / 10);
}

TEST_CASE("pot_entropic survives tiny lambda via rowwise stabilization") {
  testsup::TestRng rng(13);
  Matrix S = testsup::random_similarity(rng, 4, 8);
  auto r = uniprot::pot_entropic(S, 1.0, Marginal::from(std::vector<double>(8, 0.75)),
                                 SolverConfig::entropic(0.001, 20000));
  for (double x : r.coupling.plan.data) CHECK(std::isfinite(x));
  CHECK(r.stabilization_shift > 0.0);
  const double exact =
      uniprot::pot_exact(S, 1.0, Marginal::from(std::vector<double>(8, 0.75))).objective;
  CHECK(std::fabs(r.objective - exact) <= 0.05 * exact);
}

TEST_CASE("pot_entropic is bitwise deterministic") {
  testsup::TestRng rng(17);
  Matrix S = testsup::random_similarity(rng, 5, 7);
  Marginal caps = Marginal::from(testsup::random_masses(rng, 7, 6.0));
  auto a = uniprot::pot_entropic(S, 1.0, caps, SolverConfig::entropic(0.05));
  auto b = uniprot::pot_entropic(S, 1.0, caps, SolverConfig::entropic(0.05));
  CHECK(std::memcmp(a.coupling.plan.data.data(), b.coupling.plan.data.data(),
                    a.coupling.plan.data.size() * sizeof(double)) == 0);
}

TEST_CASE("ot_entropic degenerate and limiting cases") {
  // 1x1: unique feasible point regardless of lambda.
  auto r1 = uniprot::ot_entropic(mat(1, 1, {0.7}), Marginal::from({1.0}),
                                 Marginal::from({1.0}), SolverConfig::entropic(0.5));
  CHECK(r1.coupling.plan(0, 0) == doctest::Approx(1.0).epsilon(1e-12));

  // Small lambda on the identity instance approaches the exact optimum 2.
  auto r2 = uniprot::ot_entropic(mat(2, 2, {2, 0, 0, 2}), Marginal::from({0.5, 0.5}),
                                 Marginal::from({0.5, 0.5}), SolverConfig::entropic(0.001));
  CHECK(std::fabs(r2.objective - 2.0) <= 1e-2);

  // Constant S: objective is c * total mass for any lambda.
  auto r3 = uniprot::ot_entropic(mat(2, 3, {4, 4, 4, 4, 4, 4}), Marginal::from({0.5, 0.5}),
                                 Marginal::from({1.0 / 3, 1.0 / 3, 1.0 / 3}),
                                 SolverConfig::entropic(0.3));
  CHECK(r3.objective == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("ot_entropic stays below the exact objective") {
  testsup::TestRng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix S = testsup::random_similarity(rng, 4, 5);
    auto mu = testsup::random_masses(rng, 4, 1.0);
    auto nu = testsup::random_masses(rng, 5, 1.0);
    const double exact = uniprot::ot_exact(S, Marginal::from(mu), Marginal::from(nu)).objective;
    auto ent = uniprot::ot_entropic(S, Marginal::from(mu), Marginal::from(nu),
                                    SolverConfig::entropic(0.05));
    CHECK(ent.objective <= exact + 1e-7);
  }
}

TEST_CASE("row gain evaluator matches from-scratch solves") {
  testsup::TestRng rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t m = 8, n = 6, k = 5;
    uniprot::SimilarityMatrix S =
        uniprot::SimilarityMatrix::from_raw(testsup::random_similarity(rng, m, n));
    const double cap = static_cast<double>(k) / static_cast<double>(n);
    Marginal caps = Marginal::from(std::vector<double>(n, cap));

    std::vector<int> P;
    for (std::size_t step = 0; step + 1 < k; ++step) {
      uniprot::PotRowGainEvaluator ev(S, P, 1.0, caps);
      if (P.empty()) {
        CHECK(ev.base_objective() == doctest::Approx(0.0));
      } else {
        Matrix rows(P.size(), n);
        for (std::size_t i = 0; i < P.size(); ++i)
          std::copy(S.s.row(P[i]), S.s.row(P[i]) + n, rows.row(i));
        const double cold = uniprot::pot_exact(rows, 1.0, caps).objective;
        CHECK(ev.base_objective() == doctest::Approx(cold).epsilon(1e-9));
      }
      int next = -1;
      for (int j = 0; j < static_cast<int>(m); ++j) {
        bool used = false;
        for (int q : P) used = used || q == j;
        if (used) continue;
        Matrix rows(P.size() + 1, n);
        for (std::size_t i = 0; i < P.size(); ++i)
          std::copy(S.s.row(P[i]), S.s.row(P[i]) + n, rows.row(i));
        std::copy(S.s.row(j), S.s.row(j) + n, rows.row(P.size()));
        const double cold = uniprot::pot_exact(rows, 1.0, caps).objective;
        CHECK(ev.objective_with_row(j) == doctest::Approx(cold).epsilon(1e-9));
        if (next < 0) next = j;
      }
      // Grow P with a pseudo-random unused index to vary the base.
      int pick = next + static_cast<int>(rng.below(2));
      bool used = false;
      for (int q : P) used = used || q == pick;
      P.push_back(used ? next : pick);
    }
  }
}

}  // TEST_SUITE
