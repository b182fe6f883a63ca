// Tests for the set-score family (best-prototype, balanced, averaged,
// capacity-relaxed), both marginal-gain paths, remaining capacities, and the
// row-spread ratio bound.
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "test_support.hpp"
#include "uniprot/objective.hpp"
#include "uniprot/transport.hpp"
#include "uniprot/types.hpp"

using namespace uniprot;

namespace {

ProblemSpec make_spec(Matrix scores, std::vector<double> target, std::size_t k) {
  ProblemSpec spec;
  spec.S = SimilarityMatrix::from_raw(std::move(scores));
  spec.target = Marginal::from(std::move(target));
  spec.k = k;
  return spec;
}

ProblemSpec random_spec(testsup::TestRng& rng, std::size_t m, std::size_t n,
                        std::size_t k) {
  return make_spec(testsup::random_similarity(rng, m, n),
                   std::vector<double>(n, 1.0 / static_cast<double>(n)), k);
}

Matrix from_rows(const std::vector<std::vector<double>>& rows) {
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

std::vector<int> random_subset(testsup::TestRng& rng, std::size_t m, std::size_t size) {
  std::vector<int> pool(m);
  for (std::size_t i = 0; i < m; ++i) pool[i] = static_cast<int>(i);
  for (std::size_t i = 0; i < size; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(m - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(size);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

TEST_CASE("eval_l: hand instances and the recorded assignment") {
  auto spec = make_spec(from_rows({{5, 1}, {1, 5}, {3, 3}}), {0.5, 0.5}, 2);

  auto one = eval_l(spec, {0});
  CHECK(one.value == doctest::Approx(3.0));
  REQUIRE(one.coupling.has_value());
  CHECK(one.coupling->plan(0, 0) == doctest::Approx(0.5));
  CHECK(one.coupling->plan(0, 1) == doctest::Approx(0.5));

  auto two = eval_l(spec, {0, 1});
  CHECK(two.value == doctest::Approx(5.0));
  // Each column's mass sits on its best row.
  CHECK(two.coupling->plan(0, 0) == doctest::Approx(0.5));
  CHECK(two.coupling->plan(1, 1) == doctest::Approx(0.5));
  CHECK(two.coupling->plan(0, 1) == doctest::Approx(0.0));

  CHECK_THROWS_AS(eval_l(spec, {}), std::invalid_argument);
  CHECK_THROWS_AS(eval_l(spec, {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(eval_l(spec, {3}), std::invalid_argument);
}

TEST_CASE("eval_l: ties in a column go to the earliest selected row") {
  auto spec = make_spec(from_rows({{2, 7}, {2, 1}}), {0.5, 0.5}, 2);
  auto v = eval_l(spec, {1, 0});  // row 1 listed first
  CHECK(v.coupling->plan(0, 0) == doctest::Approx(0.5));  // first listed row wins the tie
  CHECK(v.coupling->plan(1, 0) == doctest::Approx(0.0));
}

TEST_CASE("eval_l matches a column-constrained LP") {
  testsup::TestRng rng(2024);
  for (int trial = 0; trial < 10; ++trial) {
    auto spec = random_spec(rng, 6, 4, 3);
    const auto P = random_subset(rng, 6, 3);
    const auto got = eval_l(spec, P);

    // LP over plans supported on the rows of P with only the column-sum
    // constraints active (source side free).
    const std::size_t p = P.size(), n = spec.n();
    std::vector<std::vector<double>> A(n, std::vector<double>(p * n, 0.0));
    std::vector<double> rhs(n);
    std::vector<double> c(p * n);
    for (std::size_t j = 0; j < n; ++j) {
      rhs[j] = spec.target.mass[j];
      for (std::size_t r = 0; r < p; ++r) {
        A[j][r * n + j] = 1.0;
        c[r * n + j] = spec.S.s(static_cast<std::size_t>(P[r]), j);
      }
    }
    const double lp = oracles::simplex_max(A, rhs, c);
    CHECK(got.value == doctest::Approx(lp).epsilon(1e-9));
  }
}

TEST_CASE("eval_h: forced plans and the empty set") {
  auto single = make_spec(from_rows({{2.75}}), {1.0}, 1);
  CHECK(eval_h(single, {0}).value == doctest::Approx(2.75));

  auto ident = make_spec(from_rows({{3, 1}, {1, 3}}), {0.5, 0.5}, 2);
  auto h = eval_h(ident, {0, 1});
  CHECK(h.value == doctest::Approx(6.0));
  REQUIRE(h.coupling.has_value());
  CHECK(h.coupling->plan(0, 0) == doctest::Approx(1.0));
  CHECK(h.coupling->plan(1, 1) == doctest::Approx(1.0));

  auto empty = eval_h(ident, {});
  CHECK(empty.value == 0.0);
  CHECK(!empty.coupling.has_value());
}

TEST_CASE("eval_h matches vertex enumeration on random instances") {
  testsup::TestRng rng(515);
  for (int trial = 0; trial < 8; ++trial) {
    auto spec = random_spec(rng, 5, 6, 3);
    const auto P = random_subset(rng, 5, 2);
    const auto got = eval_h(spec, P);

    Matrix rows(P.size(), spec.n());
    for (std::size_t r = 0; r < P.size(); ++r)
      for (std::size_t j = 0; j < spec.n(); ++j)
        rows(r, j) = spec.S.s(static_cast<std::size_t>(P[r]), j);
    const std::vector<double> mu(P.size(), 1.0);
    const std::vector<double> nu(spec.n(),
                                 static_cast<double>(P.size()) / static_cast<double>(spec.n()));
    const double best = oracles::ot_vertex_enum_max(rows, mu, nu);
    CHECK(got.value == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("eval_g is the per-prototype average of eval_h") {
  auto single = make_spec(from_rows({{2.75}}), {1.0}, 1);
  CHECK(eval_g(single, {0}).value == doctest::Approx(2.75));

  auto ident = make_spec(from_rows({{3, 1}, {1, 3}}), {0.5, 0.5}, 2);
  auto g = eval_g(ident, {0, 1});
  CHECK(g.value == doctest::Approx(3.0));
  // The attached plan is the balanced one scaled down to unit total mass.
  REQUIRE(g.coupling.has_value());
  CHECK(g.coupling->plan(0, 0) == doctest::Approx(0.5));

  testsup::TestRng rng(99);
  auto spec = random_spec(rng, 7, 5, 4);
  const auto P = random_subset(rng, 7, 3);
  const double h = eval_h(spec, P).value;
  const double gg = eval_g(spec, P).value;
  CHECK(static_cast<double>(P.size()) * gg == doctest::Approx(h).epsilon(1e-12));

  CHECK_THROWS_AS(eval_g(spec, {}), std::invalid_argument);
}

TEST_CASE("eval_f: capacity-relaxed score basics") {
  SUBCASE("single row with full per-column caps takes the best column") {
    // k = n makes each cap one full unit, so the single row's unit lands on
    // its best column.
    auto spec = make_spec(from_rows({{3, 1}, {1, 1}}), {0.5, 0.5}, 2);
    auto f = eval_f(spec, {0}, SolverConfig::exact_mode());
    CHECK(f.value == doctest::Approx(3.0));
    REQUIRE(f.coupling.has_value());
    CHECK(f.coupling->plan(0, 0) == doctest::Approx(1.0));
  }

  SUBCASE("empty set scores zero; oversized sets error") {
    auto spec = make_spec(from_rows({{3, 1}, {1, 3}}), {0.5, 0.5}, 1);
    CHECK(eval_f(spec, {}, SolverConfig::exact_mode()).value == 0.0);
    CHECK_THROWS_AS(eval_f(spec, {0, 1}, SolverConfig::exact_mode()),
                    std::invalid_argument);
  }

  SUBCASE("at full budget the relaxation is tight") {
    testsup::TestRng rng(1212);
    for (int trial = 0; trial < 6; ++trial) {
      auto spec = random_spec(rng, 6, 5, 3);
      const auto P = random_subset(rng, 6, 3);  // |P| = k
      const double f = eval_f(spec, P, SolverConfig::exact_mode()).value;
      const double h = eval_h(spec, P).value;
      CHECK(f == doctest::Approx(h).epsilon(1e-8));
    }
  }

  SUBCASE("below budget the relaxation dominates") {
    testsup::TestRng rng(333);
    for (int trial = 0; trial < 8; ++trial) {
      auto spec = random_spec(rng, 6, 6, 4);
      const auto P = random_subset(rng, 6, 1 + static_cast<std::size_t>(rng.below(3)));
      const double f = eval_f(spec, P, SolverConfig::exact_mode()).value;
      const double h = eval_h(spec, P).value;
      CHECK(f >= h - 1e-9);
    }
  }
}

TEST_CASE("exact_gain: definitions, hand value, and monotone sign") {
  auto ident = make_spec(from_rows({{3, 1}, {1, 3}}), {0.5, 0.5}, 2);
  const auto cfg = SolverConfig::exact_mode();

  // From the empty set the gain is the singleton score.
  CHECK(exact_gain(ident, {}, 0, cfg) ==
        doctest::Approx(eval_f(ident, {0}, cfg).value));
  // Adding the second row completes the identity: 6 - 3.
  CHECK(exact_gain(ident, {0}, 1, cfg) == doctest::Approx(3.0));

  CHECK_THROWS_AS(exact_gain(ident, {0}, 0, cfg), std::invalid_argument);
  CHECK_THROWS_AS(exact_gain(ident, {0, 1}, 0, cfg), std::invalid_argument);

  testsup::TestRng rng(47);
  for (int trial = 0; trial < 10; ++trial) {
    auto spec = random_spec(rng, 6, 5, 4);
    const auto P = random_subset(rng, 6, static_cast<std::size_t>(rng.below(4)));
    int j = static_cast<int>(rng.below(6));
    while (std::find(P.begin(), P.end(), j) != P.end()) j = static_cast<int>(rng.below(6));
    CHECK(exact_gain(spec, P, j, cfg) >= -1e-9);
  }
}

TEST_CASE("exact_gain agrees with the incremental row evaluator") {
  testsup::TestRng rng(648);
  for (int trial = 0; trial < 5; ++trial) {
    auto spec = random_spec(rng, 7, 5, 4);
    const auto P = random_subset(rng, 7, 2);
    const Marginal cap = uniform_marginal(spec.n(), static_cast<double>(spec.k));
    PotRowGainEvaluator ev(spec.S, P, 1.0, cap);
    for (int j = 0; j < 7; ++j) {
      if (std::find(P.begin(), P.end(), j) != P.end()) continue;
      const double direct = exact_gain(spec, P, j, SolverConfig::exact_mode());
      const double inc = ev.objective_with_row(j) - ev.base_objective();
      CHECK(direct == doctest::Approx(inc).epsilon(1e-9));
    }
  }
}

TEST_CASE("remaining_capacity: fresh, partial, and clamped") {
  auto fresh = remaining_capacity(2, 4, nullptr);
  REQUIRE(fresh.size() == 4);
  for (double x : fresh.b) CHECK(x == doctest::Approx(0.5));
  CHECK(fresh.total == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fresh.clamp_magnitude == 0.0);

  Matrix plan(1, 4, 0.0);
  plan(0, 0) = 0.5;
  plan(0, 1) = 0.5;
  const auto used = Coupling::from_plan(plan);
  auto partial = remaining_capacity(2, 4, &used);
  CHECK(partial.b[0] == doctest::Approx(0.0));
  CHECK(partial.b[1] == doctest::Approx(0.0));
  CHECK(partial.b[2] == doctest::Approx(0.5));
  CHECK(partial.b[3] == doctest::Approx(0.5));
  CHECK(partial.total == doctest::Approx(1.0).epsilon(1e-12));

  Matrix over(1, 4, 0.0);
  over(0, 0) = 0.5 + 1e-8;  // entropic-style overshoot
  auto clamped_coupling = Coupling::from_plan(over);
  auto clamped = remaining_capacity(2, 4, &clamped_coupling);
  CHECK(clamped.b[0] == 0.0);
  CHECK(clamped.clamp_magnitude == doctest::Approx(1e-8).epsilon(1e-3));
}

TEST_CASE("approx_gain: hand fills") {
  CapacityVector half;
  half.b = {0.5, 0.5, 0.5, 0.5};
  half.total = 2.0;
  const std::vector<double> row{4, 3, 2, 1};
  auto r = approx_gain(row, half);
  CHECK(r.value == doctest::Approx(3.5));
  CHECK(r.v[0] == doctest::Approx(0.5));
  CHECK(r.v[1] == doctest::Approx(0.5));
  CHECK(r.v[2] == doctest::Approx(0.0));
  CHECK(r.v[3] == doctest::Approx(0.0));

  CapacityVector blocked;
  blocked.b = {0.0, 0.0, 0.5, 0.5};
  blocked.total = 1.0;
  const std::vector<double> row2{9, 1, 2, 3};
  auto r2 = approx_gain(row2, blocked);
  CHECK(r2.value == doctest::Approx(2.5));
  CHECK(r2.v[0] == doctest::Approx(0.0));
  CHECK(r2.v[2] == doctest::Approx(0.5));
  CHECK(r2.v[3] == doctest::Approx(0.5));
}

TEST_CASE("approx_gain: score ties fill the lower column first") {
  CapacityVector b;
  b.b = {0.6, 0.6, 0.6};
  b.total = 1.8;
  const std::vector<double> row{2, 2, 1};
  auto r = approx_gain(row, b);
  CHECK(r.v[0] == doctest::Approx(0.6));
  CHECK(r.v[1] == doctest::Approx(0.4));
  CHECK(r.v[2] == doctest::Approx(0.0));
}

TEST_CASE("approx_gain: short capacity totals renormalize or error") {
  const std::vector<double> row{5, 4};
  CapacityVector slack;
  slack.b = {0.5 - 2.5e-7, 0.5 - 2.5e-7};  // total 1 - 5e-7, inside the slack band
  slack.total = 1.0 - 5e-7;
  auto r = approx_gain(row, slack);
  const double placed = r.v[0] + r.v[1];
  CHECK(placed == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.v[0] == doctest::Approx(0.5).epsilon(1e-6));

  CapacityVector bad;
  bad.b = {0.4, 0.4};
  bad.total = 0.8;
  CHECK_THROWS_AS(approx_gain(row, bad), std::invalid_argument);
}

TEST_CASE("approx_gain matches a one-row exact partial solve") {
  testsup::TestRng rng(774);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 5;
    Matrix row_m = testsup::random_similarity(rng, 1, n);
    // Random capacities with enough total to place one unit.
    std::vector<double> caps = testsup::random_masses(rng, n, 1.4);
    if (trial % 3 == 0) caps[rng.below(n)] = 0.0;  // exercise blocked columns
    double total = 0.0;
    for (double c : caps) total += c;
    if (total < 1.0 + 1e-6) continue;

    CapacityVector b;
    b.b = caps;
    b.total = total;
    std::vector<double> srow(row_m.row(0), row_m.row(0) + n);
    auto got = approx_gain(srow, b);

    const double lp = oracles::pot_lp_max(row_m, 1.0, caps);
    CHECK(got.value == doctest::Approx(lp).epsilon(1e-9));

    const double solver = pot_exact(row_m, 1.0, Marginal::from(caps)).objective;
    CHECK(got.value == doctest::Approx(solver).epsilon(1e-9));

    // The fill is a feasible unit allocation under the caps.
    double mass = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      CHECK(got.v[j] >= 0.0);
      CHECK(got.v[j] <= caps[j] + 1e-12);
      mass += got.v[j];
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("approx_gain_sorted reuses precomputed column orders") {
  testsup::TestRng rng(31);
  auto S = SimilarityMatrix::from_raw(testsup::random_similarity(rng, 4, 6));
  const auto sorted = SortedRows::build(S);
  REQUIRE(sorted.order.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    const double* row = S.s.row(i);
    for (std::size_t t = 0; t + 1 < 6; ++t) {
      const int a = sorted.order[i][t], b = sorted.order[i][t + 1];
      CHECK((row[a] > row[b] || (row[a] == row[b] && a < b)));
    }
  }

  auto b = remaining_capacity(3, 6, nullptr);
  for (std::size_t i = 0; i < 4; ++i) {
    std::vector<double> srow(S.s.row(i), S.s.row(i) + 6);
    auto plain = approx_gain(srow, b);
    auto cached = approx_gain_sorted(S.s.row(i), sorted.order[i], b);
    CHECK(plain.value == cached.value);
    CHECK(plain.v == cached.v);
  }
}

TEST_CASE("alpha_bound: block averages and edge cases") {
  auto S = SimilarityMatrix::from_raw(from_rows({{4, 3, 2, 1}}));
  auto a = alpha_bound(S, 2);
  CHECK(a.block == 2);
  CHECK(a.alpha_min[0] == doctest::Approx(1.5));
  CHECK(a.alpha_max[0] == doctest::Approx(3.5));
  CHECK(a.alpha == doctest::Approx(3.0 / 7.0));

  auto C = SimilarityMatrix::from_raw(from_rows({{2, 2, 2, 2}}));
  CHECK(alpha_bound(C, 2).alpha == doctest::Approx(1.0));

  auto Z = SimilarityMatrix::from_raw(from_rows({{0, 0, 0}}));
  CHECK(alpha_bound(Z, 1).alpha == doctest::Approx(1.0));  // 0/0 counts as 1

  CHECK_THROWS_AS(alpha_bound(S, 5), std::invalid_argument);
  CHECK_THROWS_AS(alpha_bound(S, 0), std::invalid_argument);

  testsup::TestRng rng(8888);
  for (int trial = 0; trial < 10; ++trial) {
    auto R = SimilarityMatrix::from_raw(testsup::random_similarity(rng, 5, 7));
    auto bound = alpha_bound(R, 1 + rng.below(7));
    CHECK(bound.alpha > 0.0);
    CHECK(bound.alpha <= 1.0);
    for (std::size_t i = 0; i < 5; ++i) CHECK(bound.alpha_min[i] <= bound.alpha_max[i]);
  }
}

TEST_CASE("set-score structure on random instances") {
  testsup::TestRng rng(5150);
  const auto cfg = SolverConfig::exact_mode();

  SUBCASE("growing a set never lowers the balanced or relaxed score") {
    for (int trial = 0; trial < 6; ++trial) {
      auto spec = random_spec(rng, 6, 5, 5);
      std::vector<int> chain = random_subset(rng, 6, 4);
      std::vector<int> prefix;
      double prev_h = 0.0, prev_f = 0.0;
      for (int idx : chain) {
        prefix.push_back(idx);
        const double h = eval_h(spec, prefix).value;
        const double f = eval_f(spec, prefix, cfg).value;
        CHECK(h >= prev_h - 1e-9);
        CHECK(f >= prev_f - 1e-9);
        CHECK(h >= -1e-12);
        CHECK(f >= -1e-12);
        prev_h = h;
        prev_f = f;
      }
    }
  }

  SUBCASE("disjoint unions beat the sum of parts for the balanced score") {
    for (int trial = 0; trial < 6; ++trial) {
      auto spec = random_spec(rng, 7, 5, 7);
      auto both = random_subset(rng, 7, 4);
      std::vector<int> p1(both.begin(), both.begin() + 2);
      std::vector<int> p2(both.begin() + 2, both.end());
      const double whole = eval_h(spec, both).value;
      const double parts = eval_h(spec, p1).value + eval_h(spec, p2).value;
      CHECK(whole >= parts - 1e-8);
    }
  }

  SUBCASE("relaxed-score gains shrink as the base set grows") {
    for (int trial = 0; trial < 6; ++trial) {
      auto spec = random_spec(rng, 6, 5, 4);
      auto B = random_subset(rng, 6, 3);
      std::vector<int> A(B.begin(), B.begin() + 1);
      int u = static_cast<int>(rng.below(6));
      while (std::find(B.begin(), B.end(), u) != B.end()) u = static_cast<int>(rng.below(6));
      const double gain_small = exact_gain(spec, A, u, cfg);
      const double gain_large = exact_gain(spec, B, u, cfg);
      CHECK(gain_small >= gain_large - 1e-8);
    }
  }
}

TEST_CASE("gain sandwich: closed-form fill vs true gain") {
  testsup::TestRng rng(31337);
  const auto cfg = SolverConfig::exact_mode();
  for (int trial = 0; trial < 8; ++trial) {
    const std::size_t m = 6, n = 6, k = 3;
    auto spec = random_spec(rng, m, n, k);
    const auto bound = alpha_bound(spec.S, k);
    const auto P = random_subset(rng, m, static_cast<std::size_t>(rng.below(k)));
    const auto base = eval_f(spec, P, cfg);
    const auto b =
        remaining_capacity(k, n, base.coupling ? &*base.coupling : nullptr);

    for (int j = 0; j < static_cast<int>(m); ++j) {
      if (std::find(P.begin(), P.end(), j) != P.end()) continue;
      std::vector<double> srow(spec.S.s.row(static_cast<std::size_t>(j)),
                               spec.S.s.row(static_cast<std::size_t>(j)) + n);
      const double approx = approx_gain(srow, b).value;
      const double exact = exact_gain(spec, P, j, cfg);
      CHECK(approx >= 0.0);
      CHECK(approx <= exact + 1e-9);
      const double ratio =
          bound.alpha_max[static_cast<std::size_t>(j)] == 0.0
              ? 1.0
              : bound.alpha_min[static_cast<std::size_t>(j)] /
                    bound.alpha_max[static_cast<std::size_t>(j)];
      CHECK(approx >= ratio * exact - 1e-8);
    }
  }
}
