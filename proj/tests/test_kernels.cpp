#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "uniprot/kernels.hpp"

namespace {

// Deterministic xorshift so the equivalence tests don't depend on libstdc++
// distribution internals.
struct TinyRng {
  std::uint64_t s;
  explicit TinyRng(std::uint64_t seed) : s(seed ? seed : 1) {}
  std::uint64_t next() {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    return s;
  }
  double uniform(double lo, double hi) {
    const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }
};

std::vector<double> random_vec(TinyRng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

bool close_rel(double a, double b, double tol) {
  const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  return std::fabs(a - b) <= tol * scale;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar backend known values") {
  const auto& k = uniprot::kernels::scalar();
  const double a[] = {1.0, 2.0, 3.0};
  const double b[] = {4.0, -5.0, 6.0};
  CHECK(k.dot(a, b, 3) == doctest::Approx(12.0));
  CHECK(k.sum(a, 3) == doctest::Approx(6.0));
  CHECK(k.max_val(b, 3) == doctest::Approx(6.0));
  CHECK(k.max_abs_diff(a, b, 3) == doctest::Approx(7.0));
  CHECK(k.sq_l2(a, b, 3) == doctest::Approx(9.0 + 49.0 + 9.0));
  CHECK(k.l1_dist(a, b, 3) == doctest::Approx(3.0 + 7.0 + 3.0));

  double dst[] = {1.0, 1.0, 1.0};
  k.axpy(dst, a, 2.0, 3);
  CHECK(dst[0] == doctest::Approx(3.0));
  CHECK(dst[2] == doctest::Approx(7.0));
  k.scale(dst, a, -1.0, 3);
  CHECK(dst[1] == doctest::Approx(-2.0));
  double mx[] = {0.0, 5.0, 2.0};
  k.ewise_max(mx, a, 3);
  CHECK(mx[0] == doctest::Approx(1.0));
  CHECK(mx[1] == doctest::Approx(5.0));
  double ml[] = {2.0, 3.0, 4.0};
  k.mul(ml, a, 3);
  CHECK(ml[2] == doctest::Approx(12.0));
  double ex[3];
  k.exp_scale(ex, a, 2.0, 3.0, 3);
  CHECK(ex[0] == doctest::Approx(std::exp(-4.0)));
  CHECK(ex[2] == doctest::Approx(1.0));
}

TEST_CASE("backend registry") {
  auto avail = uniprot::kernels::available();
  CHECK(avail.size() >= 1);
  CHECK(uniprot::kernels::set_backend("scalar"));
  CHECK(std::string_view(uniprot::kernels::active().name) == "scalar");
  CHECK_FALSE(uniprot::kernels::set_backend("not-a-backend"));
  CHECK(std::string_view(uniprot::kernels::active().name) == "scalar");
  CHECK(uniprot::kernels::set_backend("auto"));
}

TEST_CASE("simd backends agree with scalar reference") {
  const auto& ref = uniprot::kernels::scalar();
  TinyRng rng(0xC0FFEE);
  // Lengths straddle the vector width, including remainders and empties.
  const std::size_t lens[] = {0, 1, 2, 3, 4, 5, 7, 8, 15, 16, 33, 257, 1000};
  for (const auto* ops : uniprot::kernels::available()) {
    CAPTURE(ops->name);
    for (std::size_t n : lens) {
      auto a = random_vec(rng, n, -10.0, 10.0);
      auto b = random_vec(rng, n, -10.0, 10.0);
      if (n > 0) {
        CHECK(close_rel(ops->dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n),
                        1e-13));
        CHECK(close_rel(ops->sum(a.data(), n), ref.sum(a.data(), n), 1e-13));
        CHECK(ops->max_val(a.data(), n) == ref.max_val(a.data(), n));
        CHECK(ops->max_abs_diff(a.data(), b.data(), n) ==
              ref.max_abs_diff(a.data(), b.data(), n));
        CHECK(close_rel(ops->sq_l2(a.data(), b.data(), n), ref.sq_l2(a.data(), b.data(), n),
                        1e-13));
        CHECK(close_rel(ops->l1_dist(a.data(), b.data(), n),
                        ref.l1_dist(a.data(), b.data(), n), 1e-13));
      }
      std::vector<double> d1 = b, d2 = b;
      ops->axpy(d1.data(), a.data(), 1.75, n);
      ref.axpy(d2.data(), a.data(), 1.75, n);
      // axpy may fuse the multiply-add, so agreement is to rounding only.
      for (std::size_t i = 0; i < n; ++i) CHECK(close_rel(d1[i], d2[i], 1e-13));
      d1 = b;
      d2 = b;
      ops->scale(d1.data(), a.data(), -0.3, n);
      ref.scale(d2.data(), a.data(), -0.3, n);
      for (std::size_t i = 0; i < n; ++i) CHECK(d1[i] == d2[i]);
      d1 = b;
      d2 = b;
      ops->mul(d1.data(), a.data(), n);
      ref.mul(d2.data(), a.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(d1[i] == d2[i]);
      d1 = b;
      d2 = b;
      ops->ewise_max(d1.data(), a.data(), n);
      ref.ewise_max(d2.data(), a.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(d1[i] == d2[i]);
      std::vector<double> e1(n), e2(n);
      ops->exp_scale(e1.data(), a.data(), 0.5, 1.0, n);
      ref.exp_scale(e2.data(), a.data(), 0.5, 1.0, n);
      for (std::size_t i = 0; i < n; ++i) CHECK(e1[i] == e2[i]);
    }
  }
}

}  // TEST_SUITE
