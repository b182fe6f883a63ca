#include "uniprot/kernels.hpp"

#include <cmath>

namespace uniprot::kernels {

namespace detail {

// Shared by every backend so entropic kernels are ISA-independent.
void exp_scale_impl(double* dst, const double* a, double inv_lambda, double shift,
                    std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = std::exp((a[i] - shift) * inv_lambda);
}

}  // namespace detail

namespace {

double dot_(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void scale_(double* dst, const double* a, double c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] * c;
}

void axpy_(double* dst, const double* a, double c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += a[i] * c;
}

void mul_(double* dst, const double* a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] *= a[i];
}

double sum_(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

double max_val_(const double* a, std::size_t n) {
  double m = a[0];
  for (std::size_t i = 1; i < n; ++i) m = a[i] > m ? a[i] : m;
  return m;
}

void ewise_max_(double* dst, const double* a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] > dst[i] ? a[i] : dst[i];
}

double max_abs_diff_(const double* a, const double* b, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::fabs(a[i] - b[i]);
    m = d > m ? d : m;
  }
  return m;
}

double sq_l2_(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double l1_dist_(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::fabs(a[i] - b[i]);
  return acc;
}

}  // namespace

const Ops& scalar() {
  static const Ops ops = {
      "scalar", dot_,          scale_, axpy_,    mul_,     sum_,
      max_val_, ewise_max_,    max_abs_diff_,    sq_l2_,   l1_dist_,
      detail::exp_scale_impl,
  };
  return ops;
}

}  // namespace uniprot::kernels
