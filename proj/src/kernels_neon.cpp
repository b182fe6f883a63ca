#include "uniprot/kernels.hpp"

#include <arm_neon.h>

#include <cmath>

namespace uniprot::kernels {

namespace detail {
void exp_scale_impl(double* dst, const double* a, double inv_lambda, double shift,
                    std::size_t n);
}

namespace {

double dot_(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void scale_(double* dst, const double* a, double c, std::size_t n) {
  const float64x2_t vc = vdupq_n_f64(c);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(dst + i, vmulq_f64(vld1q_f64(a + i), vc));
  for (; i < n; ++i) dst[i] = a[i] * c;
}

void axpy_(double* dst, const double* a, double c, std::size_t n) {
  const float64x2_t vc = vdupq_n_f64(c);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(dst + i, vfmaq_f64(vld1q_f64(dst + i), vld1q_f64(a + i), vc));
  for (; i < n; ++i) dst[i] += a[i] * c;
}

void mul_(double* dst, const double* a, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(dst + i, vmulq_f64(vld1q_f64(dst + i), vld1q_f64(a + i)));
  for (; i < n; ++i) dst[i] *= a[i];
}

double sum_(const double* a, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(a + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}

double max_val_(const double* a, std::size_t n) {
  std::size_t i = 0;
  double m;
  if (n >= 2) {
    float64x2_t vm = vld1q_f64(a);
    for (i = 2; i + 2 <= n; i += 2) vm = vmaxq_f64(vm, vld1q_f64(a + i));
    m = vmaxvq_f64(vm);
  } else {
    m = a[0];
    i = 1;
  }
  for (; i < n; ++i) m = a[i] > m ? a[i] : m;
  return m;
}

void ewise_max_(double* dst, const double* a, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(dst + i, vmaxq_f64(vld1q_f64(dst + i), vld1q_f64(a + i)));
  for (; i < n; ++i) dst[i] = a[i] > dst[i] ? a[i] : dst[i];
}

double max_abs_diff_(const double* a, const double* b, std::size_t n) {
  float64x2_t vm = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vm = vmaxq_f64(vm, vabdq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  double m = vmaxvq_f64(vm);
  for (; i < n; ++i) {
    const double d = std::fabs(a[i] - b[i]);
    m = d > m ? d : m;
  }
  return m;
}

double sq_l2_(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    acc = vfmaq_f64(acc, d, d);
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double l1_dist_(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    acc = vaddq_f64(acc, vabdq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

}  // namespace

const Ops& neon() {
  static const Ops ops = {
      "neon",   dot_,          scale_, axpy_,    mul_,     sum_,
      max_val_, ewise_max_,    max_abs_diff_,    sq_l2_,   l1_dist_,
      detail::exp_scale_impl,
  };
  return ops;
}

}  // namespace uniprot::kernels
