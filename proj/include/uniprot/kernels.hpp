#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace uniprot::kernels {

// Dense f64 primitives used by the transport solvers, objective scoring and
// similarity construction. Every operation has a scalar reference
// implementation; SIMD variants (AVX2 on x86-64, NEON on aarch64) are selected
// at runtime and may reassociate reductions, so cross-backend agreement is
// approximate (tested at ~1e-13 relative) while results within one backend are
// deterministic.
//
// exp_scale is intentionally the same scalar routine in every backend: the
// entropic solvers' Gibbs kernels must not depend on which vector ISA is
// active.
struct Ops {
  const char* name;

  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // dst[i] = a[i] * c
  void (*scale)(double* dst, const double* a, double c, std::size_t n);
  // dst[i] += a[i] * c
  void (*axpy)(double* dst, const double* a, double c, std::size_t n);
  // dst[i] *= a[i]
  void (*mul)(double* dst, const double* a, std::size_t n);
  // sum_i a[i]
  double (*sum)(const double* a, std::size_t n);
  // max_i a[i]; n must be >= 1
  double (*max_val)(const double* a, std::size_t n);
  // dst[i] = max(dst[i], a[i])
  void (*ewise_max)(double* dst, const double* a, std::size_t n);
  // max_i |a[i] - b[i]|; 0 for n == 0
  double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
  // sum_i (a[i] - b[i])^2
  double (*sq_l2)(const double* a, const double* b, std::size_t n);
  // sum_i |a[i] - b[i]|
  double (*l1_dist)(const double* a, const double* b, std::size_t n);
  // dst[i] = exp((a[i] - shift) * inv_lambda); scalar in all backends
  void (*exp_scale)(double* dst, const double* a, double inv_lambda, double shift,
                    std::size_t n);
};

// Reference implementation; always present.
const Ops& scalar();

// Currently selected backend. Initial selection honors the UNIPROT_KERNELS
// environment variable ("scalar", "avx2", "neon", "auto"), falling back to the
// best backend the CPU supports.
const Ops& active();

// Switch backends by name; "auto" re-runs detection. Returns false (and leaves
// the selection unchanged) if the backend is unknown or unsupported here.
bool set_backend(std::string_view name);

// Backends compiled in and usable on this CPU.
std::vector<const Ops*> available();

}  // namespace uniprot::kernels
