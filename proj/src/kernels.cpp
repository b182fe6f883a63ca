#include "uniprot/kernels.hpp"

#include <cstdlib>

namespace uniprot::kernels {

#if defined(__x86_64__) || defined(_M_X64)
const Ops& avx2();  // defined in the -mavx2 translation unit
#define UNIPROT_HAVE_AVX2_TU 1
#endif
#if defined(__aarch64__)
const Ops& neon();
#define UNIPROT_HAVE_NEON_TU 1
#endif

namespace {

bool cpu_has_avx2() {
#if defined(UNIPROT_HAVE_AVX2_TU) && defined(__GNUC__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Ops* best_supported() {
#if defined(UNIPROT_HAVE_AVX2_TU)
  if (cpu_has_avx2()) return &avx2();
#endif
#if defined(UNIPROT_HAVE_NEON_TU)
  return &neon();  // baseline on aarch64
#endif
  return &scalar();
}

const Ops* by_name(std::string_view name) {
  if (name == "scalar") return &scalar();
  if (name == "auto") return best_supported();
#if defined(UNIPROT_HAVE_AVX2_TU)
  if (name == "avx2" && cpu_has_avx2()) return &avx2();
#endif
#if defined(UNIPROT_HAVE_NEON_TU)
  if (name == "neon") return &neon();
#endif
  return nullptr;
}

const Ops*& slot() {
  static const Ops* current = [] {
    if (const char* env = std::getenv("UNIPROT_KERNELS")) {
      if (const Ops* ops = by_name(env)) return ops;
    }
    return best_supported();
  }();
  return current;
}

}  // namespace

const Ops& active() { return *slot(); }

bool set_backend(std::string_view name) {
  const Ops* ops = by_name(name);
  if (!ops) return false;
  slot() = ops;
  return true;
}

std::vector<const Ops*> available() {
  std::vector<const Ops*> out{&scalar()};
#if defined(UNIPROT_HAVE_AVX2_TU)
  if (cpu_has_avx2()) out.push_back(&avx2());
#endif
#if defined(UNIPROT_HAVE_NEON_TU)
  out.push_back(&neon());
#endif
  return out;
}

}  // namespace uniprot::kernels
