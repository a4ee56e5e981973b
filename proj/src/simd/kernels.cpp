#include "dtinspect/simd/kernels.hpp"

#include <cstdlib>
#include <string_view>

namespace dtinspect::simd {

#if defined(DTINSPECT_HAVE_AVX2)
const KernelTable &Avx2Table();
#endif
#if defined(DTINSPECT_HAVE_NEON)
const KernelTable &NeonTable();
#endif

const KernelTable *Avx2Kernels() {
#if defined(DTINSPECT_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &Avx2Table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable *NeonKernels() {
#if defined(DTINSPECT_HAVE_NEON)
  return &NeonTable();
#else
  return nullptr;
#endif
}

std::vector<const KernelTable *> AvailableKernels() {
  std::vector<const KernelTable *> out{&ScalarKernels()};
  if (const KernelTable *t = Avx2Kernels()) out.push_back(t);
  if (const KernelTable *t = NeonKernels()) out.push_back(t);
  return out;
}

const KernelTable &ActiveKernels() {
  static const KernelTable *active = [] {
    const auto available = AvailableKernels();
    if (const char *forced = std::getenv("DTINSPECT_ISA")) {
      for (const KernelTable *t : available) {
        if (t->isa == std::string_view(forced)) return t;
      }
    }
    return available.back();
  }();
  return *active;
}

}  // namespace dtinspect::simd
