// AArch64 variant. NEON is mandatory on AArch64, so no runtime check is needed.

#include <arm_neon.h>

#include <cmath>

#include "dtinspect/simd/kernels.hpp"
#include "lab_constants.hpp"

namespace dtinspect::simd {

namespace {

inline uint32x4_t ValidDepth(float32x4_t d) {
  return vandq_u32(vcgtq_f32(d, vdupq_n_f32(0.0f)), vcltq_f32(d, vdupq_n_f32(INFINITY)));
}

inline void StoreMaskBytes(uint32x4_t m, std::uint8_t *dst) {
  const uint16x4_t narrow16 = vmovn_u32(vshrq_n_u32(m, 31));
  const uint8x8_t narrow8 = vmovn_u16(vcombine_u16(narrow16, narrow16));
  vst1_lane_u32(reinterpret_cast<std::uint32_t *>(dst), vreinterpret_u32_u8(narrow8), 0);
}

inline uint32x4_t LoadMaskBytes(const std::uint8_t *src) {
  const std::uint32_t word = static_cast<std::uint32_t>(src[0]) | (static_cast<std::uint32_t>(src[1]) << 8) |
                             (static_cast<std::uint32_t>(src[2]) << 16) | (static_cast<std::uint32_t>(src[3]) << 24);
  const uint8x8_t bytes = vreinterpret_u8_u32(vdup_n_u32(word));
  const uint32x4_t wide = vmovl_u16(vget_low_u16(vmovl_u8(bytes)));
  return vcgtq_u32(wide, vdupq_n_u32(0));
}

void DepthAbsDiff(const float *render, const float *real, float *out, std::uint8_t *valid,
                  std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float32x4_t a = vld1q_f32(render + i);
    const float32x4_t b = vld1q_f32(real + i);
    const uint32x4_t ok = vandq_u32(ValidDepth(a), ValidDepth(b));
    const float32x4_t diff = vabdq_f32(a, b);
    vst1q_f32(out + i, vreinterpretq_f32_u32(vandq_u32(vreinterpretq_u32_f32(diff), ok)));
    StoreMaskBytes(ok, valid + i);
  }
  if (i < n) ScalarKernels().depth_abs_diff(render + i, real + i, out + i, valid + i, n - i);
}

void Threshold(const float *values, const std::uint8_t *valid, float tau, std::uint8_t *bits,
               std::size_t n) {
  const float32x4_t t = vdupq_n_f32(tau);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const uint32x4_t ge = vcgeq_f32(vld1q_f32(values + i), t);
    StoreMaskBytes(vandq_u32(ge, LoadMaskBytes(valid + i)), bits + i);
  }
  if (i < n) ScalarKernels().threshold(values + i, valid + i, tau, bits + i, n - i);
}

}  // namespace

// The CIELAB kernels stay scalar on NEON: the table lookups dominate and
// there is no gather instruction.
const KernelTable &NeonTable() {
  static const KernelTable table{"neon", DepthAbsDiff, ScalarKernels().rgb_to_lab,
                                 ScalarKernels().delta_e76, Threshold};
  return table;
}

}  // namespace dtinspect::simd
