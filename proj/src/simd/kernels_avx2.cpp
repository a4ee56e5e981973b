// Compiled with -mavx2 -mfma -ffp-contract=off so identical inputs always
// produce identical lanes. Only reached after a runtime CPU check.

#include <immintrin.h>

#include <cmath>

#include "dtinspect/simd/kernels.hpp"
#include "lab_constants.hpp"

namespace dtinspect::simd {

namespace {

using namespace detail;

inline __m256 ValidDepth(__m256 d) {
  const __m256 gt0 = _mm256_cmp_ps(d, _mm256_setzero_ps(), _CMP_GT_OQ);
  const __m256 finite = _mm256_cmp_ps(d, _mm256_set1_ps(INFINITY), _CMP_LT_OQ);
  return _mm256_and_ps(gt0, finite);
}

// Writes one 0/1 byte per lane of an all-ones/all-zeros lane mask.
inline void StoreMaskBytes(__m256 mask, std::uint8_t *dst) {
  const __m256i ones = _mm256_srli_epi32(_mm256_castps_si256(mask), 31);
  const __m128i p16 = _mm_packus_epi32(_mm256_castsi256_si128(ones), _mm256_extracti128_si256(ones, 1));
  _mm_storel_epi64(reinterpret_cast<__m128i *>(dst), _mm_packus_epi16(p16, p16));
}

inline __m256 LoadMaskBytes(const std::uint8_t *src) {
  const __m128i bytes = _mm_loadl_epi64(reinterpret_cast<const __m128i *>(src));
  const __m256i wide = _mm256_cvtepu8_epi32(bytes);
  return _mm256_castsi256_ps(_mm256_cmpgt_epi32(wide, _mm256_setzero_si256()));
}

// Cube root for t > 0: exponent-halving seed then three Newton steps.
inline __m256 Cbrt(__m256 t) {
  const __m256i bits = _mm256_castps_si256(t);
  const __m256 third = _mm256_set1_ps(1.0f / 3.0f);
  __m256i seed = _mm256_cvttps_epi32(_mm256_mul_ps(_mm256_cvtepi32_ps(bits), third));
  seed = _mm256_add_epi32(seed, _mm256_set1_epi32(709921077));
  __m256 y = _mm256_castsi256_ps(seed);
  const __m256 two = _mm256_set1_ps(2.0f);
  for (int i = 0; i < 3; ++i) {
    const __m256 y2 = _mm256_mul_ps(y, y);
    y = _mm256_mul_ps(_mm256_add_ps(_mm256_mul_ps(two, y), _mm256_div_ps(t, y2)), third);
  }
  return y;
}

inline __m256 LabF(__m256 t) {
  const __m256 linear = _mm256_fmadd_ps(t, _mm256_set1_ps(kLabSlope), _mm256_set1_ps(kLabOffset));
  const __m256 above = _mm256_cmp_ps(t, _mm256_set1_ps(kLabEpsilon), _CMP_GT_OQ);
  // Keep the cube-root lane well defined where the linear branch wins.
  const __m256 safe = _mm256_max_ps(t, _mm256_set1_ps(kLabEpsilon));
  return _mm256_blendv_ps(linear, Cbrt(safe), above);
}

struct Lab8 {
  __m256 l, a, b;
};

inline Lab8 Lab(const std::uint8_t *rgb, const float *lut) {
  const __m256i ri = _mm256_setr_epi32(rgb[0], rgb[3], rgb[6], rgb[9], rgb[12], rgb[15], rgb[18], rgb[21]);
  const __m256i gi = _mm256_setr_epi32(rgb[1], rgb[4], rgb[7], rgb[10], rgb[13], rgb[16], rgb[19], rgb[22]);
  const __m256i bi = _mm256_setr_epi32(rgb[2], rgb[5], rgb[8], rgb[11], rgb[14], rgb[17], rgb[20], rgb[23]);
  const __m256 r = _mm256_i32gather_ps(lut, ri, 4);
  const __m256 g = _mm256_i32gather_ps(lut, gi, 4);
  const __m256 b = _mm256_i32gather_ps(lut, bi, 4);
  auto row = [&](float m0, float m1, float m2) {
    return _mm256_fmadd_ps(_mm256_set1_ps(m2), b,
                           _mm256_fmadd_ps(_mm256_set1_ps(m1), g, _mm256_mul_ps(_mm256_set1_ps(m0), r)));
  };
  const __m256 fx = LabF(row(kM00, kM01, kM02));
  const __m256 fy = LabF(row(kM10, kM11, kM12));
  const __m256 fz = LabF(row(kM20, kM21, kM22));
  Lab8 out;
  out.l = _mm256_fmsub_ps(_mm256_set1_ps(116.0f), fy, _mm256_set1_ps(16.0f));
  out.a = _mm256_mul_ps(_mm256_set1_ps(500.0f), _mm256_sub_ps(fx, fy));
  out.b = _mm256_mul_ps(_mm256_set1_ps(200.0f), _mm256_sub_ps(fy, fz));
  return out;
}

void DepthAbsDiff(const float *render, const float *real, float *out, std::uint8_t *valid,
                  std::size_t n) {
  const __m256 abs_mask = _mm256_castsi256_ps(_mm256_set1_epi32(0x7fffffff));
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 a = _mm256_loadu_ps(render + i);
    const __m256 b = _mm256_loadu_ps(real + i);
    const __m256 ok = _mm256_and_ps(ValidDepth(a), ValidDepth(b));
    const __m256 diff = _mm256_and_ps(_mm256_sub_ps(a, b), abs_mask);
    _mm256_storeu_ps(out + i, _mm256_and_ps(diff, ok));
    StoreMaskBytes(ok, valid + i);
  }
  if (i < n) ScalarKernels().depth_abs_diff(render + i, real + i, out + i, valid + i, n - i);
}

void RgbToLab(const std::uint8_t *rgb, float *l, float *a, float *b, std::size_t n) {
  const float *lut = SrgbToLinearTable();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const Lab8 lab = Lab(rgb + 3 * i, lut);
    _mm256_storeu_ps(l + i, lab.l);
    _mm256_storeu_ps(a + i, lab.a);
    _mm256_storeu_ps(b + i, lab.b);
  }
  if (i < n) ScalarKernels().rgb_to_lab(rgb + 3 * i, l + i, a + i, b + i, n - i);
}

void DeltaE76(const std::uint8_t *rgb_a, const std::uint8_t *rgb_b, const std::uint8_t *mask,
              float *out, std::uint8_t *valid, std::size_t n) {
  const float *lut = SrgbToLinearTable();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 m = LoadMaskBytes(mask + i);
    if (_mm256_movemask_ps(m) == 0) {
      _mm256_storeu_ps(out + i, _mm256_setzero_ps());
      StoreMaskBytes(_mm256_setzero_ps(), valid + i);
      continue;
    }
    const Lab8 p = Lab(rgb_a + 3 * i, lut);
    const Lab8 q = Lab(rgb_b + 3 * i, lut);
    const __m256 dl = _mm256_sub_ps(p.l, q.l);
    const __m256 da = _mm256_sub_ps(p.a, q.a);
    const __m256 db = _mm256_sub_ps(p.b, q.b);
    const __m256 sq = _mm256_fmadd_ps(dl, dl, _mm256_fmadd_ps(da, da, _mm256_mul_ps(db, db)));
    _mm256_storeu_ps(out + i, _mm256_and_ps(_mm256_sqrt_ps(sq), m));
    StoreMaskBytes(m, valid + i);
  }
  if (i < n) {
    ScalarKernels().delta_e76(rgb_a + 3 * i, rgb_b + 3 * i, mask + i, out + i, valid + i, n - i);
  }
}

void Threshold(const float *values, const std::uint8_t *valid, float tau, std::uint8_t *bits,
               std::size_t n) {
  const __m256 t = _mm256_set1_ps(tau);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 ge = _mm256_cmp_ps(_mm256_loadu_ps(values + i), t, _CMP_GE_OQ);
    StoreMaskBytes(_mm256_and_ps(ge, LoadMaskBytes(valid + i)), bits + i);
  }
  if (i < n) ScalarKernels().threshold(values + i, valid + i, tau, bits + i, n - i);
}

}  // namespace

// Defined here so the table is only reachable from this TU's symbols.
const KernelTable &Avx2Table() {
  static const KernelTable table{"avx2", DepthAbsDiff, RgbToLab, DeltaE76, Threshold};
  return table;
}

}  // namespace dtinspect::simd
