#include <array>
#include <cmath>

#include "dtinspect/simd/kernels.hpp"
#include "lab_constants.hpp"

namespace dtinspect::simd {

const float *SrgbToLinearTable() {
  static const std::array<float, 256> table = [] {
    std::array<float, 256> t{};
    for (int i = 0; i < 256; ++i) {
      const double c = i / 255.0;
      t[i] = static_cast<float>(c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4));
    }
    return t;
  }();
  return table.data();
}

namespace {

using namespace detail;

inline bool Valid(float d) { return std::isfinite(d) && d > 0.0f; }

inline float LabF(float t) { return t > kLabEpsilon ? std::cbrt(t) : t * kLabSlope + kLabOffset; }

inline void Lab(const std::uint8_t *px, const float *lut, float &l, float &a, float &b) {
  const float r = lut[px[0]], g = lut[px[1]], bl = lut[px[2]];
  const float fx = LabF(kM00 * r + kM01 * g + kM02 * bl);
  const float fy = LabF(kM10 * r + kM11 * g + kM12 * bl);
  const float fz = LabF(kM20 * r + kM21 * g + kM22 * bl);
  l = 116.0f * fy - 16.0f;
  a = 500.0f * (fx - fy);
  b = 200.0f * (fy - fz);
}

void DepthAbsDiff(const float *render, const float *real, float *out, std::uint8_t *valid,
                  std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const bool ok = Valid(render[i]) && Valid(real[i]);
    out[i] = ok ? std::fabs(render[i] - real[i]) : 0.0f;
    valid[i] = ok ? 1 : 0;
  }
}

void RgbToLab(const std::uint8_t *rgb, float *l, float *a, float *b, std::size_t n) {
  const float *lut = SrgbToLinearTable();
  for (std::size_t i = 0; i < n; ++i) Lab(rgb + 3 * i, lut, l[i], a[i], b[i]);
}

void DeltaE76(const std::uint8_t *rgb_a, const std::uint8_t *rgb_b, const std::uint8_t *mask,
              float *out, std::uint8_t *valid, std::size_t n) {
  const float *lut = SrgbToLinearTable();
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask[i]) {
      out[i] = 0.0f;
      valid[i] = 0;
      continue;
    }
    float l0, a0, b0, l1, a1, b1;
    Lab(rgb_a + 3 * i, lut, l0, a0, b0);
    Lab(rgb_b + 3 * i, lut, l1, a1, b1);
    const float dl = l0 - l1, da = a0 - a1, db = b0 - b1;
    out[i] = std::sqrt(dl * dl + da * da + db * db);
    valid[i] = 1;
  }
}

void Threshold(const float *values, const std::uint8_t *valid, float tau, std::uint8_t *bits,
               std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) bits[i] = (valid[i] != 0 && values[i] >= tau) ? 1 : 0;
}

}  // namespace

const KernelTable &ScalarKernels() {
  static const KernelTable table{"scalar", DepthAbsDiff, RgbToLab, DeltaE76, Threshold};
  return table;
}

}  // namespace dtinspect::simd
